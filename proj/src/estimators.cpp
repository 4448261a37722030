#include "gfou/estimators.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfou/errors.hpp"
#include "gfou/pathint.hpp"
#include "gfou/stats.hpp"

namespace gfou {

using namespace stats;

std::string to_string(HurstMethod m) { return m == HurstMethod::VarianceTime ? "variance-time" : "rescaled-range"; }

namespace {

struct VarianceCurve {
    std::vector<double> log_m;
    std::vector<double> log_var;
    std::vector<double> blocks;
};

VarianceCurve aggregated_variances(std::span<const double> x) {
    VarianceCurve c;
    const std::size_t n = x.size();
    for (std::size_t m = 1; n / m >= 16; m *= 2) {
        const std::size_t k = n / m;
        std::vector<double> means(k);
        for (std::size_t b = 0; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += x[b * m + i];
            means[b] = s / static_cast<double>(m);
        }
        const double v = variance(means);
        if (!(v > 0.0)) continue;
        c.log_m.push_back(std::log(static_cast<double>(m)));
        c.log_var.push_back(std::log(v));
        c.blocks.push_back(static_cast<double>(k));
    }
    return c;
}

double variance_time(std::span<const double> x) {
    const VarianceCurve c = aggregated_variances(x);
    if (c.log_m.size() < 3) throw DomainError("hurst: too few block sizes");
    auto residual = [&](double h) {
        const double e = 2.0 * h - 2.0;
        std::vector<double> r(c.log_m.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double k = c.blocks[i];
            const double factor = (1.0 - std::pow(k, e)) * k / (k - 1.0);
            r[i] = c.log_var[i] - e * c.log_m[i] - std::log(factor);
        }
        const double level = mean(r);
        double ss = 0.0;
        for (double v : r) ss += (v - level) * (v - level);
        return ss;
    };
    const auto best = boost::math::tools::brent_find_minima(residual, 0.005, 0.995, 40);
    return best.first;
}

double rescaled_range(std::span<const double> y) {
    const double mu = mean(y);
    double z = 0.0;
    double hi = 0.0;
    double lo = 0.0;
    double ss = 0.0;
    for (double v : y) {
        z += v - mu;
        hi = std::max(hi, z);
        lo = std::min(lo, z);
        ss += (v - mu) * (v - mu);
    }
    const double sd = std::sqrt(ss / static_cast<double>(y.size()));
    return sd > 0.0 ? (hi - lo) / sd : std::numeric_limits<double>::quiet_NaN();
}

// Anis-Lloyd expectation of R/S for n independent values, with the
// (n - 1/2) / n small-sample factor.
double expected_rs(std::size_t n) {
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) sum += std::sqrt((nd - i) / static_cast<double>(i));
    const double ratio = std::exp(std::lgamma(0.5 * (nd - 1.0)) - std::lgamma(0.5 * nd)) / std::sqrt(M_PI);
    return (nd - 0.5) / nd * ratio * sum;
}

double rs_estimate(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t w = 32; w <= n / 4; w *= 2) {
        double acc = 0.0;
        std::size_t used = 0;
        for (std::size_t b = 0; b + w <= n; b += w) {
            const double rs = rescaled_range(x.subspan(b, w));
            if (std::isfinite(rs)) {
                acc += rs;
                ++used;
            }
        }
        if (used == 0) continue;
        lx.push_back(std::log(static_cast<double>(w)));
        ly.push_back(std::log(acc / used) - std::log(expected_rs(w)));
    }
    if (lx.size() < 3) throw DomainError("hurst: too few window sizes");
    return 0.5 + linear_fit(lx, ly).slope;
}

}  // namespace

double hurst_point(std::span<const double> x, HurstMethod method) {
    if (x.size() < kMinHurstSamples) {
        throw DomainError("hurst: need at least " + std::to_string(kMinHurstSamples) + " samples, got " +
                          std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("hurst: non-finite sample");
    }
    return method == HurstMethod::VarianceTime ? variance_time(x) : rs_estimate(x);
}

EstimatorResult estimate_hurst(std::span<const double> x, HurstMethod method, RandomStream& rng,
                               int bootstrap_resamples) {
    EstimatorResult out;
    out.name = to_string(method);
    out.point_estimate = hurst_point(x, method);
    out.n_used = x.size();
    if (bootstrap_resamples < 2) return out;

    const std::size_t n = x.size();
    const std::size_t block = std::min(n, std::max<std::size_t>(64, n / 16));
    std::vector<double> boot;
    std::vector<double> resample(n);
    for (int b = 0; b < bootstrap_resamples; ++b) {
        std::size_t filled = 0;
        while (filled < n) {
            const std::size_t start = static_cast<std::size_t>(rng.next_u64() % (n - block + 1));
            const std::size_t take = std::min(block, n - filled);
            std::copy_n(x.begin() + start, take, resample.begin() + filled);
            filled += take;
        }
        boot.push_back(hurst_point(resample, method));
    }
    out.stderr_ = std::sqrt(variance(boot));
    out.ci_low = quantile(boot, 0.025);
    out.ci_high = quantile(boot, 0.975);
    return out;
}

// -- p-variation study ----------------------------------------------------------------------------

PathSource PathSource::fbm(double h) {
    PathSource s;
    s.kind = Kind::Fbm;
    s.hurst = HurstIndex(h);
    return s;
}

PathSource PathSource::of_levy(LevyModel m) {
    m.validate();
    PathSource s;
    s.kind = Kind::Levy;
    s.levy = std::move(m);
    return s;
}

SamplePath PathSource::sample(std::span<const double> grid, RandomStream& rng) const {
    return kind == Kind::Fbm ? sample_fbm(hurst, grid, rng) : sample_levy(levy, grid, rng);
}

Verdict PathSource::classify(double p) const {
    return kind == Kind::Fbm ? classify_p_variation_fbm(hurst, p) : classify_p_variation(levy, p);
}

PvariationStudy run_pvariation_study(const PathSource& source, const PvariationConfig& cfg,
                                     std::uint64_t base_seed) {
    if (cfg.p_grid.empty()) throw DomainError("pvariation: empty p grid");
    if (cfg.min_level < 1 || cfg.max_level < cfg.min_level + 2 || cfg.max_level > 20) {
        throw DomainError("pvariation: need 1 <= min_level, min_level + 2 <= max_level <= 20");
    }
    if (cfg.replications < 1) throw DomainError("pvariation: replications must be >= 1");
    std::vector<double> sorted_p = cfg.p_grid;
    std::sort(sorted_p.begin(), sorted_p.end());
    for (double p : sorted_p) {
        if (!(p > 0.0)) throw DomainError("pvariation: p must be > 0");
    }

    const int levels = cfg.max_level - cfg.min_level + 1;
    const std::size_t n_fine = std::size_t{1} << cfg.max_level;
    const std::vector<double> fine = uniform_grid(0.0, 1.0, 1.0 / static_cast<double>(n_fine));

    // estimates[p][level][rep]
    std::vector<std::vector<std::vector<double>>> estimates(
        sorted_p.size(), std::vector<std::vector<double>>(levels, std::vector<double>(cfg.replications)));
    for (int r = 0; r < cfg.replications; ++r) {
        RandomStream rng(base_seed, static_cast<std::uint64_t>(r));
        const SamplePath path = source.sample(fine, rng);
        for (int l = 0; l < levels; ++l) {
            const std::size_t n = std::size_t{1} << (cfg.min_level + l);
            SamplePath coarse;
            coarse.times = uniform_grid(0.0, 1.0, 1.0 / static_cast<double>(n));
            coarse.values.reserve(coarse.times.size());
            for (double t : coarse.times) coarse.values.push_back(path.at(t));
            for (std::size_t i = 0; i < sorted_p.size(); ++i) {
                estimates[i][l][r] = p_variation_estimate(coarse, sorted_p[i]);
            }
        }
    }

    PvariationStudy study;
    std::vector<double> log_n;
    for (int l = 0; l < levels; ++l) {
        study.levels.push_back(cfg.min_level + l);
        log_n.push_back((cfg.min_level + l) * std::log(2.0));
    }
    for (std::size_t i = 0; i < sorted_p.size(); ++i) {
        PvariationRow row;
        row.p = sorted_p[i];
        std::vector<double> log_med;
        for (int l = 0; l < levels; ++l) {
            row.medians.push_back(median(estimates[i][l]));
            log_med.push_back(std::log(std::max(row.medians.back(), std::numeric_limits<double>::min())));
        }
        row.growth_exponent = linear_fit(log_n, log_med).slope;
        row.stabilizes = row.growth_exponent < cfg.threshold;
        row.theory = source.classify(row.p);
        row.agrees = row.theory == Verdict::Unknown || (row.theory == Verdict::Finite) == row.stabilizes;
        study.rows.push_back(std::move(row));
    }

    study.transition = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i < study.rows.size(); ++i) {
        const auto& lo = study.rows[i - 1];
        const auto& hi = study.rows[i];
        if (lo.growth_exponent >= cfg.threshold && hi.growth_exponent < cfg.threshold) {
            const double w = (lo.growth_exponent - cfg.threshold) / (lo.growth_exponent - hi.growth_exponent);
            study.transition = lo.p + w * (hi.p - lo.p);
            break;
        }
    }
    return study;
}

}  // namespace gfou
