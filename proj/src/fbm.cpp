#include "gfou/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fbm_internal.hpp"
#include "gfou/errors.hpp"

namespace gfou {

HurstIndex::HurstIndex(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("Hurst index must lie in (0, 1), got " + std::to_string(h));
}

std::optional<double> HurstIndex::c_h() const {
    if (!long_memory()) return std::nullopt;
    return h_ * (2.0 * h_ - 1.0);
}

double HurstIndex::require_c_h() const {
    if (!long_memory()) throw DomainError("c_H = H(2H-1) requires H > 1/2");
    return h_ * (2.0 * h_ - 1.0);
}

void validate_grid(std::span<const double> times) {
    if (times.empty()) throw DomainError("empty grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) throw DomainError("grid contains a non-finite time");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("grid times must be strictly increasing");
    }
}

void SamplePath::validate() const {
    if (values.size() != times.size()) throw DomainError("path: times and values differ in length");
    if (!jumps.empty() && jumps.size() != times.size()) throw DomainError("path: jumps and times differ in length");
    validate_grid(times);
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("path: non-finite value");
    }
}

std::size_t SamplePath::index_of(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    if (it != times.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - times.begin());
    if (it != times.begin() && std::abs(*(it - 1) - t) <= tol) return static_cast<std::size_t>(it - times.begin() - 1);
    return npos;
}

double SamplePath::at(double t) const {
    const std::size_t i = index_of(t);
    if (i == npos) throw DomainError("time " + std::to_string(t) + " is not on the path grid");
    return values[i];
}

std::vector<double> uniform_grid(double a, double b, double step) {
    if (!(step > 0.0) || !(b > a)) throw DomainError("uniform_grid: need a < b and step > 0");
    const double cells = (b - a) / step;
    auto n = static_cast<std::size_t>(std::floor(cells + 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = a + static_cast<double>(i) * step;
    if (std::abs(cells - static_cast<double>(n)) <= 1e-9 * std::max(1.0, cells)) t[n] = b;
    return t;
}

double fbm_cov(const HurstIndex& h, double t, double s) {
    const double e = 2.0 * h.value();
    return 0.5 * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) - std::pow(std::abs(t - s), e));
}

double fbm_increment_cov(const HurstIndex& h, double a, double b, double c, double d) {
    const double e = 2.0 * h.value();
    auto p = [e](double x) { return std::pow(std::abs(x), e); };
    return 0.5 * (p(b - c) + p(a - d) - p(a - c) - p(b - d));
}

namespace {

void check_lag(double lag_s, double width) {
    if (!(width > 0.0) || !(width < lag_s)) throw DomainError("increment_autocov requires 0 < width < lag");
}

double autocov_series_sum(double hv, double lag_s, double width, int n_terms) {
    const double e = 2.0 * hv;
    double sum = 0.0;
    double coef = 1.0;  // prod_{k<2n}(2H-k) / (2n)!
    const double ratio2 = (width / lag_s) * (width / lag_s);
    double pow_ratio = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
        const int k0 = 2 * n - 2;
        coef *= (e - k0) * (e - k0 - 1) / static_cast<double>((k0 + 1) * (k0 + 2));
        pow_ratio *= ratio2;
        sum += coef * pow_ratio;
    }
    return sum * std::pow(lag_s, e);
}

}  // namespace

double increment_autocov(const HurstIndex& h, double lag_s, double width) {
    check_lag(lag_s, width);
    if (lag_s > 64.0 * width) {
        // Direct evaluation cancels almost every digit at large lags; the
        // expansion converges like (width/lag)^{2n}.
        return autocov_series_sum(h.value(), lag_s, width, 8);
    }
    const double e = 2.0 * h.value();
    return 0.5 * (std::pow(lag_s + width, e) + std::pow(lag_s - width, e) - 2.0 * std::pow(lag_s, e));
}

double increment_autocov_series(const HurstIndex& h, double lag_s, double width, int n_terms) {
    check_lag(lag_s, width);
    if (n_terms < 1) throw DomainError("increment_autocov_series needs n_terms >= 1");
    return autocov_series_sum(h.value(), lag_s, width, n_terms);
}

double fgn_autocov(const HurstIndex& h, double step, long k) {
    const double scale = std::pow(step, 2.0 * h.value());
    k = std::labs(k);
    if (k == 0) return scale;
    if (k == 1) return scale * 0.5 * (std::pow(2.0, 2.0 * h.value()) - 2.0);
    return scale * increment_autocov(h, static_cast<double>(k), 1.0);
}

namespace detail {

bool detect_lattice(const std::vector<double>& times, Lattice& out) {
    if (times.size() < 2) return false;
    const double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(step > 0.0)) return false;
    const double first = times.front() / step;
    const double first_round = std::round(first);
    if (std::abs(first - first_round) > 1e-7 * std::max(1.0, std::abs(first))) return false;
    const auto first_index = static_cast<long>(first_round);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = static_cast<double>(first_index + static_cast<long>(i)) * step;
        if (std::abs(times[i] - expected) > 1e-9 * std::max(step, std::abs(expected))) return false;
    }
    const long last_index = first_index + static_cast<long>(times.size()) - 1;
    out.step = step;
    out.first_index = std::min(first_index, 0L);
    out.count = static_cast<std::size_t>(std::max(last_index, 0L) - out.first_index + 1);
    return true;
}

std::vector<double> sample_on_lattice(const HurstIndex&, const Lattice& lat, const CirculantFgn& fgn,
                                      RandomStream& rng) {
    const std::vector<double> inc = fgn.sample(rng);
    std::vector<double> b(lat.count);
    b[0] = 0.0;
    for (std::size_t i = 1; i < lat.count; ++i) b[i] = b[i - 1] + inc[i - 1];
    const double origin = b[static_cast<std::size_t>(-lat.first_index)];
    for (double& v : b) v -= origin;
    b[static_cast<std::size_t>(-lat.first_index)] = 0.0;
    return b;
}

}  // namespace detail

namespace {

// Picks the lattice made of the most common spacing, if nearly all points
// lie on it and the remaining points are few.
bool detect_lattice_with_extras(const std::vector<double>& times, detail::Lattice& lat,
                                std::vector<double>& lattice_times, std::vector<double>& extras) {
    if (times.size() < 3) return false;
    std::map<long long, std::size_t> spacing_count;
    double span = times.back() - times.front();
    for (std::size_t i = 1; i < times.size(); ++i) {
        const auto key = static_cast<long long>(std::llround((times[i] - times[i - 1]) / span * 1e12));
        ++spacing_count[key];
    }
    // The lattice step is the largest spacing that occurs often; extras split
    // lattice cells into smaller pieces.
    std::size_t best = 0;
    long long best_key = 0;
    for (auto [key, count] : spacing_count) {
        if (count > best) {
            best = count;
            best_key = key;
        }
    }
    const double step = static_cast<double>(best_key) / 1e12 * span;
    if (!(step > 0.0)) return false;
    lattice_times.clear();
    extras.clear();
    for (double t : times) {
        const double q = t / step;
        if (std::abs(q - std::round(q)) <= 1e-7 * std::max(1.0, std::abs(q))) {
            lattice_times.push_back(std::round(q) * step);
        } else {
            extras.push_back(t);
        }
    }
    if (extras.empty() || lattice_times.size() < 2) return false;
    if (extras.size() > std::max<std::size_t>(64, lattice_times.size() / 16)) return false;
    if (extras.front() < lattice_times.front() || extras.back() > lattice_times.back()) return false;
    // Lattice points must be consecutive.
    for (std::size_t i = 1; i < lattice_times.size(); ++i) {
        if (std::abs(lattice_times[i] - lattice_times[i - 1] - step) > 1e-7 * step) return false;
    }
    return detail::detect_lattice(lattice_times, lat);
}

}  // namespace

struct FbmSampler::Impl {
    HurstIndex h;
    std::vector<double> times;
    Method method = Method::Cholesky;

    // Circulant paths.
    detail::Lattice lattice;
    std::unique_ptr<detail::CirculantFgn> fgn;
    std::vector<std::size_t> pick;  // output index -> lattice index (Circulant)
    std::vector<double> extras;     // CirculantWithInsertions

    // Cholesky path: factor of the covariance over nonzero times.
    Eigen::MatrixXd factor;
    std::vector<std::size_t> nonzero;

    Impl(HurstIndex hh, std::vector<double> t) : h(hh), times(std::move(t)) {}
};

FbmSampler::FbmSampler(HurstIndex h, std::vector<double> times) : impl_(std::make_unique<Impl>(h, std::move(times))) {
    auto& m = *impl_;
    validate_grid(m.times);
    if (auto it = std::lower_bound(m.times.begin(), m.times.end(), 0.0); it == m.times.end() || *it != 0.0) {
        m.times.insert(it, 0.0);
    }

    detail::Lattice lat;
    std::vector<double> lattice_times;
    if (detail::detect_lattice(m.times, lat) && lat.count <= 4 * m.times.size() + 16) {
        m.method = Method::Circulant;
        m.lattice = lat;
        m.fgn = std::make_unique<detail::CirculantFgn>(h, lat.count - 1, lat.step);
        for (double t : m.times) {
            m.pick.push_back(static_cast<std::size_t>(std::llround(t / lat.step) - lat.first_index));
        }
        return;
    }
    if (detect_lattice_with_extras(m.times, lat, lattice_times, m.extras) &&
        lat.count <= 4 * lattice_times.size() + 16) {
        m.method = Method::CirculantWithInsertions;
        m.lattice = lat;
        m.fgn = std::make_unique<detail::CirculantFgn>(h, lat.count - 1, lat.step);
        return;
    }

    m.method = Method::Cholesky;
    for (std::size_t i = 0; i < m.times.size(); ++i) {
        if (m.times[i] != 0.0) m.nonzero.push_back(i);
    }
    const std::size_t n = m.nonzero.size();
    if (n > kMaxDenseGridPoints) {
        throw ResourceError("dense FBM sampling is capped at 2^14 grid points, got " + std::to_string(n));
    }
    if (n == 0) return;
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cov(i, j) = fbm_cov(h, m.times[m.nonzero[i]], m.times[m.nonzero[j]]);
            cov(j, i) = cov(i, j);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        const double jitter = 1e-12 * cov.diagonal().maxCoeff();
        cov.diagonal().array() += jitter;
        llt.compute(cov);
        if (llt.info() != Eigen::Success) {
            throw FactorizationError("FBM covariance matrix is not positive definite on this grid");
        }
    }
    m.factor = llt.matrixL();
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

FbmSampler::Method FbmSampler::method() const { return impl_->method; }
const std::vector<double>& FbmSampler::times() const { return impl_->times; }
const HurstIndex& FbmSampler::hurst() const { return impl_->h; }

SamplePath FbmSampler::sample(RandomStream& rng) const {
    const auto& m = *impl_;
    SamplePath path;
    path.times = m.times;
    path.values.assign(m.times.size(), 0.0);

    switch (m.method) {
        case Method::Circulant: {
            const std::vector<double> b = detail::sample_on_lattice(m.h, m.lattice, *m.fgn, rng);
            for (std::size_t i = 0; i < m.pick.size(); ++i) path.values[i] = b[m.pick[i]];
            return path;
        }
        case Method::CirculantWithInsertions: {
            SamplePath base;
            base.times.resize(m.lattice.count);
            for (std::size_t i = 0; i < m.lattice.count; ++i) base.times[i] = m.lattice.time(i);
            base.values = detail::sample_on_lattice(m.h, m.lattice, *m.fgn, rng);
            const SamplePath full = insert_points(m.h, base, m.extras, rng);
            for (std::size_t i = 0; i < m.times.size(); ++i) {
                const std::size_t j = full.index_of(m.times[i]);
                path.values[i] = full.values[j];
            }
            return path;
        }
        case Method::Cholesky: {
            const std::size_t n = m.nonzero.size();
            if (n == 0) return path;
            Eigen::VectorXd z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
            const Eigen::VectorXd x = m.factor.triangularView<Eigen::Lower>() * z;
            for (std::size_t i = 0; i < n; ++i) path.values[m.nonzero[i]] = x[i];
            return path;
        }
    }
    return path;
}

SamplePath sample_fbm(const HurstIndex& h, std::span<const double> times, RandomStream& rng) {
    return FbmSampler(h, std::vector<double>(times.begin(), times.end())).sample(rng);
}

}  // namespace gfou
