#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gfou/covariance.hpp"
#include "gfou/errors.hpp"
#include "gfou/pathint.hpp"
#include "gfou/process.hpp"
#include "gfou/stats.hpp"

using namespace gfou;

namespace {

SamplePath linear_path(const std::vector<double>& t, double slope) {
    SamplePath p{t, t, {}};
    for (auto& v : p.values) v *= slope;
    return p;
}

double sup_gap(const SamplePath& a, const SamplePath& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a.values[i] - b.values[i]));
    return g;
}

}  // namespace

TEST_CASE("GFOU reductions hold pathwise with shared noise") {
    RandomStream rng(1);
    const auto grid = uniform_grid(0.0, 2.0, 1.0 / 256.0);
    const auto b = sample_fbm(HurstIndex(0.7), grid, rng);

    const auto fou = fou_from_path(1.3, b, 0.4);
    const auto gf = gfou_from_paths(linear_path(grid, 1.3), b, 0.4);
    CHECK(sup_gap(fou, gf) < 1e-12);

    const auto zero = gfou_from_paths(linear_path(grid, 0.0), b, 0.4);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(zero.values[i] - (0.4 + b.values[i])) < 1e-12);

    // GOU with a Brownian eta is the same construction with H = 1/2.
    const auto w = sample_fbm(HurstIndex(0.5), grid, rng);
    CHECK(sup_gap(gfou_from_paths(linear_path(grid, 0.8), w, 0.0), fou_from_path(0.8, w, 0.0)) < 1e-12);
}

TEST_CASE("pull-out identity for the non-adapted integral") {
    RandomStream rng(2);
    const auto grid = uniform_grid(0.0, 1.0, 1.0 / 128.0);
    const auto xi = sample_levy(LevyModel::brownian(0.5, 1.0), grid, rng);
    const auto b = sample_fbm(HurstIndex(0.7), xi.times, rng);
    const auto y = gfou_from_paths(xi, b, 0.0);
    for (std::size_t k = 1; k < grid.size(); k += 17) {
        double direct = 0.0;
        for (std::size_t i = 1; i <= k; ++i) {
            direct += std::exp(-xi.values[k] + xi.values[i - 1]) * (b.values[i] - b.values[i - 1]);
        }
        CHECK(std::abs(y.values[k] - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("FOU with H = 1/2 has the Ornstein-Uhlenbeck variance") {
    const double lambda = 1.0;
    const auto grid = uniform_grid(0.0, 1.0, 1.0 / 256.0);
    RandomStream rng(3);
    std::vector<double> x;
    for (int i = 0; i < 20000; ++i) x.push_back(simulate_fou(lambda, HurstIndex(0.5), 0.0, grid, rng).values.back());
    const auto v = stats::batch_means_variance(x);
    CHECK(std::abs(v.value - (1.0 - std::exp(-2.0 * lambda)) / (2.0 * lambda)) < 3.0 * v.stderr_);
}

TEST_CASE("FOU magnitude does not grow with the mean-reversion rate") {
    const auto grid = uniform_grid(0.0, 1.0, 1.0 / 1024.0);
    std::vector<stats::Estimate> m;
    for (double lambda : {1.0, 10.0, 100.0}) {
        RandomStream rng(4);
        std::vector<double> x;
        for (int i = 0; i < 2000; ++i) x.push_back(std::abs(simulate_fou(lambda, HurstIndex(0.7), 0.0, grid, rng).values.back()));
        m.push_back(stats::mean_estimate(x));
    }
    for (std::size_t i = 1; i < m.size(); ++i) {
        CHECK(m[i].value <= m[i - 1].value + 3.0 * std::hypot(m[i].stderr_, m[i - 1].stderr_));
    }
}

TEST_CASE("GOU examples") {
    const auto grid = uniform_grid(0.0, 2.0, 1.0 / 128.0);
    RandomStream rng(5);
    const auto v = simulate_gou(LevyModel::pure_drift(0.7), LevyModel::pure_drift(0.0), InitialLaw::constant(2.0), grid, rng);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v.values[i] - 2.0 * std::exp(-0.7 * v.times[i])) < 1e-12);

    std::vector<double> x;
    for (int i = 0; i < 10000; ++i) {
        x.push_back(simulate_gou(LevyModel::pure_drift(1.0), LevyModel::brownian(0.0, 1.0), InitialLaw::stationary(),
                                 grid, rng)
                        .at(1.0));
    }
    const auto var = stats::batch_means_variance(x);
    CHECK(std::abs(var.value - 0.5) < 3.0 * var.stderr_);
}

TEST_CASE("stationary GOU autocovariance decays at rate theta1") {
    // Light-tailed xi so that sample covariances are well behaved.
    const auto xi = LevyModel::brownian(0.6, 0.3);
    const double theta1 = theta_constants(xi).theta1;
    const double step = 1.0 / 16.0;
    const auto grid = uniform_grid(0.0, 20.0, step);
    RandomStream rng(6);
    std::vector<SamplePath> paths;
    double sum = 0.0;
    long count = 0;
    for (int r = 0; r < 1000; ++r) {
        paths.push_back(simulate_gou(xi, LevyModel::brownian(0.0, 1.0), InitialLaw::stationary(), grid, rng));
        for (double v : paths.back().values) sum += v;
        count += static_cast<long>(paths.back().size());
    }
    const double mean = sum / static_cast<double>(count);
    std::vector<double> lag, logc;
    for (int s = 1; s <= 5; ++s) {
        const auto k = static_cast<std::size_t>(s / step);
        double acc = 0.0;
        long n = 0;
        for (const auto& p : paths) {
            for (std::size_t i = 0; i + k < p.size(); i += 4) {
                acc += (p.values[i] - mean) * (p.values[i + k] - mean);
                ++n;
            }
        }
        lag.push_back(s);
        logc.push_back(std::log(acc / static_cast<double>(n)));
    }
    const auto fit = stats::linear_fit(lag, logc);
    MESSAGE("fitted decay " << -fit.slope << " vs theta1 " << theta1);
    CHECK(-fit.slope == doctest::Approx(theta1).epsilon(0.15));
}

TEST_CASE("GFOU simulator: reductions and gates") {
    GfouSpec spec;
    spec.levy = LevyModel::pure_drift(0.0);
    spec.hurst = HurstIndex(0.7);
    spec.initial = InitialLaw::constant(0.3);
    spec.horizon = 1.0;
    spec.mesh = 1.0 / 64.0;
    RandomStream rng(7);
    const auto y = simulate_gfou(spec, rng);
    CHECK(y.values.front() == doctest::Approx(0.3));

    GfouSpec bad = spec;
    bad.levy = LevyModel::stable(1.8, 1.0, 1.0);
    bad.hurst = HurstIndex(0.4);
    CHECK_THROWS_AS(GfouSimulator{bad}, GateError);
    GfouSpec not_stationary = spec;
    not_stationary.levy = LevyModel::pure_drift(-1.0);
    not_stationary.initial = InitialLaw::stationary(5.0);
    CHECK_THROWS_AS(GfouSimulator{not_stationary}, GateError);

    GfouSpec short_window = spec;
    short_window.levy = LevyModel::brownian(1.5, 1.0);
    short_window.initial = InitialLaw::stationary(2.0);
    CHECK_FALSE(short_window.warnings().empty());
    short_window.initial = InitialLaw::stationary(20.0);
    CHECK(short_window.warnings().empty());
    CHECK(short_window.grid().front() == doctest::Approx(-20.0));
}

TEST_CASE("stationary GFOU variance and marginal stationarity") {
    // Light-tailed control: theta4 > 0, so sample variances have finite variance.
    GfouSpec spec;
    spec.levy = LevyModel::brownian(3.0, 0.5);
    spec.hurst = HurstIndex(0.7);
    spec.initial = InitialLaw::stationary(10.0);
    spec.horizon = 3.0;
    spec.mesh = 1.0 / 64.0;
    const GfouSimulator sim(spec);
    const auto theta = theta_constants(spec.levy);
    std::vector<double> y1, y3;
    for (int r = 0; r < 4000; ++r) {
        RandomStream rng(8, r);
        const auto p = sim.sample(rng);
        y1.push_back(p.at(1.0));
        y3.push_back(p.at(3.0));
    }
    const auto v = stats::batch_means_variance(y1);
    CHECK(std::abs(v.value - stationary_variance(theta, spec.hurst)) < 3.0 * v.stderr_);
    CHECK(stats::ks_two_sample(y1, y3).p_value > 0.01);
}

TEST_CASE("truncation error of the stationary integral") {
    const auto theta = ThetaConstants::from_values(1.0, 1.0);
    const HurstIndex h(0.7);
    double prev = INFINITY;
    for (double t : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        const double e = stationary_truncation_error(theta, h, t);
        CHECK(e < prev);
        prev = e;
    }
    for (double t : {2.0, 5.0}) {
        const double ratio = stationary_truncation_error(theta, h, 2.0 * t) / stationary_truncation_error(theta, h, t);
        const double expected = std::exp(-theta.theta2 * t);
        CHECK(ratio <= 2.0 * expected);
        CHECK(ratio >= 0.5 * expected);
    }
    CHECK(stationary_truncation_error(theta, h, 20.0) < 1e-6 * stationary_variance(theta, h));
}

TEST_CASE("W: closed form and Riemann-Stieltjes form") {
    const HurstIndex h(0.7);
    RandomStream rng(9);
    const auto fine = sample_fbm(h, uniform_grid(0.0, 1.0, 1.0 / 4096.0), rng);
    const auto w1 = w_from_path(fine, 1.0);
    for (double v : w1.closed.values) CHECK(v == 1.0);
    const double gap_fine = sup_gap(w1.rs, w1.closed);
    const double gap_coarse = sup_gap(w_from_path(subsample(fine, 64), 1.0).rs, w_from_path(subsample(fine, 64), 1.0).closed);
    CHECK(gap_fine < gap_coarse);
    CHECK(gap_fine < 0.1);

    const auto wd = w_from_path(fine, 2.0, 1.0);
    for (std::size_t i = 0; i < fine.size(); i += 97) {
        CHECK(std::abs((wd.drifted.values[i] - 1.0) - std::exp(-fine.times[i]) * (wd.closed.values[i] - 1.0)) < 1e-12);
    }

    std::vector<double> x;
    for (int i = 0; i < 100000; ++i) {
        x.push_back(simulate_w(h, InitialLaw::constant(2.0), 0.0, std::vector<double>{0.0, 1.0}, rng).closed.values.back());
    }
    const auto m = stats::batch_means_mean(x);
    CHECK(std::abs(m.value - (1.0 + std::exp(0.5))) < 3.0 * m.stderr_);
    CHECK_THROWS_AS(simulate_w(HurstIndex(0.5), InitialLaw::constant(2.0), 0.0, std::vector<double>{0.0, 1.0}, rng),
                    DomainError);
}

TEST_CASE("W: sup-norm gap shrinks at rate 2H - 1") {
    const HurstIndex h(0.7);
    std::vector<std::vector<double>> gaps(7);
    for (int r = 0; r < 20; ++r) {
        RefinableFbm b(h, 0.0, 1.0, 6, RandomStream(10, r));
        for (int k = 6; k <= 12; ++k) {
            const auto w = w_from_path(b.level(k), 2.0);
            gaps[k - 6].push_back(sup_gap(w.rs, w.closed));
        }
    }
    std::vector<double> lm, lg;
    for (int k = 6; k <= 12; ++k) {
        lm.push_back(-k * std::log(2.0));
        lg.push_back(std::log(stats::median(gaps[k - 6])));
    }
    const double rate = stats::linear_fit(lm, lg).slope;
    MESSAGE("W gap rate " << rate);
    CHECK(rate >= 2.0 * 0.7 - 1.0 - 0.15);
}

TEST_CASE("xi from U") {
    const auto grid = uniform_grid(0.0, 1.0, 0.25);
    SamplePath u{grid, {0.0, 0.3, -0.2, 0.5, 0.1}, {}};
    const auto xi0 = xi_from_u(u, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(xi0.values[i] == -u.values[i]);
    const auto xi1 = xi_from_u(u, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(xi1.values[i] == doctest::Approx(-u.values[i] + 0.5 * grid[i]));

    const double j = std::exp(-1.0) - 1.0;
    SamplePath uj{{0.0, 0.5, 1.0}, {0.0, j, j}, {0.0, j, 0.0}};
    const auto xij = xi_from_u(uj, 0.0);
    CHECK(xij.values[1] - xij.values[0] == doctest::Approx(1.0));
    CHECK(std::exp(-xij.jumps[1]) == doctest::Approx(1.0 + j));

    SamplePath bad{{0.0, 1.0}, {0.0, -1.5}, {0.0, -1.5}};
    CHECK_THROWS_AS(xi_from_u(bad, 0.0), DomainError);
}

TEST_CASE("Euler scheme exact cases") {
    RandomStream rng(11);
    const auto grid = uniform_grid(0.0, 1.0, 1.0 / 64.0);
    const auto b = sample_fbm(HurstIndex(0.7), grid, rng);
    const auto y = euler_from_paths(linear_path(grid, 0.0), b, 0.5);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(y.values[i] - (0.5 + b.values[i])) < 1e-12);

    const auto u = sample_levy(LevyModel::compound_poisson(5.0, JumpLaw::uniform(-0.5, 1.0)), grid, rng);
    const SamplePath zero{u.times, std::vector<double>(u.size(), 0.0), {}};
    const auto yj = euler_from_paths(u, zero, 0.5);
    double prod = 0.5;
    for (std::size_t i = 0; i < u.size(); ++i) {
        prod *= 1.0 + u.jumps[i];
        CHECK(yj.values[i] == doctest::Approx(prod).epsilon(1e-12));
    }

    SdeSpec bad;
    bad.u_model = LevyModel::compound_poisson(1.0, JumpLaw::uniform(-2.0, 1.0));
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.u_model = LevyModel::stable(1.5, 1.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Euler and closed form converge together under shared noise") {
    SdeSpec spec;
    spec.u_model = LevyModel::brownian(0.5, 0.8);
    spec.hurst = HurstIndex(0.7);
    spec.y0 = InitialLaw::constant(1.0);
    std::vector<std::vector<double>> gaps(7);
    for (int r = 0; r < 50; ++r) {
        RandomStream rng(12, r);
        const auto g = sde_shared_noise_gaps(spec, 6, 12, rng);
        for (std::size_t i = 0; i < g.size(); ++i) gaps[i].push_back(g[i].gap);
    }
    std::vector<double> lm, lg;
    for (int k = 6; k <= 12; ++k) {
        lm.push_back(-k * std::log(2.0));
        lg.push_back(std::log(stats::median(gaps[k - 6])));
    }
    const double rate = stats::linear_fit(lm, lg).slope;
    MESSAGE("Euler self-convergence rate " << rate);
    CHECK(rate >= 0.4);
}

TEST_CASE("Levy measure of xi induced by U") {
    const double alpha = 1.5, c2 = 0.8;
    LevyModel u = LevyModel::stable(alpha, 1.0, c2);
    const auto tails = levy_measure_xi_from_u(u);
    for (double x : {0.05, 0.5, 2.0}) {
        const double h = 1e-5 * x;
        const double density = (tails.upper(x - h) - tails.upper(x + h)) / (2.0 * h);
        const double expected = c2 * std::pow(1.0 - std::exp(-x), -1.0 - alpha) * std::exp(-x);
        CHECK(density == doctest::Approx(expected).epsilon(1e-5));
    }
    const double x = 1e-3;
    const double ratio = (tails.upper(x) + tails.lower(x)) / (u.tail_above(x) + u.tail_below(x));
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);

    const double rate = 2.0, j = 0.6;
    const auto cp = levy_measure_xi_from_u(LevyModel::compound_poisson(rate, JumpLaw::constant(j)));
    const double atom = std::log1p(j);
    CHECK(cp.lower(0.5 * atom) == doctest::Approx(rate));
    CHECK(cp.lower(1.5 * atom) == 0.0);
    CHECK(cp.upper(0.01) == 0.0);
}

TEST_CASE("small-jump integrals of U and xi converge together") {
    const auto st = LevyModel::stable(1.3, 1.0, 0.5);
    for (double delta : {1.5, 1.8}) {
        const auto v = small_jump_equivalence(st, delta);
        CHECK(v.u_integral_finite);
        CHECK(v.xi_integral_finite);
    }
    for (double delta : {0.5, 1.1}) {
        const auto v = small_jump_equivalence(st, delta);
        CHECK_FALSE(v.u_integral_finite);
        CHECK_FALSE(v.xi_integral_finite);
    }
    const auto cp = LevyModel::compound_poisson(3.0, JumpLaw::uniform(-0.5, 0.5));
    for (double delta : {0.1, 1.0, 1.9}) {
        const auto v = small_jump_equivalence(cp, delta);
        CHECK(v.u_integral_finite);
        CHECK(v.xi_integral_finite);
    }
}
