// Exact Gaussian conditioning of FBM on a uniform grid: midpoint refinement
// and insertion of arbitrary extra times.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "fbm_internal.hpp"
#include "gfou/errors.hpp"

namespace gfou {

namespace {

// Grid of `path` as a lattice that already contains 0.
detail::Lattice require_lattice(const SamplePath& path, const char* what) {
    path.validate();
    detail::Lattice lat;
    if (!detail::detect_lattice(path.times, lat) || lat.count != path.size()) {
        throw DomainError(std::string(what) + " needs a uniform grid that contains 0");
    }
    return lat;
}

std::vector<double> increments(const SamplePath& path) {
    std::vector<double> d(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) d[i] = path.values[i + 1] - path.values[i];
    return d;
}

detail::ToeplitzSolver fgn_solver(const HurstIndex& h, double step, std::size_t n) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = fgn_autocov(h, step, static_cast<long>(k));
    return detail::ToeplitzSolver(std::move(col));
}

}  // namespace

SamplePath refine_midpoints(const HurstIndex& h, const SamplePath& path, RandomStream& rng) {
    const detail::Lattice lat = require_lattice(path, "refine_midpoints");
    const std::size_t n = path.size() - 1;
    const double half = 0.5 * lat.step;

    // Unconditional fine draw, then correct it by kriging the residual of its
    // coarse increments against the observed ones.
    const std::vector<double> fine = detail::CirculantFgn(h, 2 * n, half).sample(rng);
    const std::vector<double> d = increments(path);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = d[i] - (fine[2 * i] + fine[2 * i + 1]);

    const detail::ToeplitzSolver solver = fgn_solver(h, lat.step, n);
    const std::vector<double> w = solver.solve(resid);

    // Cov(first half of cell i, cell j) depends on j - i only.
    auto g = [&](long m) {
        return fgn_autocov(h, half, 2 * m) + fgn_autocov(h, half, 2 * m + 1);
    };
    std::vector<double> col(n);
    std::vector<double> row(n);
    for (std::size_t k = 0; k < n; ++k) {
        col[k] = g(-static_cast<long>(k));
        row[k] = g(static_cast<long>(k));
    }
    const std::vector<double> correction = detail::ToeplitzOperator(std::move(col), std::move(row)).apply(w);

    SamplePath out;
    out.times.resize(2 * n + 1);
    out.values.resize(2 * n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.times[2 * i] = path.times[i];
        out.values[2 * i] = path.values[i];
        out.times[2 * i + 1] = static_cast<double>(2 * (lat.first_index + static_cast<long>(i)) + 1) * half;
        out.values[2 * i + 1] = path.values[i] + fine[2 * i] + correction[i];
    }
    out.times[2 * n] = path.times[n];
    out.values[2 * n] = path.values[n];
    return out;
}

SamplePath insert_points(const HurstIndex& h, const SamplePath& path, std::span<const double> new_times,
                         RandomStream& rng) {
    const detail::Lattice lat = require_lattice(path, "insert_points");
    std::vector<double> tau;
    for (double t : new_times) {
        if (!std::isfinite(t)) throw DomainError("insert_points: non-finite time");
        if (path.index_of(t) == SamplePath::npos) tau.push_back(t);
    }
    std::sort(tau.begin(), tau.end());
    tau.erase(std::unique(tau.begin(), tau.end()), tau.end());
    if (tau.empty()) return path;

    const std::size_t n = path.size() - 1;
    const std::size_t k = tau.size();
    const std::vector<double> d = increments(path);
    const detail::ToeplitzSolver solver = fgn_solver(h, lat.step, n);

    Eigen::MatrixXd c(n, k);
    Eigen::MatrixXd w(n, k);
    for (std::size_t a = 0; a < k; ++a) {
        std::vector<double> ca(n);
        for (std::size_t j = 0; j < n; ++j) ca[j] = fbm_increment_cov(h, 0.0, tau[a], path.times[j], path.times[j + 1]);
        const std::vector<double> wa = solver.solve(ca);
        for (std::size_t j = 0; j < n; ++j) {
            c(j, a) = ca[j];
            w(j, a) = wa[j];
        }
    }
    const Eigen::Map<const Eigen::VectorXd> dv(d.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd mean = w.transpose() * dv;
    Eigen::MatrixXd cov(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) cov(a, b) = fbm_cov(h, tau[a], tau[b]);
    }
    cov -= c.transpose() * w;
    cov = 0.5 * (cov + cov.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw FactorizationError("insert_points: conditional covariance");
    const double tol = -1e-9 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
    Eigen::VectorXd root = eig.eigenvalues();
    for (Eigen::Index i = 0; i < root.size(); ++i) {
        if (root[i] < tol) throw FactorizationError("insert_points: conditional covariance is not positive");
        root[i] = std::sqrt(std::max(root[i], 0.0));
    }
    Eigen::VectorXd z(k);
    for (std::size_t a = 0; a < k; ++a) z[static_cast<Eigen::Index>(a)] = rng.normal();
    const Eigen::VectorXd x = mean + eig.eigenvectors() * root.cwiseProduct(z);

    SamplePath out;
    out.times.reserve(path.size() + k);
    out.values.reserve(path.size() + k);
    std::size_t i = 0;
    std::size_t a = 0;
    while (i < path.size() || a < k) {
        if (a == k || (i < path.size() && path.times[i] < tau[a])) {
            out.times.push_back(path.times[i]);
            out.values.push_back(path.values[i]);
            ++i;
        } else {
            out.times.push_back(tau[a]);
            out.values.push_back(x[static_cast<Eigen::Index>(a)]);
            ++a;
        }
    }
    return out;
}

RefinableFbm::RefinableFbm(HurstIndex h, double a, double b, int base_level, RandomStream rng)
    : h_(h), base_level_(base_level), rng_(std::move(rng)) {
    if (base_level < 1 || base_level > 24) throw DomainError("RefinableFbm: base level must be in [1, 24]");
    if (!(b > a) || a > 0.0 || b < 0.0) throw DomainError("RefinableFbm: interval must contain 0");
    const std::size_t cells = std::size_t{1} << base_level;
    const double step = (b - a) / static_cast<double>(cells);
    std::vector<double> times(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) times[i] = a + static_cast<double>(i) * step;
    times.back() = b;
    const double q = a / step;
    if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, std::abs(q))) {
        throw DomainError("RefinableFbm: 0 must be a point of the base grid");
    }
    FbmSampler sampler(h_, times);
    if (sampler.method() != FbmSampler::Method::Circulant) {
        throw DomainError("RefinableFbm: base grid is not a uniform lattice through 0");
    }
    levels_.emplace(base_level, sampler.sample(rng_));
}

const SamplePath& RefinableFbm::level(int k) {
    if (k < 0) throw DomainError("RefinableFbm: negative level");
    if (auto it = levels_.find(k); it != levels_.end()) return it->second;
    if (k < base_level_) {
        const SamplePath& base = levels_.at(base_level_);
        const std::size_t stride = std::size_t{1} << (base_level_ - k);
        SamplePath coarse;
        for (std::size_t i = 0; i < base.size(); i += stride) {
            coarse.times.push_back(base.times[i]);
            coarse.values.push_back(base.values[i]);
        }
        return levels_.emplace(k, std::move(coarse)).first->second;
    }
    const SamplePath& finer_source = level(k - 1);
    SamplePath refined = refine_midpoints(h_, finer_source, rng_);
    return levels_.emplace(k, std::move(refined)).first->second;
}

}  // namespace gfou
