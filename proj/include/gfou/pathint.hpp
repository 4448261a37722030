#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "gfou/fbm.hpp"

namespace gfou {

/// Where the integrand is evaluated inside each partition cell.
enum class Tag { Left, Mid, Right };

/// Points s_0 < ... < s_n with optional per-cell intermediate points u_i in
/// [s_{i-1}, s_i]. Empty intermediates mean left endpoints.
struct Partition {
    std::vector<double> points;
    std::vector<double> intermediates;

    void validate() const;
    std::size_t cells() const { return points.empty() ? 0 : points.size() - 1; }
    double mesh() const;

    /// Partition on `points` tagged from `grid`: Left/Right use the cell
    /// endpoints, Mid uses the grid point closest to the cell centre.
    static Partition tagged(std::vector<double> points, Tag tag, std::span<const double> grid = {});
};

struct IntegralEstimate {
    double value = 0.0;
    double mesh = 0.0;
    std::vector<std::pair<double, double>> refinement_trace;  // (mesh, value)
    bool converged = false;
};

/// sum_i |X(s_i) - X(s_{i-1})|^p over the partition points (which must be on
/// the path grid).
double p_variation_sum(const SamplePath& path, double p, const Partition& partition);

/// Lower bound on the p-variation: the largest sum over the dyadic
/// subsampling family of the grid, a greedy local-extrema partition of every
/// dyadic level, and any partitions supplied in `extra`. Nondecreasing when
/// the path is refined dyadically.
double p_variation_estimate(const SamplePath& path, double p, std::span<const Partition> extra = {});

/// Riemann-Stieltjes sum sum_i f(u_i) [g(s_i) - g(s_{i-1})].
double rs_integral(const SamplePath& f, const SamplePath& g, const Partition& partition);

/// Left-point sum over the full common grid of f and g.
double rs_integral(const SamplePath& f, const SamplePath& g);

/// Running left-point sums: out[k] = sum_{i<=k} f[i-1] (g[i] - g[i-1]),
/// out[0] = 0.
std::vector<double> rs_cumulative(std::span<const double> f, std::span<const double> g);

/// Evaluates Riemann-Stieltjes sums along a sequence of nested dyadic grids,
/// doubling the resolution until two successive values differ by less than
/// tol or max_level is reached.
///
/// g_level(k) returns the integrator on the grid of level k (nested in k),
/// f_eval maps that path to integrand values on the same grid. Left and Right
/// tag the cells of the level-k grid by their endpoints; Mid uses the cells of
/// level k-1 tagged at their level-k midpoints.
IntegralEstimate rs_integral_refined(const std::function<const SamplePath&(int)>& g_level,
                                     const std::function<std::vector<double>(const SamplePath&)>& f_eval,
                                     int start_level, int max_level, double tol, Tag tag = Tag::Left);

/// Every stride-th point of a path (the last point is always kept).
SamplePath subsample(const SamplePath& path, std::size_t stride);

/// C_{p,q} = zeta(1/p + 1/q), requires 1/p + 1/q > 1.
double young_constant(double p, double q);

/// C_{p,q} * sup|f| * vp^{1/p} * vq^{1/q}.
double young_bound(double p, double q, double sup_f, double vp, double vq);

}  // namespace gfou
