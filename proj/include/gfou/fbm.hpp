#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gfou/random.hpp"

namespace gfou {

/// Hurst index H in (0, 1).
class HurstIndex {
public:
    explicit HurstIndex(double h);

    double value() const { return h_; }
    /// True when H > 1/2 (positively correlated increments).
    bool long_memory() const { return h_ > 0.5; }
    /// c_H = H(2H - 1); only defined for H > 1/2.
    std::optional<double> c_h() const;
    /// c_H, throwing DomainError when H <= 1/2.
    double require_c_h() const;

private:
    double h_;
};

/// A cadlag path on a finite grid.
///
/// values[i] is the path at times[i] (a right limit). `jumps`, when non-empty,
/// has one entry per grid point holding the jump at that time, so the left
/// limit at times[i] is values[i] - jumps[i].
struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> jumps;

    std::size_t size() const { return times.size(); }
    double left_limit(std::size_t i) const { return jumps.empty() ? values[i] : values[i] - jumps[i]; }
    bool has_jumps() const { return !jumps.empty(); }

    /// Throws DomainError unless sizes match, times strictly increase and all
    /// values are finite.
    void validate() const;
    /// Value at an exact grid time; throws if t is not on the grid.
    double at(double t) const;
    /// Index of an exact grid time, or npos.
    std::size_t index_of(double t) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Strictly increasing check shared by all grid consumers.
void validate_grid(std::span<const double> times);
/// Uniform grid a, a + step, ..., b (b included when it lies on the lattice).
std::vector<double> uniform_grid(double a, double b, double step);

// -- covariance ---------------------------------------------------------------

double fbm_cov(const HurstIndex& h, double t, double s);

/// Cov(B_b - B_a, B_d - B_c).
double fbm_increment_cov(const HurstIndex& h, double a, double b, double c, double d);

/// Gamma_w(s) = Cov(B_{t+w} - B_t, B_{t+s+w} - B_{t+s}) for 0 < w < s.
double increment_autocov(const HurstIndex& h, double lag_s, double width);

/// Partial sum with n_terms terms of the large-lag expansion
/// sum_n [w^{2n}/(2n)! prod_{k=0}^{2n-1}(2H-k)] s^{2H-2n}.
double increment_autocov_series(const HurstIndex& h, double lag_s, double width, int n_terms);

/// Autocovariance of fractional Gaussian noise with step `step` at integer lag k.
double fgn_autocov(const HurstIndex& h, double step, long k);

// -- sampling -------------------------------------------------------------------

inline constexpr std::size_t kMaxDenseGridPoints = std::size_t{1} << 14;

/// Exact sampler for B^H on a fixed grid (possibly two-sided, possibly
/// non-uniform). Construction does the expensive work once; sample() is
/// const and thread-safe given distinct streams.
///
/// Uniform grids use circulant embedding of the increment covariance. Uniform
/// grids with a few extra points use circulant embedding followed by exact
/// Gaussian conditioning. Anything else goes through a dense Cholesky factor
/// (capped at 2^14 points). Time 0 is added to the grid when absent, so
/// every path has B_0 = 0.
class FbmSampler {
public:
    enum class Method { Circulant, CirculantWithInsertions, Cholesky };

    FbmSampler(HurstIndex h, std::vector<double> times);
    ~FbmSampler();
    FbmSampler(FbmSampler&&) noexcept;
    FbmSampler& operator=(FbmSampler&&) noexcept;

    SamplePath sample(RandomStream& rng) const;
    Method method() const;
    const std::vector<double>& times() const;
    const HurstIndex& hurst() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SamplePath sample_fbm(const HurstIndex& h, std::span<const double> times, RandomStream& rng);

/// Draws n increments of fractional Gaussian noise with the given step by
/// circulant embedding.
std::vector<double> sample_fgn(const HurstIndex& h, std::size_t n, double step, RandomStream& rng);

// -- conditional refinement ------------------------------------------------------

/// Halves the mesh of an FBM path on a uniform grid containing 0 by drawing
/// every midpoint from its exact conditional law given all existing points.
SamplePath refine_midpoints(const HurstIndex& h, const SamplePath& path, RandomStream& rng);

/// Inserts extra times into an FBM path on a uniform grid containing 0, drawn
/// jointly from their exact conditional law given the existing points.
/// Times already on the grid are left as they are.
SamplePath insert_points(const HurstIndex& h, const SamplePath& path, std::span<const double> new_times,
                         RandomStream& rng);

/// A single FBM realization that can be viewed at dyadic refinement levels
/// of [a, b]; level k has 2^k cells. Finer levels are produced on demand by
/// refine_midpoints, so every level is a restriction of the finer ones.
class RefinableFbm {
public:
    RefinableFbm(HurstIndex h, double a, double b, int base_level, RandomStream rng);

    const SamplePath& level(int k);
    int base_level() const { return base_level_; }

private:
    HurstIndex h_;
    int base_level_;
    RandomStream rng_;
    std::map<int, SamplePath> levels_;
};

}  // namespace gfou
