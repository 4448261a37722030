#pragma once

#include <span>
#include <string>
#include <vector>

#include "gfou/fbm.hpp"
#include "gfou/levy.hpp"
#include "gfou/random.hpp"

namespace gfou {

struct EstimatorResult {
    std::string name;
    double point_estimate = 0.0;
    double stderr_ = 0.0;  // bootstrap standard deviation
    double ci_low = 0.0;   // 2.5% bootstrap quantile
    double ci_high = 0.0;  // 97.5% bootstrap quantile
    std::size_t n_used = 0;
};

enum class HurstMethod { VarianceTime, RescaledRange };

std::string to_string(HurstMethod m);

inline constexpr std::size_t kMinHurstSamples = 512;

/// Point estimate of H from an equispaced stationary sequence.
///
/// VarianceTime: block means at sizes m = 1, 2, 4, ... (at least 16 blocks);
/// log sample variance regressed on log m with the slope 2H - 2, fitted with
/// the exact finite-sample factor (1 - k^{2H-2}) k / (k - 1), k = n / m, of
/// fractional Gaussian noise.
/// RescaledRange: mean R/S over non-overlapping windows of sizes 32, 64, ...,
/// n / 4; H = 1/2 + slope of log(R/S) - log(E R/S under independence),
/// with the Anis-Lloyd expectation.
double hurst_point(std::span<const double> x, HurstMethod method);

/// hurst_point plus a moving block bootstrap (resamples of blocks of length
/// max(64, n / 16)).
EstimatorResult estimate_hurst(std::span<const double> x, HurstMethod method, RandomStream& rng,
                               int bootstrap_resamples = 50);

// -- p-variation transition study ---------------------------------------------------------------

/// What the study samples on [0, 1].
struct PathSource {
    enum class Kind { Fbm, Levy };
    Kind kind = Kind::Fbm;
    HurstIndex hurst{0.7};
    LevyModel levy;

    static PathSource fbm(double h);
    static PathSource of_levy(LevyModel m);

    SamplePath sample(std::span<const double> grid, RandomStream& rng) const;
    Verdict classify(double p) const;
};

struct PvariationConfig {
    std::vector<double> p_grid;
    int min_level = 8;   // coarsest grid has 2^min_level cells
    int max_level = 14;  // finest grid
    int replications = 20;
    /// p-variation counts as stabilizing when the median estimate grows
    /// slower than n^threshold across levels.
    double threshold = 0.05;
};

struct PvariationRow {
    double p = 0.0;
    std::vector<double> medians;  // one per level, coarse to fine
    double growth_exponent = 0.0;  // fitted slope of log median against log n
    bool stabilizes = false;
    Verdict theory = Verdict::Unknown;
    bool agrees = false;  // theory Unknown counts as agreement
};

struct PvariationStudy {
    std::vector<int> levels;
    std::vector<PvariationRow> rows;
    /// Interpolated p where the growth exponent crosses the threshold
    /// (NaN when it does not cross on the grid).
    double transition = 0.0;
};

/// Replication r draws from RandomStream(base_seed, r), so the result does
/// not depend on evaluation order.
PvariationStudy run_pvariation_study(const PathSource& source, const PvariationConfig& cfg,
                                     std::uint64_t base_seed);

}  // namespace gfou
