#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gfou/fbm.hpp"
#include "gfou/random.hpp"

namespace gfou {

/// Distribution of a single compound-Poisson jump.
struct JumpLaw {
    enum class Kind { Constant, Uniform, Normal, Exponential };

    Kind kind = Kind::Constant;
    // Constant: a = value. Uniform: [a, b]. Normal: mean a, sd b.
    // Exponential: a = signed scale (a < 0 gives negative jumps).
    double a = 0.0;
    double b = 0.0;

    static JumpLaw constant(double value) { return {Kind::Constant, value, 0.0}; }
    static JumpLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static JumpLaw normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
    static JumpLaw exponential(double scale) { return {Kind::Exponential, scale, 0.0}; }

    void validate() const;
    double sample(RandomStream& rng) const;
    /// E[exp(-theta J)]; +inf when it diverges.
    double laplace(double theta) const;
    /// P(J > x).
    double prob_above(double x) const;
    /// P(J < x).
    double prob_below(double x) const;
    /// Infimum of the support (may be -inf).
    double support_min() const;
};

struct CompoundPoisson {
    double rate = 1.0;
    JumpLaw law;
};

/// alpha-stable jumps with Levy density c1 x^{-1-alpha} on (0, inf) and
/// c2 |x|^{-1-alpha} on (-inf, 0). For alpha = 1 only c1 = c2 is supported.
struct AlphaStable {
    double alpha = 1.5;
    double c1 = 1.0;
    double c2 = 1.0;

    /// beta = (c1 - c2) / (c1 + c2)
    double skewness() const;
    /// Scale sigma of the unit-time marginal S_alpha(sigma, beta, 0).
    double scale() const;
};

using JumpComponent = std::variant<CompoundPoisson, AlphaStable>;

/// xi_t = drift * t + sqrt(gaussian_a) W_t + (independent jump components).
///
/// `drift` is the coefficient of t in this pathwise decomposition. Stable
/// components are strictly stable (no extra centering); for alpha > 1 they
/// have mean zero.
struct LevyModel {
    double gaussian_a = 0.0;
    double drift = 0.0;
    std::vector<JumpComponent> jumps;

    static LevyModel pure_drift(double mu);
    /// mu t + sigma W_t.
    static LevyModel brownian(double mu, double sigma);
    static LevyModel compound_poisson(double rate, JumpLaw law, double drift = 0.0, double gaussian_a = 0.0);
    static LevyModel stable(double alpha, double c1, double c2, double drift = 0.0);

    void validate() const;
    bool has_stable() const;
    bool has_compound_poisson() const;
    /// Sum of compound-Poisson rates.
    double jump_rate() const;

    /// psi(theta) = log E[exp(-theta xi_1)] for theta >= 0; +inf when the
    /// exponential moment does not exist.
    double laplace_exponent(double theta) const;

    /// nu((x, inf)) and nu((-inf, -x)) for x > 0.
    double tail_above(double x) const;
    double tail_below(double x) const;

    /// Blumenthal-Getoor index: 0 for compound Poisson, alpha for stable,
    /// the maximum over components.
    double blumenthal_getoor_index() const;
};

// -- sampling -------------------------------------------------------------------

inline constexpr std::size_t kMaxLevyGridPoints = std::size_t{1} << 20;

struct JumpEvent {
    double time = 0.0;
    double size = 0.0;
};

/// Compound-Poisson jump events of all components on (0, horizon], sorted.
std::vector<JumpEvent> draw_jump_events(const LevyModel& model, double horizon, RandomStream& rng);

/// Continuous and stable parts drawn on the grid `times` (starting at 0)
/// merged with the given jump events; event times are inserted into the grid.
SamplePath sample_levy_given_jumps(const LevyModel& model, std::span<const double> times,
                                   std::span<const JumpEvent> events, RandomStream& rng);

/// Sample on a grid starting at 0. Compound-Poisson jump times are inserted
/// into the grid, so the returned path may have more points than `times`;
/// every requested time is present. The path records jumps at grid points.
SamplePath sample_levy(const LevyModel& model, std::span<const double> times, RandomStream& rng);

/// Merges two independent one-sided draws into xi on [-T', T]:
/// xi_t = pos_t for t >= 0 and xi_t = -neg_{(-t)-} for t < 0.
SamplePath extend_two_sided(const SamplePath& pos_path, const SamplePath& neg_path);

/// Two-sided sample on a grid that may start below 0 (0 is added if absent).
SamplePath sample_levy_two_sided(const LevyModel& model, std::span<const double> times, RandomStream& rng);

// -- exponential moments ------------------------------------------------------------

struct ThetaConstants {
    double theta1 = 0.0;
    double theta2 = 0.0;
    bool valid_for_stationary = false;

    /// Builds from the two values, checking theta2 > 0 implies theta1 > 0.
    static ThetaConstants from_values(double theta1, double theta2);
};

/// theta_k = -psi(k). Throws DomainError ("no finite exponential moment")
/// when E[exp(-k xi_1)] is infinite.
ThetaConstants theta_constants(const LevyModel& model);

// -- p-variation ----------------------------------------------------------------------

enum class Verdict { Finite, Infinite, Unknown };

std::string to_string(Verdict v);

/// Almost-sure finiteness of the p-variation of a path of `model` on a
/// compact interval.
Verdict classify_p_variation(const LevyModel& model, double p);

/// Same for FBM: finite exactly when p > 1/H.
Verdict classify_p_variation_fbm(const HurstIndex& h, double p);

// -- diagnostics and gates ------------------------------------------------------------

struct DriftCheck {
    double t0 = 0.0;
    bool holds = false;
};

/// Smallest grid time t0 > 0 such that xi_t > delta t at every grid time
/// t >= t0.
DriftCheck check_drift_to_infinity(const SamplePath& path, double delta);

struct GateResult {
    bool ok = false;
    double witness_p = 0.0;
    std::string reason;
};

/// Pathwise existence of the integral of exp(xi_{s-}) against B^H: some p
/// with finite p-variation of xi must satisfy 1/p + H > 1.
GateResult gfou_existence_gate(const LevyModel& model, const HurstIndex& h);

/// L2 stationarity requirement theta2 > 0 (and H > 1/2).
GateResult gfou_stationarity_gate(const LevyModel& model, const HurstIndex& h);

}  // namespace gfou
