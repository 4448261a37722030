#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gfou/fbm.hpp"
#include "gfou/levy.hpp"
#include "gfou/random.hpp"

namespace gfou {

/// Law of the initial value Y_0.
struct InitialLaw {
    enum class Kind { Constant, Normal, Stationary };

    Kind kind = Kind::Constant;
    double value = 0.0;    // constant value or normal mean
    double sd = 0.0;       // normal standard deviation
    double t_trunc = 0.0;  // stationary truncation horizon; 0 means 20 / theta2

    static InitialLaw constant(double v) { return {Kind::Constant, v, 0.0, 0.0}; }
    static InitialLaw normal(double mean, double sd) { return {Kind::Normal, mean, sd, 0.0}; }
    static InitialLaw stationary(double t_trunc = 0.0) { return {Kind::Stationary, 0.0, 0.0, t_trunc}; }

    /// Draws Y_0 for the Constant and Normal kinds.
    double draw(RandomStream& rng) const;
    double mean() const { return value; }
    double variance() const { return kind == Kind::Normal ? sd * sd : 0.0; }
};

/// Y_t = e^{-xi_t} (Y_0 + int_0^t e^{xi_{s-}} dB^H_s) on a uniform mesh.
struct GfouSpec {
    LevyModel levy;
    HurstIndex hurst{0.7};
    InitialLaw initial;
    double horizon = 1.0;
    double mesh = 1.0 / 256.0;

    /// Truncation horizon of the stationary initial value, rounded up to a
    /// multiple of the mesh (0 for the other kinds).
    double truncation() const;
    /// Base grid: uniform on [-truncation(), horizon].
    std::vector<double> grid() const;
    /// Runs the existence gate and, for stationary initial values, the
    /// stationarity gate; throws GateError with the gate's reason.
    void check_gates() const;
    /// Non-fatal diagnostics (tail of the truncated stationary integral).
    std::vector<std::string> warnings() const;
};

/// Driver U of dY = Y_- dU + dB^H. U must have no jumps <= -1.
struct SdeSpec {
    LevyModel u_model;
    HurstIndex hurst{0.7};
    InitialLaw y0;
    double horizon = 1.0;
    double mesh = 1.0 / 256.0;

    void validate() const;
};

// -- pathwise building blocks (shared noise) -----------------------------------------------

/// Y on the grid of xi and b (identical grids starting at 0):
/// Y_k = e^{-xi_k} (y0 + sum_{i<=k} e^{xi_{i-1}} (b_i - b_{i-1})).
SamplePath gfou_from_paths(const SamplePath& xi, const SamplePath& b, double y0);

/// Stationary version from two-sided paths on a grid [-T, horizon] containing
/// 0 with xi_0 = 0: Y_k = e^{-xi_k} sum over all cells left of t_k. Returns
/// the part with t >= 0.
SamplePath stationary_gfou_from_paths(const SamplePath& xi, const SamplePath& b);

/// X_t = e^{-lambda t}(x0 + sum e^{lambda s_{i-1}} (b_i - b_{i-1})).
SamplePath fou_from_path(double lambda, const SamplePath& b, double x0);

// -- simulators ------------------------------------------------------------------------------

SamplePath simulate_fou(double lambda, const HurstIndex& h, double x0, std::span<const double> grid,
                        RandomStream& rng);

/// V_t = e^{-xi_t}(V_0 + int e^{xi_{s-}} d eta_s) with jump times of both
/// drivers on the grid. A Stationary initial law starts the integral at
/// -t_trunc with two-sided drivers.
SamplePath simulate_gou(const LevyModel& xi, const LevyModel& eta, const InitialLaw& v0,
                        std::span<const double> grid, RandomStream& rng);

/// Reusable GFOU simulator: gates are checked and the FBM sampler for the
/// base grid is set up once; sample() is const and thread-safe given
/// distinct streams.
class GfouSimulator {
public:
    explicit GfouSimulator(GfouSpec spec);
    ~GfouSimulator();
    GfouSimulator(GfouSimulator&&) noexcept;

    /// Path of Y on [0, horizon] (jump times of xi included).
    SamplePath sample(RandomStream& rng) const;
    const GfouSpec& spec() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SamplePath simulate_gfou(const GfouSpec& spec, RandomStream& rng);

/// Squared L2 norm of the part of the stationary integral beyond -t_trunc,
/// 2 c_H int_{t_trunc}^inf int_0^inf e^{-theta2 a - theta1 x} x^{2H-2} dx da,
/// by quadrature.
double stationary_truncation_error(const ThetaConstants& theta, const HurstIndex& h, double t_trunc);

// -- W = 1 + e^{-B^H}(X - 1) --------------------------------------------------------------------

struct WPaths {
    SamplePath closed;   // 1 + e^{-B_t}(X - 1)
    SamplePath rs;       // e^{-B_t}(X + left sums of e^{B_u} dB_u)
    SamplePath drifted;  // 1 + (X - 1) e^{-(B_t + a t)}; empty when no drift given
};

/// Both forms from a given FBM path and X.
WPaths w_from_path(const SamplePath& b, double x, double drift_a = 0.0);

/// Requires H > 1/2. X is drawn from x_law; drift_a <= 0 skips the drifted path.
WPaths simulate_w(const HurstIndex& h, const InitialLaw& x_law, double drift_a, std::span<const double> grid,
                  RandomStream& rng);

// -- SDE dY = Y_- dU + dB^H ----------------------------------------------------------------------

/// xi_t = -U_t + (a/2) t - sum_{s<=t} (log(1 + dU_s) - dU_s) from a U path
/// with recorded jumps. Jumps <= -1 are rejected.
SamplePath xi_from_u(const SamplePath& u_path, double gaussian_a);

/// Left-point Euler scheme Y_{k+1} = Y_k + Y_k dU_k + dB_k on the common grid
/// of u and b.
SamplePath euler_from_paths(const SamplePath& u, const SamplePath& b, double y0);

SamplePath euler_sde(const SdeSpec& spec, RandomStream& rng);

struct SdeGap {
    double mesh = 0.0;
    double euler = 0.0;   // Euler value at the horizon
    double closed = 0.0;  // closed form e^{-xi}(y0 + sum e^{xi_-} dB) at the horizon
    double gap = 0.0;     // |euler - closed|
};

/// One draw of U, B^H and Y_0 on the lattice of mesh 2^{-max_level} plus the
/// jump times of U; for every level in [min_level, max_level] both schemes
/// are run on the lattice of mesh 2^{-level} plus the same jump times.
std::vector<SdeGap> sde_shared_noise_gaps(const SdeSpec& spec, int min_level, int max_level, RandomStream& rng);

struct TailPair {
    std::function<double(double)> upper;  // x -> nu_xi((x, inf))
    std::function<double(double)> lower;  // x -> nu_xi((-inf, -x))
};

/// Levy measure tails of xi induced by U through the Doleans-Dade relation.
TailPair levy_measure_xi_from_u(const LevyModel& u_model);

struct SmallJumpVerdicts {
    bool u_integral_finite = false;
    bool xi_integral_finite = false;
};

/// Finiteness of int_{|x|<1} |x|^delta nu(dx) for U (from the model) and for
/// xi (from the transformed tails, via their power-law rate at 0).
SmallJumpVerdicts small_jump_equivalence(const LevyModel& u_model, double delta);

}  // namespace gfou
