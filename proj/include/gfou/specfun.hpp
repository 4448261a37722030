#pragma once

namespace gfou::specfun {

struct SpecialValue {
    double value = 0.0;
    double abs_error_estimate = 0.0;
};

/// Smallest shape parameter accepted by the gamma family. Shapes of the form
/// 2H-1 approach the pole at 0 as H -> 1/2; below this bound the inputs are
/// rejected instead of returning values with no significant digits.
inline constexpr double kMinShape = 1e-6;

/// Complete gamma function for a >= kMinShape.
SpecialValue gamma(double a);

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt.
/// Series below x = a + 1, continued fraction above.
SpecialValue gamma_upper(double a, double x);

/// Lower incomplete gamma gamma(a, x) = Gamma(a) - Gamma(a, x).
SpecialValue gamma_lower(double a, double x);

/// e^x x^{1-a} Gamma(a, x). Finite for every x > 0 and tends to 1 as x grows,
/// so products like e^{x} Gamma(a, x) can be formed without overflow.
SpecialValue gamma_upper_scaled(double a, double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
SpecialValue gamma_p(double a, double x);

/// Kummer's confluent hypergeometric function 1F1(a; b; x).
///
/// Picks the evaluation route without cancellation: the power series for
/// x >= 0, the Kummer transform e^x 1F1(b-a; b; -x) for x < 0.
SpecialValue hyp1f1(double a, double b, double x);

/// Power series of 1F1 at x, whatever the sign of x. Alternating series are
/// accumulated in extended precision.
SpecialValue hyp1f1_series(double a, double b, double x);

/// e^x * hyp1f1_series(b - a, b, -x).
SpecialValue hyp1f1_kummer(double a, double b, double x);

/// Riemann zeta for s > 1 (Euler-Maclaurin tail).
SpecialValue zeta(double s);

}  // namespace gfou::specfun
