#pragma once

#include <functional>
#include <vector>

#include "gfou/fbm.hpp"
#include "gfou/levy.hpp"

namespace gfou {

using RealFunction = std::function<double(double)>;

/// <f, g> = c_H int_a^b int_a^b f(u) g(v) |u - v|^{2H-2} du dv for H > 1/2.
double lambda_h_inner(const RealFunction& f, const RealFunction& g, double a, double b, const HurstIndex& h);

/// Same with f supported on [a1, b1] and g on [a2, b2].
double lambda_h_inner(const RealFunction& f, double a1, double b1, const RealFunction& g, double a2, double b2,
                      const HurstIndex& h);

/// Var of the stationary GFOU: 2 c_H Gamma(2H-1) / (theta2 theta1^{2H-1}).
double stationary_variance(const ThetaConstants& theta, const HurstIndex& h);

/// Cov(Y_t, Y_{t+s}) of the stationary GFOU by direct two-dimensional
/// quadrature of the covariance double integral in the original time
/// coordinates (so t enters the computation).
double cov_oracle_quadrature(const ThetaConstants& theta, const HurstIndex& h, double s, double t = 0.0);

/// Closed form of Cov(Y_0, Y_s) with incomplete gamma and 1F1:
/// 2 c_H e^{-x} Gamma(2H-1) / (theta2 theta1^{2H-1})
///   + c_H e^{-x} [ s^{2H-1} 1F1(2H-1, 2H; x) / (2 theta1 (2H-1))
///                  - Gamma(2H-1) / (2 theta1^{2H})
///                  + e^{2x} Gamma(2H-1, x) / (2 theta1^{2H}) ],   x = theta1 s.
double cov_stationary_closed(const ThetaConstants& theta, const HurstIndex& h, double s);

/// The same four terms with the e^{-x} factor left off the last one. This
/// arrangement grows like e^{x}; kept to show that it disagrees with the
/// quadrature.
double cov_closed_without_tail_decay(const ThetaConstants& theta, const HurstIndex& h, double s);

struct SeriesEvaluation {
    double value = 0.0;
    int terms_used = 0;
    std::vector<double> term_magnitudes;  // |term_n| for every term computed
    /// True when the terms stopped decreasing before n_terms; the sum was
    /// then cut at its smallest term.
    bool diverging = false;
    double last_term = 0.0;
};

/// Series representation: the power/incomplete-gamma expansion of the 1F1
/// and Gamma(2H-1, x) part plus the two exponential terms.
SeriesEvaluation cov_series(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms);

/// Large-lag expansion H sum_{n=1}^N prod_{k=1}^{2n-1}(2H-k) theta1^{-2n} s^{2H-2n}.
double cov_stationary_asymptotic(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms);

struct AsymptoticValue {
    double value = 0.0;
    bool small_lag_warning = false;  // theta1 s < 5
};

/// Expansion of Cov(Y_t, Y_{t+s}) for an initial value independent of xi
/// and B^H: H sum_{n=1}^N prod_{k=1}^{2n-1}(2H-k) theta1^{-2n}
///   { s^{2H-2n} - e^{-theta1 t} (t+s)^{2H-2n} }.
AsymptoticValue cov_nonstationary_asymptotic(const ThetaConstants& theta, const HurstIndex& h, double t, double s,
                                             int n_max);

struct CovW {
    double cov = 0.0;
    double corr = 0.0;
    bool corr_defined = false;
};

/// Covariance and correlation of W_t = 1 + e^{-B_t}(X - 1) at (t, t+s) with
/// M1 = (E[X] - 1)^2, M2 = E[(X - 1)^2]; drift_a > 0 gives the drifted
/// process 1 + (X - 1) e^{-(B_t + a t)}.
CovW cov_w(const HurstIndex& h, double t, double s, double m1, double m2, double drift_a = 0.0);

struct CovarianceReport {
    double lag_s = 0.0;
    double analytic = 0.0;
    double series = 0.0;
    double oracle = 0.0;
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    bool has_mc = false;

    double tol_oracle = 1e-5;   // relative, analytic vs oracle
    double tol_series = 1e-6;   // relative, analytic vs series
    double mc_sigmas = 3.0;     // MC within this many standard errors

    bool analytic_vs_oracle = false;
    bool analytic_vs_series = false;
    bool mc_vs_analytic = false;
};

/// Fills the analytic, series (n_terms) and oracle columns and their flags.
CovarianceReport covariance_report(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms = 50,
                                   double tol_oracle = 1e-5, double tol_series = 1e-6);

/// Sets the MC columns and the MC agreement flag.
void attach_mc(CovarianceReport& report, double estimate, double stderr_);

}  // namespace gfou
