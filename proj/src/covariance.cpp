#include "gfou/covariance.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfou/errors.hpp"
#include "gfou/specfun.hpp"

namespace gfou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-12;

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

template <class F>
double gk(F f, double a, double b) {
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 15, kQuadTol, &err);
}

void require_theta(const ThetaConstants& theta) {
    if (!(theta.theta1 > 0.0) || !(theta.theta2 > 0.0)) throw DomainError("covariance needs theta1 > 0 and theta2 > 0");
}

// Both f and g on [a, b]. With x = |u - v| and y = x^{2H-1} the kernel
// x^{2H-2} dx becomes dy / (2H - 1), so the inner integrand is smooth.
double inner_same_support(const RealFunction& f, const RealFunction& g, double a, double b, const HurstIndex& h) {
    const double e = 2.0 * h.value() - 1.0;
    const double q = 1.0 / e;
    tanh_sinh<double> outer;
    const double total = outer.integrate(
        [&](double v) {
            const double len = b - v;
            if (len <= 0.0) return 0.0;
            const double fv = f(v);
            const double gv = g(v);
            return gk(
                [&](double y) {
                    const double u = std::min(b, v + std::pow(y, q));
                    return f(u) * gv + fv * g(u);
                },
                0.0, std::pow(len, e));
        },
        a, b, kQuadTol);
    // c_H / (2H - 1) = H.
    return h.value() * total;
}

// f on [a, b], g on [c, d] with b <= c.
double inner_apart(const RealFunction& f, double a, double b, const RealFunction& g, double c, double d,
                   const HurstIndex& h) {
    const double e = 2.0 * h.value() - 1.0;
    const double q = 1.0 / e;
    tanh_sinh<double> outer;
    const double total = outer.integrate(
        [&](double u) {
            const double lo = std::pow(std::max(c - u, 0.0), e);
            const double hi = std::pow(d - u, e);
            return f(u) * gk([&](double y) { return g(std::clamp(u + std::pow(y, q), c, d)); }, lo, hi);
        },
        a, b, kQuadTol);
    return h.value() * total;
}

std::vector<std::pair<double, double>> split(double lo, double hi, std::initializer_list<double> cuts) {
    std::vector<double> pts{lo, hi};
    for (double c : cuts) {
        if (c > lo && c < hi) pts.push_back(c);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i < pts.size(); ++i) out.emplace_back(pts[i - 1], pts[i]);
    return out;
}

double prod_2h_minus_k(double two_h, int k_from, int k_to) {
    double p = 1.0;
    for (int k = k_from; k <= k_to; ++k) p *= two_h - k;
    return p;
}

}  // namespace

double lambda_h_inner(const RealFunction& f, const RealFunction& g, double a, double b, const HurstIndex& h) {
    h.require_c_h();
    if (!(b > a)) throw DomainError("lambda_h_inner: need a < b");
    return inner_same_support(f, g, a, b, h);
}

double lambda_h_inner(const RealFunction& f, double a1, double b1, const RealFunction& g, double a2, double b2,
                      const HurstIndex& h) {
    h.require_c_h();
    if (!(b1 > a1) || !(b2 > a2)) throw DomainError("lambda_h_inner: empty support");
    double total = 0.0;
    for (auto [fa, fb] : split(a1, b1, {a2, b2})) {
        for (auto [ga, gb] : split(a2, b2, {a1, b1})) {
            if (fa == ga && fb == gb) {
                total += inner_same_support(f, g, fa, fb, h);
            } else if (fb <= ga) {
                total += inner_apart(f, fa, fb, g, ga, gb, h);
            } else {
                total += inner_apart(g, ga, gb, f, fa, fb, h);
            }
        }
    }
    return total;
}

double stationary_variance(const ThetaConstants& theta, const HurstIndex& h) {
    require_theta(theta);
    const double hv = h.value();
    h.require_c_h();
    // c_H Gamma(2H - 1) = H Gamma(2H) stays finite as H -> 1/2.
    return 2.0 * hv * specfun::gamma(2.0 * hv).value / (theta.theta2 * std::pow(theta.theta1, 2.0 * hv - 1.0));
}

double cov_oracle_quadrature(const ThetaConstants& theta, const HurstIndex& h, double s, double t) {
    require_theta(theta);
    const double ch = h.require_c_h();
    if (!(s >= 0.0) || !(t >= 0.0)) throw DomainError("cov_oracle_quadrature: s, t must be >= 0");
    const double th1 = theta.theta1;
    const double th2 = theta.theta2;
    const double e = 2.0 * h.value() - 1.0;
    const double q = 1.0 / e;
    exp_sinh<double> half_line;
    tanh_sinh<double> finite;

    // Both integration times below t: the later one, u, carries
    // e^{-theta2 (t - u)}, the gap x = u - v carries e^{-theta1 x}; the
    // factor 2 accounts for the mirror region v > u.
    const double region_a = half_line.integrate(
        [&](double u) {
            const double gap = half_line.integrate([&](double y) { return std::exp(-th1 * std::pow(y, q)); }, 0.0,
                                                   kInf, kQuadTol);
            return std::exp(-th2 * (t - u)) * gap / e;
        },
        -kInf, t, kQuadTol);
    const double a_part = 2.0 * ch * std::exp(-th1 * s) * region_a;

    // u below t, v in [t, t + s]: independent exponentials on [u, t] and
    // [v, t + s].
    double b_part = 0.0;
    if (s > 0.0) {
        const double region_b = finite.integrate(
            [&](double v) {
                const double y0 = std::pow(v - t, e);
                const double inner = half_line.integrate(
                    [&](double y) {
                        const double x = std::pow(y, q);  // x = v - u
                        return std::exp(-th1 * (t - v + x));
                    },
                    y0, kInf, kQuadTol);
                return std::exp(-th1 * (t + s - v)) * inner / e;
            },
            t, t + s, kQuadTol);
        b_part = ch * region_b;
    }
    return a_part + b_part;
}

namespace {

// H s^{2H-1} e^{-x} 1F1(2H-1, 2H; x) / (2 theta1), x = theta1 s.
double hyp_term(double hv, double th1, double s) {
    const double x = th1 * s;
    const double f = specfun::hyp1f1(1.0, 2.0 * hv, -x).value;  // = e^{-x} 1F1(2H-1, 2H; x)
    return hv * std::pow(s, 2.0 * hv - 1.0) * f / (2.0 * th1);
}

}  // namespace

double cov_stationary_closed(const ThetaConstants& theta, const HurstIndex& h, double s) {
    require_theta(theta);
    const double ch = h.require_c_h();
    if (!(s > 0.0)) throw DomainError("cov_stationary_closed: s must be > 0");
    const double hv = h.value();
    const double th1 = theta.theta1;
    const double x = th1 * s;
    if (x > 500.0) {
        // Every exponentially small term is below e^{-500}; only the power
        // expansion is left.
        return cov_stationary_asymptotic(theta, h, s, 64);
    }
    const double a = 2.0 * hv - 1.0;
    const double h_gamma = hv * specfun::gamma(2.0 * hv).value;  // c_H Gamma(2H-1)
    const double decay = std::exp(-x);
    const double term1 = 2.0 * h_gamma * decay / (theta.theta2 * std::pow(th1, a));
    const double term2 = -h_gamma * decay / (2.0 * std::pow(th1, 2.0 * hv));
    const double term3 = hyp_term(hv, th1, s);
    // e^{-x} e^{2x} Gamma(a, x) = x^{a-1} [e^x x^{1-a} Gamma(a, x)].
    const double term4 = ch * std::pow(x, a - 1.0) * specfun::gamma_upper_scaled(a, x).value /
                         (2.0 * std::pow(th1, 2.0 * hv));
    return term1 + term2 + term3 + term4;
}

double cov_closed_without_tail_decay(const ThetaConstants& theta, const HurstIndex& h, double s) {
    require_theta(theta);
    const double ch = h.require_c_h();
    if (!(s > 0.0)) throw DomainError("cov_closed_without_tail_decay: s must be > 0");
    const double hv = h.value();
    const double th1 = theta.theta1;
    const double x = th1 * s;
    const double a = 2.0 * hv - 1.0;
    const double h_gamma = hv * specfun::gamma(2.0 * hv).value;
    const double decay = std::exp(-x);
    const double term1 = 2.0 * h_gamma * decay / (theta.theta2 * std::pow(th1, a));
    const double term2 = -h_gamma * decay / (2.0 * std::pow(th1, 2.0 * hv));
    const double term3 = hyp_term(hv, th1, s);
    const double term4 = ch * std::exp(2.0 * x) * specfun::gamma_upper(a, x).value / (2.0 * std::pow(th1, 2.0 * hv));
    return term1 + term2 + term3 + term4;
}

SeriesEvaluation cov_series(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms) {
    require_theta(theta);
    const double ch = h.require_c_h();
    if (!(s > 0.0)) throw DomainError("cov_series: s must be > 0");
    if (n_terms < 1) throw DomainError("cov_series: n_terms must be >= 1");
    const double hv = h.value();
    const double two_h = 2.0 * hv;
    const double th1 = theta.theta1;
    const double x = th1 * s;
    const double h_gamma = hv * specfun::gamma(two_h).value;
    const double decay = std::exp(-x);

    SeriesEvaluation out;
    double sum = 0.0;
    double prod = 1.0;
    double pair = 0.0;
    double best_pair = kInf;
    for (int n = 0; n < n_terms; ++n) {
        prod *= two_h - (n + 1);
        const double inv_pow = std::pow(x, -(n + 1));
        const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^{-(n+1)}
        const double p = specfun::gamma_p(n + 1.0, x).value;  // gamma(n+1, x) / n!
        const double term = prod * (inv_pow - sign * inv_pow * p);
        out.term_magnitudes.push_back(std::abs(term));
        out.last_term = term;
        pair += term;
        // Even-index terms are nearly cancelled, so size is judged per pair.
        if (n % 2 == 1 || n + 1 == n_terms) {
            if (std::abs(pair) > best_pair) {
                out.diverging = true;
                break;
            }
            best_pair = std::abs(pair);
            sum += pair;
            out.terms_used = n + 1;
            pair = 0.0;
        }
    }
    const double series_part = ch * std::pow(s, two_h - 1.0) / (2.0 * th1 * (two_h - 1.0)) * sum;
    const double term1 = 2.0 * h_gamma * decay / (theta.theta2 * std::pow(th1, two_h - 1.0));
    const double term2 = -h_gamma * decay / (2.0 * std::pow(th1, two_h));
    out.value = term1 + term2 + series_part;
    return out;
}

double cov_stationary_asymptotic(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms) {
    require_theta(theta);
    if (!(s > 0.0)) throw DomainError("cov_stationary_asymptotic: s must be > 0");
    if (n_terms < 1) throw DomainError("cov_stationary_asymptotic: n_terms must be >= 1");
    const double two_h = 2.0 * h.value();
    double sum = 0.0;
    double prev = kInf;
    for (int n = 1; n <= n_terms; ++n) {
        const double term = prod_2h_minus_k(two_h, 1, 2 * n - 1) * std::pow(theta.theta1, -2.0 * n) *
                            std::pow(s, two_h - 2.0 * n);
        if (std::abs(term) > prev) break;  // optimal truncation of an asymptotic series
        prev = std::abs(term);
        sum += term;
    }
    return h.value() * sum;
}

AsymptoticValue cov_nonstationary_asymptotic(const ThetaConstants& theta, const HurstIndex& h, double t, double s,
                                             int n_max) {
    require_theta(theta);
    h.require_c_h();
    if (!(t >= 0.0) || !(s > 0.0)) throw DomainError("cov_nonstationary_asymptotic: need t >= 0, s > 0");
    if (n_max < 1) throw DomainError("cov_nonstationary_asymptotic: n_max must be >= 1");
    const double two_h = 2.0 * h.value();
    const double decay = std::exp(-theta.theta1 * t);
    double sum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double c = prod_2h_minus_k(two_h, 1, 2 * n - 1) * std::pow(theta.theta1, -2.0 * n);
        sum += c * (std::pow(s, two_h - 2.0 * n) - decay * std::pow(t + s, two_h - 2.0 * n));
    }
    return {h.value() * sum, theta.theta1 * s < 5.0};
}

CovW cov_w(const HurstIndex& h, double t, double s, double m1, double m2, double drift_a) {
    h.require_c_h();
    if (!(t >= 0.0) || !(s >= 0.0)) throw DomainError("cov_w: t, s must be >= 0");
    if (!(m1 >= 0.0) || !(m2 >= m1)) throw DomainError("cov_w: need m2 >= m1 >= 0");
    if (!(drift_a >= 0.0)) throw DomainError("cov_w: drift must be >= 0");
    const double e = 2.0 * h.value();
    const double a = std::pow(t, e);
    const double b = std::pow(t + s, e);
    const double c = std::pow(s, e);
    auto var_at = [&](double p) { return std::exp(p) * (m2 * std::exp(p) - m1); };
    double cov = std::exp(0.5 * (a + b)) * (m2 * std::exp(0.5 * (a + b - c)) - m1);
    double v1 = var_at(a);
    double v2 = var_at(b);
    if (drift_a > 0.0) {
        cov *= std::exp(-drift_a * (2.0 * t + s));
        v1 *= std::exp(-2.0 * drift_a * t);
        v2 *= std::exp(-2.0 * drift_a * (t + s));
    }
    CovW out;
    out.cov = cov;
    if (v1 > 0.0 && v2 > 0.0) {
        out.corr = cov / std::sqrt(v1 * v2);
        out.corr_defined = true;
    }
    return out;
}

CovarianceReport covariance_report(const ThetaConstants& theta, const HurstIndex& h, double s, int n_terms,
                                   double tol_oracle, double tol_series) {
    CovarianceReport r;
    r.lag_s = s;
    r.tol_oracle = tol_oracle;
    r.tol_series = tol_series;
    r.analytic = cov_stationary_closed(theta, h, s);
    r.series = cov_series(theta, h, s, n_terms).value;
    r.oracle = cov_oracle_quadrature(theta, h, s, 0.0);
    r.analytic_vs_oracle = std::abs(r.analytic - r.oracle) <= tol_oracle * std::abs(r.oracle);
    r.analytic_vs_series = std::abs(r.analytic - r.series) <= tol_series * std::abs(r.analytic);
    return r;
}

void attach_mc(CovarianceReport& report, double estimate, double stderr_) {
    if (!(stderr_ >= 0.0)) throw DomainError("attach_mc: standard error must be >= 0");
    report.mc_estimate = estimate;
    report.mc_stderr = stderr_;
    report.has_mc = true;
    report.mc_vs_analytic = std::abs(estimate - report.analytic) <= report.mc_sigmas * stderr_;
}

}  // namespace gfou
