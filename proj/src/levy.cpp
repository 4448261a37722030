#include "gfou/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gfou/errors.hpp"

namespace gfou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

// -- JumpLaw -------------------------------------------------------------------------

void JumpLaw::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("jump law parameters must be finite");
    switch (kind) {
        case Kind::Constant:
            if (a == 0.0) throw DomainError("constant jump size must be nonzero");
            break;
        case Kind::Uniform:
            if (!(a < b)) throw DomainError("uniform jump law needs lo < hi");
            break;
        case Kind::Normal:
            if (!(b > 0.0)) throw DomainError("normal jump law needs sd > 0");
            break;
        case Kind::Exponential:
            if (a == 0.0) throw DomainError("exponential jump scale must be nonzero");
            break;
    }
}

double JumpLaw::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::Constant: return a;
        case Kind::Uniform: return a + (b - a) * rng.uniform();
        case Kind::Normal: return a + b * rng.normal();
        case Kind::Exponential: return a * rng.exponential();
    }
    return 0.0;
}

double JumpLaw::laplace(double theta) const {
    if (theta == 0.0) return 1.0;
    switch (kind) {
        case Kind::Constant: return std::exp(-theta * a);
        case Kind::Uniform: return (std::exp(-theta * a) - std::exp(-theta * b)) / (theta * (b - a));
        case Kind::Normal: return std::exp(-theta * a + 0.5 * theta * theta * b * b);
        case Kind::Exponential: {
            const double d = 1.0 + theta * a;
            return d > 0.0 ? 1.0 / d : kInf;
        }
    }
    return kInf;
}

double JumpLaw::prob_above(double x) const {
    switch (kind) {
        case Kind::Constant: return a > x ? 1.0 : 0.0;
        case Kind::Uniform: return std::clamp((b - x) / (b - a), 0.0, 1.0);
        case Kind::Normal: return 0.5 * std::erfc((x - a) / (b * std::sqrt(2.0)));
        case Kind::Exponential:
            if (a > 0.0) return x < 0.0 ? 1.0 : std::exp(-x / a);
            return x >= 0.0 ? 0.0 : -std::expm1(-x / a);
    }
    return 0.0;
}

double JumpLaw::prob_below(double x) const {
    if (kind == Kind::Constant) return a < x ? 1.0 : 0.0;
    return 1.0 - prob_above(x);
}

double JumpLaw::support_min() const {
    switch (kind) {
        case Kind::Constant: return a;
        case Kind::Uniform: return a;
        case Kind::Normal: return -kInf;
        case Kind::Exponential: return a > 0.0 ? 0.0 : -kInf;
    }
    return -kInf;
}

// -- AlphaStable ------------------------------------------------------------------------

double AlphaStable::skewness() const { return (c1 - c2) / (c1 + c2); }

double AlphaStable::scale() const {
    if (alpha == 1.0) return (c1 + c2) * M_PI / 2.0;
    const double s_alpha = -(c1 + c2) * std::tgamma(-alpha) * std::cos(M_PI * alpha / 2.0);
    return std::pow(s_alpha, 1.0 / alpha);
}

// -- LevyModel ----------------------------------------------------------------------------

LevyModel LevyModel::pure_drift(double mu) {
    LevyModel m;
    m.drift = mu;
    return m;
}

LevyModel LevyModel::brownian(double mu, double sigma) {
    LevyModel m;
    m.drift = mu;
    m.gaussian_a = sigma * sigma;
    return m;
}

LevyModel LevyModel::compound_poisson(double rate, JumpLaw law, double drift, double gaussian_a) {
    LevyModel m;
    m.drift = drift;
    m.gaussian_a = gaussian_a;
    m.jumps.emplace_back(CompoundPoisson{rate, law});
    m.validate();
    return m;
}

LevyModel LevyModel::stable(double alpha, double c1, double c2, double drift) {
    LevyModel m;
    m.drift = drift;
    m.jumps.emplace_back(AlphaStable{alpha, c1, c2});
    m.validate();
    return m;
}

void LevyModel::validate() const {
    if (!(gaussian_a >= 0.0) || !std::isfinite(gaussian_a)) throw DomainError("gaussian_a must be >= 0");
    if (!std::isfinite(drift)) throw DomainError("drift must be finite");
    for (const auto& j : jumps) {
        std::visit(overloaded{
                       [](const CompoundPoisson& cp) {
                           if (!(cp.rate > 0.0) || !std::isfinite(cp.rate)) {
                               throw DomainError("compound Poisson rate must be > 0");
                           }
                           cp.law.validate();
                       },
                       [](const AlphaStable& st) {
                           if (!(st.alpha > 0.0 && st.alpha < 2.0)) throw DomainError("stable alpha must lie in (0, 2)");
                           if (!(st.c1 >= 0.0 && st.c2 >= 0.0) || !(st.c1 + st.c2 > 0.0)) {
                               throw DomainError("stable needs c1, c2 >= 0 with c1 + c2 > 0");
                           }
                           if (st.alpha == 1.0 && st.c1 != st.c2) {
                               throw DomainError("alpha = 1 stable is supported only in the symmetric case");
                           }
                       },
                   },
                   j);
    }
}

bool LevyModel::has_stable() const {
    return std::any_of(jumps.begin(), jumps.end(),
                       [](const JumpComponent& j) { return std::holds_alternative<AlphaStable>(j); });
}

bool LevyModel::has_compound_poisson() const {
    return std::any_of(jumps.begin(), jumps.end(),
                       [](const JumpComponent& j) { return std::holds_alternative<CompoundPoisson>(j); });
}

double LevyModel::jump_rate() const {
    double r = 0.0;
    for (const auto& j : jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) r += cp->rate;
    }
    return r;
}

double LevyModel::laplace_exponent(double theta) const {
    if (!(theta >= 0.0)) throw DomainError("laplace_exponent needs theta >= 0");
    if (theta == 0.0) return 0.0;
    double psi = -theta * drift + 0.5 * gaussian_a * theta * theta;
    for (const auto& j : jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) {
            const double l = cp->law.laplace(theta);
            if (!std::isfinite(l)) return kInf;
            psi += cp->rate * (l - 1.0);
        } else {
            const auto& st = std::get<AlphaStable>(j);
            // Negative jumps with a power tail have no exponential moment.
            if (st.c2 > 0.0) return kInf;
            psi += st.c1 * std::tgamma(-st.alpha) * std::pow(theta, st.alpha);
        }
    }
    return psi;
}

double LevyModel::tail_above(double x) const {
    double t = 0.0;
    for (const auto& j : jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) {
            t += cp->rate * cp->law.prob_above(x);
        } else {
            const auto& st = std::get<AlphaStable>(j);
            t += st.c1 * std::pow(x, -st.alpha) / st.alpha;
        }
    }
    return t;
}

double LevyModel::tail_below(double x) const {
    double t = 0.0;
    for (const auto& j : jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) {
            t += cp->rate * cp->law.prob_below(-x);
        } else {
            const auto& st = std::get<AlphaStable>(j);
            t += st.c2 * std::pow(x, -st.alpha) / st.alpha;
        }
    }
    return t;
}

double LevyModel::blumenthal_getoor_index() const {
    double beta = 0.0;
    for (const auto& j : jumps) {
        if (const auto* st = std::get_if<AlphaStable>(&j)) beta = std::max(beta, st->alpha);
    }
    return beta;
}

// -- sampling ----------------------------------------------------------------------------

namespace {

// Chambers-Mallows-Stuck draw from S_alpha(1, beta, 0), alpha != 1.
double cms_standard(double alpha, double beta, RandomStream& rng) {
    const double v = M_PI * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    const double t = beta * std::tan(M_PI * alpha / 2.0);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    return x;
}

double stable_increment(const AlphaStable& st, double dt, RandomStream& rng) {
    const double sigma = st.scale();
    if (st.alpha == 1.0) {
        const double v = M_PI * (rng.uniform() - 0.5);
        return sigma * dt * std::tan(v);
    }
    return sigma * std::pow(dt, 1.0 / st.alpha) * cms_standard(st.alpha, st.skewness(), rng);
}

}  // namespace

std::vector<JumpEvent> draw_jump_events(const LevyModel& model, double horizon, RandomStream& rng) {
    model.validate();
    std::vector<JumpEvent> events;
    if (!(horizon > 0.0)) return events;
    for (const auto& j : model.jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) {
            const std::uint64_t n = rng.poisson(cp->rate * horizon);
            if (n > kMaxLevyGridPoints) throw ResourceError("sample_levy: too many jumps");
            for (std::uint64_t k = 0; k < n; ++k) {
                const double t = horizon * rng.uniform();
                events.push_back({t, cp->law.sample(rng)});
            }
        }
    }
    std::sort(events.begin(), events.end(),
              [](const JumpEvent& x, const JumpEvent& y) { return x.time < y.time; });
    return events;
}

SamplePath sample_levy_given_jumps(const LevyModel& model, std::span<const double> times,
                                   std::span<const JumpEvent> events, RandomStream& rng) {
    model.validate();
    validate_grid(times);
    if (times.front() != 0.0) throw DomainError("sample_levy: grid must start at 0");
    if (times.size() > kMaxLevyGridPoints) throw ResourceError("sample_levy: grid exceeds 2^20 points");

    SamplePath path;
    path.times.reserve(times.size() + events.size());
    std::vector<double> jump_at;
    std::size_t i = 0;
    std::size_t e = 0;
    while (i < times.size() || e < events.size()) {
        const bool take_grid = e == events.size() || (i < times.size() && times[i] <= events[e].time);
        const double t = take_grid ? times[i] : events[e].time;
        const double size = take_grid ? 0.0 : events[e].size;
        if (take_grid) {
            ++i;
        } else {
            if (!(t > 0.0)) throw DomainError("sample_levy: jump times must be > 0");
            ++e;
        }
        if (!path.times.empty() && path.times.back() == t) {
            jump_at.back() += size;
        } else {
            path.times.push_back(t);
            jump_at.push_back(size);
        }
    }
    const std::size_t n = path.times.size();
    if (n > kMaxLevyGridPoints) throw ResourceError("sample_levy: grid with jumps exceeds 2^20 points");

    path.values.assign(n, 0.0);
    const double sd = std::sqrt(model.gaussian_a);
    double cont = 0.0;
    double jumps_sum = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double dt = path.times[k] - path.times[k - 1];
        if (sd > 0.0) cont += sd * std::sqrt(dt) * rng.normal();
        for (const auto& j : model.jumps) {
            if (const auto* st = std::get_if<AlphaStable>(&j)) cont += stable_increment(*st, dt, rng);
        }
        jumps_sum += jump_at[k];
        path.values[k] = model.drift * path.times[k] + cont + jumps_sum;
    }
    if (model.has_compound_poisson() || !events.empty()) path.jumps = std::move(jump_at);
    return path;
}

SamplePath sample_levy(const LevyModel& model, std::span<const double> times, RandomStream& rng) {
    validate_grid(times);
    const std::vector<JumpEvent> events = draw_jump_events(model, times.back(), rng);
    return sample_levy_given_jumps(model, times, events, rng);
}

SamplePath extend_two_sided(const SamplePath& pos_path, const SamplePath& neg_path) {
    pos_path.validate();
    neg_path.validate();
    if (pos_path.times.front() != 0.0 || neg_path.times.front() != 0.0) {
        throw DomainError("extend_two_sided: both copies must start at time 0");
    }
    if (pos_path.values.front() != 0.0 || neg_path.values.front() != 0.0) {
        throw DomainError("extend_two_sided: both copies must start at value 0");
    }
    const bool jumps = pos_path.has_jumps() || neg_path.has_jumps();
    SamplePath out;
    const std::size_t n = pos_path.size() + neg_path.size() - 1;
    out.times.reserve(n);
    out.values.reserve(n);
    for (std::size_t k = neg_path.size() - 1; k >= 1; --k) {
        out.times.push_back(-neg_path.times[k]);
        out.values.push_back(-neg_path.left_limit(k));
        // Moving forward through -u, xi jumps by the jump of the copy at u.
        if (jumps) out.jumps.push_back(neg_path.has_jumps() ? neg_path.jumps[k] : 0.0);
    }
    for (std::size_t k = 0; k < pos_path.size(); ++k) {
        out.times.push_back(pos_path.times[k]);
        out.values.push_back(pos_path.values[k]);
        if (jumps) out.jumps.push_back(pos_path.has_jumps() ? pos_path.jumps[k] : 0.0);
    }
    // The copy's jump at 0 has probability zero; the merged path is 0 there.
    if (jumps) {
        const std::size_t zero = neg_path.size() - 1;
        out.jumps[zero] = 0.0;
    }
    return out;
}

SamplePath sample_levy_two_sided(const LevyModel& model, std::span<const double> times, RandomStream& rng) {
    validate_grid(times);
    std::vector<double> pos{0.0};
    std::vector<double> neg{0.0};
    for (double t : times) {
        if (t > 0.0) pos.push_back(t);
        if (t < 0.0) neg.push_back(-t);
    }
    std::reverse(neg.begin() + 1, neg.end());
    SamplePath p = sample_levy(model, pos, rng);
    SamplePath q = sample_levy(model, neg, rng);
    return extend_two_sided(p, q);
}

// -- theta constants -----------------------------------------------------------------------

ThetaConstants ThetaConstants::from_values(double theta1, double theta2) {
    if (!std::isfinite(theta1) || !std::isfinite(theta2)) throw DomainError("theta constants must be finite");
    ThetaConstants t{theta1, theta2, theta2 > 0.0};
    if (t.valid_for_stationary && !(theta1 > 0.0)) {
        throw std::logic_error("theta2 > 0 must imply theta1 > 0 (convexity of the Laplace exponent)");
    }
    return t;
}

ThetaConstants theta_constants(const LevyModel& model) {
    model.validate();
    const double psi1 = model.laplace_exponent(1.0);
    const double psi2 = model.laplace_exponent(2.0);
    if (!std::isfinite(psi1) || !std::isfinite(psi2)) {
        throw DomainError("no finite exponential moment: E[exp(-k xi_1)] is infinite for k = 1 or 2");
    }
    return ThetaConstants::from_values(-psi1, -psi2);
}

// -- p-variation ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Finite: return "finite";
        case Verdict::Infinite: return "infinite";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

Verdict classify_p_variation(const LevyModel& model, double p) {
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    model.validate();
    if (model.gaussian_a > 0.0) return p >= 2.0 ? Verdict::Finite : Verdict::Infinite;
    if (p >= 2.0) return Verdict::Finite;

    auto stable_ok = [&](auto pred) {
        for (const auto& j : model.jumps) {
            if (const auto* st = std::get_if<AlphaStable>(&j); st && !pred(st->alpha)) return false;
        }
        return true;
    };

    if (p == 1.0) {
        // Bounded variation iff the jumps are absolutely summable.
        return stable_ok([](double a) { return a < 1.0; }) ? Verdict::Finite : Verdict::Infinite;
    }
    if (p > 1.0) {
        // Finite iff int (1 ^ |x|^p) nu(dx) < inf.
        return stable_ok([p](double a) { return p > a; }) ? Verdict::Finite : Verdict::Infinite;
    }

    // 0 < p < 1: a nonzero linear part already has infinite p-variation.
    if (model.drift != 0.0) return Verdict::Infinite;
    if (model.jumps.size() == 1 && model.has_stable()) {
        const double a = std::get<AlphaStable>(model.jumps.front()).alpha;
        return p > a ? Verdict::Finite : Verdict::Infinite;
    }
    const double beta = model.blumenthal_getoor_index();
    if (p > beta) return Verdict::Finite;
    if (p < beta) return Verdict::Infinite;
    return Verdict::Unknown;
}

Verdict classify_p_variation_fbm(const HurstIndex& h, double p) {
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    return p > 1.0 / h.value() ? Verdict::Finite : Verdict::Infinite;
}

// -- diagnostics and gates --------------------------------------------------------------

DriftCheck check_drift_to_infinity(const SamplePath& path, double delta) {
    if (!(delta > 0.0)) throw DomainError("delta must be > 0");
    path.validate();
    DriftCheck out;
    bool any = false;
    for (std::size_t k = path.size(); k-- > 0;) {
        const double t = path.times[k];
        if (t <= 0.0) break;
        if (!(path.values[k] > delta * t)) break;
        out.t0 = t;
        any = true;
    }
    out.holds = any;
    if (!any) out.t0 = 0.0;
    return out;
}

GateResult gfou_existence_gate(const LevyModel& model, const HurstIndex& h) {
    model.validate();
    const double p_max = 1.0 / (1.0 - h.value());
    std::vector<double> candidates;
    constexpr int kSteps = 2048;
    for (int k = 1; k < kSteps; ++k) candidates.push_back(p_max * k / kSteps);
    for (double p : {1.0, 2.0}) {
        if (p < p_max) candidates.push_back(p);
    }
    std::sort(candidates.begin(), candidates.end());

    GateResult r;
    for (double p : candidates) {
        if (classify_p_variation(model, p) == Verdict::Finite) {
            r.ok = true;
            r.witness_p = p;
            r.reason = "p = " + fmt(p) + " has finite p-variation and 1/p + H = " + fmt(1.0 / p + h.value()) + " > 1";
            return r;
        }
    }
    r.ok = false;
    r.reason = "existence gate failed: no p with finite p-variation satisfies 1/p + H > 1 (needs p < 1/(1-H) = " +
               fmt(p_max) + "; Blumenthal-Getoor index of xi = " + fmt(model.blumenthal_getoor_index()) +
               (model.gaussian_a > 0.0 ? ", xi has a Gaussian part so p >= 2" : "") + ")";
    return r;
}

GateResult gfou_stationarity_gate(const LevyModel& model, const HurstIndex& h) {
    GateResult r;
    if (!h.long_memory()) {
        r.reason = "stationarity gate failed: the stationary version requires H > 1/2, got H = " + fmt(h.value());
        return r;
    }
    ThetaConstants th;
    try {
        th = theta_constants(model);
    } catch (const DomainError& e) {
        r.reason = std::string("stationarity gate failed: ") + e.what();
        return r;
    }
    if (!th.valid_for_stationary) {
        r.reason = "stationarity gate failed: theta2 = -log E[exp(-2 xi_1)] must be > 0, got theta2 = " +
                   fmt(th.theta2);
        return r;
    }
    r.ok = true;
    r.reason = "theta1 = " + fmt(th.theta1) + ", theta2 = " + fmt(th.theta2) + " > 0";
    return r;
}

}  // namespace gfou
