#include "gfou/process.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfou/errors.hpp"

namespace gfou {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void require_same_grid(const SamplePath& a, const SamplePath& b, const char* what) {
    a.validate();
    b.validate();
    if (a.times != b.times) throw DomainError(std::string(what) + ": paths must share one grid");
}

// Lattice k * mesh for k in [k_lo, k_hi].
std::vector<double> lattice(long k_lo, long k_hi, double mesh) {
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (long k = k_lo; k <= k_hi; ++k) t.push_back(static_cast<double>(k) * mesh);
    return t;
}

long cells_up_to(double x, double mesh) {
    const double q = x / mesh;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<long>(r);
    return static_cast<long>(std::ceil(q));
}

// FBM on `times` (a superset of the lattice `base` sampled by `sampler`).
SamplePath fbm_on(const HurstIndex& h, const FbmSampler& sampler, const std::vector<double>& times,
                  RandomStream& rng) {
    SamplePath base = sampler.sample(rng);
    if (times == base.times) return base;
    std::vector<double> extras;
    std::size_t j = 0;
    for (double t : times) {
        while (j < base.times.size() && base.times[j] < t) ++j;
        if (j == base.times.size() || base.times[j] != t) extras.push_back(t);
    }
    SamplePath full = insert_points(h, base, extras, rng);
    if (full.times.size() != times.size()) throw std::logic_error("fbm_on: grid mismatch after insertion");
    full.times = times;
    return full;
}

// Jump events of `other` inserted with zero size, so two drivers end up on
// one grid.
std::vector<JumpEvent> with_times_of(std::vector<JumpEvent> own, const std::vector<JumpEvent>& other) {
    for (const JumpEvent& e : other) own.push_back({e.time, 0.0});
    std::stable_sort(own.begin(), own.end(), [](const JumpEvent& x, const JumpEvent& y) { return x.time < y.time; });
    return own;
}

struct DriverPair {
    SamplePath first;
    SamplePath second;
};

// Independent drivers on one common grid that starts at 0.
DriverPair one_sided_pair(const LevyModel& a, const LevyModel& b, const std::vector<double>& grid,
                          RandomStream& rng) {
    const double horizon = grid.back();
    const std::vector<JumpEvent> ea = draw_jump_events(a, horizon, rng);
    const std::vector<JumpEvent> eb = draw_jump_events(b, horizon, rng);
    DriverPair out;
    out.first = sample_levy_given_jumps(a, grid, with_times_of(ea, eb), rng);
    out.second = sample_levy_given_jumps(b, grid, with_times_of(eb, ea), rng);
    return out;
}

}  // namespace

// -- specs -----------------------------------------------------------------------------------

double InitialLaw::draw(RandomStream& rng) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Normal: return value + sd * rng.normal();
        case Kind::Stationary: break;
    }
    throw DomainError("a stationary initial value is not drawn on its own");
}

double GfouSpec::truncation() const {
    if (initial.kind != InitialLaw::Kind::Stationary) return 0.0;
    double t = initial.t_trunc;
    if (!(t > 0.0)) {
        const ThetaConstants th = theta_constants(levy);
        if (!th.valid_for_stationary) throw GateError("stationary truncation needs theta2 > 0");
        t = 20.0 / th.theta2;
    }
    return static_cast<double>(cells_up_to(t, mesh)) * mesh;
}

std::vector<double> GfouSpec::grid() const {
    if (!(horizon > 0.0) || !(mesh > 0.0)) throw DomainError("GfouSpec: horizon and mesh must be > 0");
    const long lo = -cells_up_to(truncation(), mesh);
    const long hi = cells_up_to(horizon, mesh);
    return lattice(lo, hi, mesh);
}

void GfouSpec::check_gates() const {
    if (!(horizon > 0.0) || !(mesh > 0.0)) throw DomainError("GfouSpec: horizon and mesh must be > 0");
    levy.validate();
    const GateResult ex = gfou_existence_gate(levy, hurst);
    if (!ex.ok) throw GateError(ex.reason);
    if (initial.kind == InitialLaw::Kind::Stationary) {
        const GateResult st = gfou_stationarity_gate(levy, hurst);
        if (!st.ok) throw GateError(st.reason);
    }
}

std::vector<std::string> GfouSpec::warnings() const {
    std::vector<std::string> w;
    if (initial.kind != InitialLaw::Kind::Stationary) return w;
    const ThetaConstants th = theta_constants(levy);
    const double t = truncation();
    const double tail = std::exp(-th.theta1 * t);
    if (tail > 1e-3) {
        w.push_back("truncated stationary integral: exp(-theta1 * T) = " + fmt(tail) + " > 1e-3 at T = " + fmt(t));
    }
    return w;
}

void SdeSpec::validate() const {
    if (!(horizon > 0.0) || !(mesh > 0.0)) throw DomainError("SdeSpec: horizon and mesh must be > 0");
    if (y0.kind == InitialLaw::Kind::Stationary) throw DomainError("SdeSpec: y0 must be constant or normal");
    u_model.validate();
    for (const auto& j : u_model.jumps) {
        if (const auto* cp = std::get_if<CompoundPoisson>(&j)) {
            if (!(cp->law.support_min() > -1.0)) throw DomainError("SDE driver U must not jump by -1 or less");
        } else if (std::get<AlphaStable>(j).c2 > 0.0) {
            throw DomainError("SDE driver U: stable part must have no negative jumps (c2 = 0)");
        }
    }
}

// -- pathwise building blocks ----------------------------------------------------------------

namespace {

// e^{-xi_i} (y0 + sum_{k<i} e^{xi_k} (b_{k+1} - b_k)), evaluated as a
// recursion in the increments of xi so that long horizons do not overflow.
std::vector<double> discounted_sums(std::span<const double> xi, std::span<const double> b, double y0) {
    std::vector<double> y(xi.size());
    if (y.empty()) return y;
    y[0] = y0 * std::exp(-xi[0]);
    for (std::size_t i = 1; i < y.size(); ++i) y[i] = std::exp(xi[i - 1] - xi[i]) * (y[i - 1] + b[i] - b[i - 1]);
    return y;
}

}  // namespace

SamplePath gfou_from_paths(const SamplePath& xi, const SamplePath& b, double y0) {
    require_same_grid(xi, b, "gfou_from_paths");
    SamplePath y;
    y.times = xi.times;
    y.values = discounted_sums(xi.values, b.values, y0);
    return y;
}

SamplePath stationary_gfou_from_paths(const SamplePath& xi, const SamplePath& b) {
    require_same_grid(xi, b, "stationary_gfou_from_paths");
    const std::size_t origin = xi.index_of(0.0);
    if (origin == SamplePath::npos) throw DomainError("stationary_gfou_from_paths: grid must contain 0");
    const std::vector<double> all = discounted_sums(xi.values, b.values, 0.0);
    SamplePath y;
    y.times.assign(xi.times.begin() + static_cast<std::ptrdiff_t>(origin), xi.times.end());
    y.values.assign(all.begin() + static_cast<std::ptrdiff_t>(origin), all.end());
    return y;
}

SamplePath fou_from_path(double lambda, const SamplePath& b, double x0) {
    b.validate();
    std::vector<double> drift(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) drift[i] = lambda * b.times[i];
    SamplePath x;
    x.times = b.times;
    x.values = discounted_sums(drift, b.values, x0);
    return x;
}

// -- simulators ----------------------------------------------------------------------------------

SamplePath simulate_fou(double lambda, const HurstIndex& h, double x0, std::span<const double> grid,
                        RandomStream& rng) {
    if (!(lambda > 0.0)) throw DomainError("simulate_fou: lambda must be > 0");
    validate_grid(grid);
    if (grid.front() != 0.0) throw DomainError("simulate_fou: grid must start at 0");
    return fou_from_path(lambda, sample_fbm(h, grid, rng), x0);
}

SamplePath simulate_gou(const LevyModel& xi, const LevyModel& eta, const InitialLaw& v0,
                        std::span<const double> grid, RandomStream& rng) {
    validate_grid(grid);
    if (grid.front() != 0.0 || grid.size() < 2) throw DomainError("simulate_gou: grid must start at 0");
    const std::vector<double> pos(grid.begin(), grid.end());
    if (v0.kind != InitialLaw::Kind::Stationary) {
        const DriverPair d = one_sided_pair(xi, eta, pos, rng);
        return gfou_from_paths(d.first, d.second, v0.draw(rng));
    }

    const ThetaConstants th = theta_constants(xi);
    if (!th.valid_for_stationary) throw GateError("stationary GOU needs theta2 > 0");
    const double step = grid[1] - grid[0];
    const double t = v0.t_trunc > 0.0 ? v0.t_trunc : 20.0 / th.theta2;
    const std::vector<double> neg = lattice(0, cells_up_to(t, step), step);
    const DriverPair p = one_sided_pair(xi, eta, pos, rng);
    const DriverPair q = one_sided_pair(xi, eta, neg, rng);
    return stationary_gfou_from_paths(extend_two_sided(p.first, q.first), extend_two_sided(p.second, q.second));
}

struct GfouSimulator::Impl {
    GfouSpec spec;
    std::vector<double> grid;
    std::vector<double> pos_grid;
    std::unique_ptr<FbmSampler> fbm;
};

GfouSimulator::GfouSimulator(GfouSpec spec) : impl_(std::make_unique<Impl>()) {
    spec.check_gates();
    impl_->spec = std::move(spec);
    impl_->grid = impl_->spec.grid();
    for (double t : impl_->grid) {
        if (t >= 0.0) impl_->pos_grid.push_back(t);
    }
    impl_->fbm = std::make_unique<FbmSampler>(impl_->spec.hurst, impl_->grid);
}

GfouSimulator::~GfouSimulator() = default;
GfouSimulator::GfouSimulator(GfouSimulator&&) noexcept = default;

const GfouSpec& GfouSimulator::spec() const { return impl_->spec; }

SamplePath GfouSimulator::sample(RandomStream& rng) const {
    const Impl& m = *impl_;
    const bool stationary = m.spec.initial.kind == InitialLaw::Kind::Stationary;
    const SamplePath xi = stationary ? sample_levy_two_sided(m.spec.levy, m.grid, rng)
                                     : sample_levy(m.spec.levy, m.pos_grid, rng);
    const SamplePath b = fbm_on(m.spec.hurst, *m.fbm, xi.times, rng);
    if (stationary) return stationary_gfou_from_paths(xi, b);
    return gfou_from_paths(xi, b, m.spec.initial.draw(rng));
}

SamplePath simulate_gfou(const GfouSpec& spec, RandomStream& rng) { return GfouSimulator(spec).sample(rng); }

double stationary_truncation_error(const ThetaConstants& theta, const HurstIndex& h, double t_trunc) {
    if (!theta.valid_for_stationary || !(theta.theta1 > 0.0)) throw DomainError("truncation error needs theta1, theta2 > 0");
    if (!(t_trunc >= 0.0)) throw DomainError("truncation horizon must be >= 0");
    const double ch = h.require_c_h();
    const double e = 2.0 * h.value() - 2.0;
    boost::math::quadrature::exp_sinh<double> integrator;
    // Kernel over the neglected region: a = distance of u below 0 beyond
    // t_trunc, x = u - v >= 0.
    auto inner = [&](double) {
        return integrator.integrate([&](double x) { return std::exp(-theta.theta1 * x) * std::pow(x, e); }, 0.0,
                                    std::numeric_limits<double>::infinity(), 1e-12);
    };
    const double total = integrator.integrate(
        [&](double a) { return std::exp(-theta.theta2 * a) * inner(a); }, t_trunc,
        std::numeric_limits<double>::infinity(), 1e-12);
    return 2.0 * ch * total;
}

// -- W ---------------------------------------------------------------------------------------------

WPaths w_from_path(const SamplePath& b, double x, double drift_a) {
    b.validate();
    const std::size_t n = b.size();
    WPaths w;
    w.closed.times = b.times;
    w.rs.times = b.times;
    w.closed.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.closed.values[i] = 1.0 + (x - 1.0) * std::exp(-b.values[i]);
    w.rs.values = discounted_sums(b.values, b.values, x);
    if (drift_a > 0.0) {
        w.drifted.times = b.times;
        w.drifted.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            w.drifted.values[i] = 1.0 + (x - 1.0) * std::exp(-(b.values[i] + drift_a * b.times[i]));
        }
    }
    return w;
}

WPaths simulate_w(const HurstIndex& h, const InitialLaw& x_law, double drift_a, std::span<const double> grid,
                  RandomStream& rng) {
    if (!h.long_memory()) throw DomainError("simulate_w requires H > 1/2");
    validate_grid(grid);
    if (grid.front() != 0.0) throw DomainError("simulate_w: grid must start at 0");
    const SamplePath b = sample_fbm(h, grid, rng);
    return w_from_path(b, x_law.draw(rng), drift_a);
}

// -- SDE -------------------------------------------------------------------------------------------

SamplePath xi_from_u(const SamplePath& u_path, double gaussian_a) {
    u_path.validate();
    if (!(gaussian_a >= 0.0)) throw DomainError("xi_from_u: gaussian_a must be >= 0");
    SamplePath xi;
    xi.times = u_path.times;
    xi.values.resize(u_path.size());
    if (u_path.has_jumps()) xi.jumps.resize(u_path.size());
    double correction = 0.0;
    for (std::size_t i = 0; i < u_path.size(); ++i) {
        if (u_path.has_jumps()) {
            const double du = u_path.jumps[i];
            if (!(du > -1.0)) throw DomainError("xi_from_u: U has a jump <= -1");
            correction += std::log1p(du) - du;
            xi.jumps[i] = -std::log1p(du);
        }
        xi.values[i] = -u_path.values[i] + 0.5 * gaussian_a * u_path.times[i] - correction;
    }
    return xi;
}

SamplePath euler_from_paths(const SamplePath& u, const SamplePath& b, double y0) {
    require_same_grid(u, b, "euler_from_paths");
    SamplePath y;
    y.times = u.times;
    y.values.resize(u.size());
    y.values[0] = y0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        const double next = y.values[k] * (1.0 + (u.values[k + 1] - u.values[k])) + (b.values[k + 1] - b.values[k]);
        if (!(std::abs(next) <= 1e300)) throw OverflowError("euler_sde: |Y| exceeded 1e300");
        y.values[k + 1] = next;
    }
    return y;
}

SamplePath euler_sde(const SdeSpec& spec, RandomStream& rng) {
    spec.validate();
    const std::vector<double> grid = lattice(0, cells_up_to(spec.horizon, spec.mesh), spec.mesh);
    const SamplePath u = sample_levy(spec.u_model, grid, rng);
    const FbmSampler sampler(spec.hurst, grid);
    const SamplePath b = fbm_on(spec.hurst, sampler, u.times, rng);
    return euler_from_paths(u, b, spec.y0.draw(rng));
}

std::vector<SdeGap> sde_shared_noise_gaps(const SdeSpec& spec, int min_level, int max_level, RandomStream& rng) {
    spec.validate();
    if (min_level < 0 || max_level < min_level || max_level > 20) {
        throw DomainError("sde_shared_noise_gaps: need 0 <= min_level <= max_level <= 20");
    }
    const double fine = std::ldexp(1.0, -max_level);
    const SamplePath u = sample_levy(spec.u_model, lattice(0, cells_up_to(spec.horizon, fine), fine), rng);
    const FbmSampler sampler(spec.hurst, lattice(0, cells_up_to(spec.horizon, fine), fine));
    const SamplePath b = fbm_on(spec.hurst, sampler, u.times, rng);
    const double y0 = spec.y0.draw(rng);

    std::vector<SdeGap> out;
    for (int level = min_level; level <= max_level; ++level) {
        const double mesh = std::ldexp(1.0, -level);
        SamplePath us, bs;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double q = u.times[i] / mesh;
            const bool on_lattice = q == std::floor(q);
            const bool jump = u.has_jumps() && u.jumps[i] != 0.0;
            if (!on_lattice && !jump && i + 1 != u.size()) continue;
            us.times.push_back(u.times[i]);
            us.values.push_back(u.values[i]);
            if (u.has_jumps()) us.jumps.push_back(u.jumps[i]);
            bs.times.push_back(b.times[i]);
            bs.values.push_back(b.values[i]);
        }
        const SamplePath e = euler_from_paths(us, bs, y0);
        const SamplePath c = gfou_from_paths(xi_from_u(us, spec.u_model.gaussian_a), bs, y0);
        out.push_back({mesh, e.values.back(), c.values.back(), std::abs(e.values.back() - c.values.back())});
    }
    return out;
}

TailPair levy_measure_xi_from_u(const LevyModel& u_model) {
    u_model.validate();
    if (u_model.jumps.empty()) throw DomainError("levy_measure_xi_from_u: U has no jump measure");
    // Mass of nu_U on (-inf, -1] has no image under x -> -log(1 + x).
    const double below_minus_one = u_model.tail_below(1.0);
    TailPair t;
    t.upper = [u_model, below_minus_one](double x) {
        return std::max(0.0, u_model.tail_below(-std::expm1(-x)) - below_minus_one);
    };
    t.lower = [u_model](double x) { return u_model.tail_above(std::expm1(x)); };
    return t;
}

SmallJumpVerdicts small_jump_equivalence(const LevyModel& u_model, double delta) {
    if (!(delta > 0.0 && delta < 2.0)) throw DomainError("small_jump_equivalence: delta must lie in (0, 2)");
    SmallJumpVerdicts v;
    v.u_integral_finite = delta > u_model.blumenthal_getoor_index();

    const TailPair tails = levy_measure_xi_from_u(u_model);
    auto total = [&](double x) { return tails.upper(x) + tails.lower(x); };
    const double x1 = 1e-6;
    const double x2 = 1e-8;
    const double t1 = total(x1);
    const double t2 = total(x2);
    double rate = 0.0;
    if (t1 > 0.0 && t2 > 0.0) rate = std::log(t2 / t1) / std::log(x1 / x2);
    // int |x|^delta nu(dx) near 0 converges iff the tail grows slower than x^{-delta}.
    v.xi_integral_finite = delta > rate + 1e-4;
    return v;
}

}  // namespace gfou
