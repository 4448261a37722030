#include "gfou/pathint.hpp"

#include <algorithm>
#include <cmath>

#include "gfou/errors.hpp"
#include "gfou/specfun.hpp"

namespace gfou {

void Partition::validate() const {
    if (points.size() < 2) throw DomainError("partition needs at least one cell");
    validate_grid(points);
    if (intermediates.empty()) return;
    if (intermediates.size() != cells()) throw DomainError("partition: one intermediate point per cell");
    for (std::size_t i = 0; i < cells(); ++i) {
        if (intermediates[i] < points[i] || intermediates[i] > points[i + 1]) {
            throw DomainError("partition: intermediate point outside its cell");
        }
    }
}

double Partition::mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) m = std::max(m, points[i] - points[i - 1]);
    return m;
}

Partition Partition::tagged(std::vector<double> points, Tag tag, std::span<const double> grid) {
    Partition part;
    part.points = std::move(points);
    const std::size_t n = part.cells();
    part.intermediates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = part.points[i];
        const double hi = part.points[i + 1];
        switch (tag) {
            case Tag::Left: part.intermediates[i] = lo; break;
            case Tag::Right: part.intermediates[i] = hi; break;
            case Tag::Mid: {
                const double centre = 0.5 * (lo + hi);
                if (grid.empty()) {
                    part.intermediates[i] = centre;
                    break;
                }
                auto it = std::lower_bound(grid.begin(), grid.end(), centre);
                double best = lo;
                if (it != grid.end() && *it <= hi) best = *it;
                if (it != grid.begin() && *(it - 1) >= lo && std::abs(*(it - 1) - centre) < std::abs(best - centre)) {
                    best = *(it - 1);
                }
                part.intermediates[i] = best;
                break;
            }
        }
    }
    part.validate();
    return part;
}

namespace {

std::vector<std::size_t> indices_on(const SamplePath& path, std::span<const double> points) {
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        idx[i] = path.index_of(points[i]);
        if (idx[i] == SamplePath::npos) throw DomainError("partition point is not on the path grid");
    }
    return idx;
}

double sum_abs_pow(std::span<const double> x, double p) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += std::pow(std::abs(x[i] - x[i - 1]), p);
    return s;
}

// Greedy partition for p > 1: keep a stack of retained points; drop interior
// points that are not turning points, and drop an interior pair whenever
// jumping over it does not decrease the sum.
double greedy_extrema_sum(std::span<const double> x, double p) {
    std::vector<double> st;
    st.reserve(x.size());
    auto pw = [p](double d) { return std::pow(std::abs(d), p); };
    for (double v : x) {
        bool changed = true;
        while (changed) {
            changed = false;
            if (st.size() >= 2) {
                const double a = st[st.size() - 2];
                const double b = st.back();
                if ((b - a) * (v - b) >= 0.0) {
                    st.pop_back();
                    changed = true;
                    continue;
                }
            }
            if (st.size() >= 3) {
                const double a = st[st.size() - 3];
                const double b = st[st.size() - 2];
                const double c = st.back();
                if (pw(v - a) >= pw(b - a) + pw(c - b) + pw(v - c)) {
                    st.pop_back();
                    st.pop_back();
                    changed = true;
                }
            }
        }
        st.push_back(v);
    }
    return sum_abs_pow(st, p);
}

}  // namespace

double p_variation_sum(const SamplePath& path, double p, const Partition& partition) {
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    partition.validate();
    const std::vector<std::size_t> idx = indices_on(path, partition.points);
    double s = 0.0;
    for (std::size_t i = 1; i < idx.size(); ++i) s += std::pow(std::abs(path.values[idx[i]] - path.values[idx[i - 1]]), p);
    return s;
}

double p_variation_estimate(const SamplePath& path, double p, std::span<const Partition> extra) {
    if (!(p > 0.0)) throw DomainError("p must be > 0");
    if (path.size() < 2) throw DomainError("p_variation_estimate needs at least two points");
    const std::vector<double>& x = path.values;
    double best = 0.0;

    // Dyadic subsampling family of the grid, each level also run through the
    // greedy extrema pass, so the estimate never drops under dyadic refinement.
    std::vector<double> sub;
    for (std::size_t stride = 1; stride < x.size(); stride *= 2) {
        sub.clear();
        for (std::size_t i = 0; i < x.size(); i += stride) sub.push_back(x[i]);
        if ((x.size() - 1) % stride != 0) sub.push_back(x.back());
        best = std::max(best, sum_abs_pow(sub, p));
        // For p <= 1 refining never lowers the sum, so the level itself is
        // already its largest partition.
        if (p > 1.0) best = std::max(best, greedy_extrema_sum(sub, p));
    }
    for (const Partition& part : extra) best = std::max(best, p_variation_sum(path, p, part));
    return best;
}

double rs_integral(const SamplePath& f, const SamplePath& g, const Partition& partition) {
    partition.validate();
    const std::vector<std::size_t> gi = indices_on(g, partition.points);
    std::vector<std::size_t> fi;
    if (partition.intermediates.empty()) {
        fi = indices_on(f, std::span<const double>(partition.points).first(partition.cells()));
    } else {
        fi = indices_on(f, partition.intermediates);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < partition.cells(); ++i) {
        s += f.values[fi[i]] * (g.values[gi[i + 1]] - g.values[gi[i]]);
    }
    return s;
}

double rs_integral(const SamplePath& f, const SamplePath& g) {
    if (f.times != g.times) throw DomainError("rs_integral: integrand and integrator grids differ");
    if (f.size() < 2) return 0.0;
    const std::vector<double> c = rs_cumulative(f.values, g.values);
    return c.back();
}

std::vector<double> rs_cumulative(std::span<const double> f, std::span<const double> g) {
    if (f.size() != g.size()) throw DomainError("rs_cumulative: size mismatch");
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + f[i - 1] * (g[i] - g[i - 1]);
    return out;
}

IntegralEstimate rs_integral_refined(const std::function<const SamplePath&(int)>& g_level,
                                     const std::function<std::vector<double>(const SamplePath&)>& f_eval,
                                     int start_level, int max_level, double tol, Tag tag) {
    if (start_level < 0 || max_level < start_level) throw DomainError("rs_integral_refined: bad level range");
    if (!(tol > 0.0)) throw DomainError("rs_integral_refined: tol must be > 0");
    IntegralEstimate est;
    for (int k = start_level; k <= max_level; ++k) {
        const SamplePath& g = g_level(k);
        const std::vector<double> f = f_eval(g);
        if (f.size() != g.size()) throw DomainError("rs_integral_refined: integrand size differs from the grid");
        double v = 0.0;
        double mesh = 0.0;
        if (tag == Tag::Mid) {
            // Cells are pairs of grid cells tagged at their shared grid point.
            if (g.size() < 3 || (g.size() - 1) % 2 != 0) {
                throw DomainError("rs_integral_refined: midpoint tags need an even number of grid cells");
            }
            for (std::size_t i = 2; i < g.size(); i += 2) {
                v += f[i - 1] * (g.values[i] - g.values[i - 2]);
                mesh = std::max(mesh, g.times[i] - g.times[i - 2]);
            }
        } else {
            const std::size_t shift = tag == Tag::Right ? 1 : 0;
            for (std::size_t i = 1; i < g.size(); ++i) {
                v += f[i - 1 + shift] * (g.values[i] - g.values[i - 1]);
                mesh = std::max(mesh, g.times[i] - g.times[i - 1]);
            }
        }
        if (!est.refinement_trace.empty() && mesh >= est.refinement_trace.back().first) {
            throw DomainError("rs_integral_refined: levels must have decreasing mesh");
        }
        est.refinement_trace.emplace_back(mesh, v);
        est.value = v;
        est.mesh = mesh;
        const std::size_t n = est.refinement_trace.size();
        if (n >= 2 && std::abs(v - est.refinement_trace[n - 2].second) < tol) {
            est.converged = true;
            break;
        }
    }
    return est;
}

SamplePath subsample(const SamplePath& path, std::size_t stride) {
    if (stride == 0) throw DomainError("subsample: stride must be >= 1");
    SamplePath out;
    for (std::size_t i = 0; i < path.size(); i += stride) {
        out.times.push_back(path.times[i]);
        out.values.push_back(path.values[i]);
    }
    if ((path.size() - 1) % stride != 0) {
        out.times.push_back(path.times.back());
        out.values.push_back(path.values.back());
    }
    return out;
}

double young_constant(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw DomainError("young_constant: p, q must be > 0");
    const double s = 1.0 / p + 1.0 / q;
    if (!(s > 1.0)) throw DomainError("young_constant requires 1/p + 1/q > 1");
    return specfun::zeta(s).value;
}

double young_bound(double p, double q, double sup_f, double vp, double vq) {
    return young_constant(p, q) * sup_f * std::pow(vp, 1.0 / p) * std::pow(vq, 1.0 / q);
}

}  // namespace gfou
