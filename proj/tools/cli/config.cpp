#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "gfou/csv.hpp"
#include "gfou/errors.hpp"

namespace gfou::cli {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects any key that was never asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(where(key) + ": missing");
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return number_at(key);
    }
    double number(const std::string& key) {
        raw(key);
        return number_at(key);
    }

    long integer(const std::string& key, long fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<long>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned()) throw ConfigError(where(key) + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key) {
        raw(key);
        return text(key, "");
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError(path_ + ": unknown key \"" + k + "\"");
        }
    }

private:
    double number_at(const std::string& key) {
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(where(key) + ": must be finite");
        return d;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

JumpLaw parse_law(const json& doc, const std::string& where) {
    Section s(doc, where);
    const std::string kind = s.text("kind");
    JumpLaw law;
    if (kind == "constant") {
        law = JumpLaw::constant(s.number("value"));
    } else if (kind == "uniform") {
        law = JumpLaw::uniform(s.number("low"), s.number("high"));
    } else if (kind == "normal") {
        law = JumpLaw::normal(s.number("mean"), s.number("sd"));
    } else if (kind == "exponential") {
        law = JumpLaw::exponential(s.number("scale"));
    } else {
        throw ConfigError(where + ".kind: unknown jump law \"" + kind + "\"");
    }
    s.finish();
    return law;
}

InitialLaw parse_initial(const json& doc, const std::string& where) {
    Section s(doc, where);
    const std::string kind = s.text("kind");
    InitialLaw law;
    if (kind == "constant") {
        law = InitialLaw::constant(s.number("value"));
    } else if (kind == "normal") {
        law = InitialLaw::normal(s.number("mean"), s.number("sd"));
        if (!(law.sd >= 0.0)) throw ConfigError(where + ".sd: must be >= 0");
    } else if (kind == "stationary") {
        law = InitialLaw::stationary(s.number("truncation", 0.0));
        if (!(law.t_trunc >= 0.0)) throw ConfigError(where + ".truncation: must be >= 0");
    } else {
        throw ConfigError(where + ".kind: unknown initial law \"" + kind + "\"");
    }
    s.finish();
    return law;
}

ProcessKind parse_kind(const std::string& k, const std::string& where) {
    if (k == "gfou") return ProcessKind::Gfou;
    if (k == "sde") return ProcessKind::Sde;
    if (k == "fou") return ProcessKind::Fou;
    if (k == "gou") return ProcessKind::Gou;
    if (k == "w") return ProcessKind::W;
    throw ConfigError(where + ": unknown process kind \"" + k + "\"");
}

ProcessConfig parse_process(const json& doc) {
    Section s(doc, "process");
    ProcessConfig p;
    p.kind = parse_kind(s.text("kind"), s.where("kind"));
    p.hurst = s.number("hurst", p.hurst);
    if (!(p.hurst > 0.0 && p.hurst < 1.0)) throw ConfigError("process.hurst: must lie in (0, 1)");
    p.horizon = s.number("horizon", p.horizon);
    if (!(p.horizon > 0.0)) throw ConfigError("process.horizon: must be > 0");
    p.mesh = s.number("mesh", p.mesh);
    if (!(p.mesh > 0.0) || p.mesh > p.horizon) throw ConfigError("process.mesh: must lie in (0, horizon]");
    if (s.has("initial")) p.initial = parse_initial(s.raw("initial"), "process.initial");

    switch (p.kind) {
        case ProcessKind::Gfou:
            p.xi = parse_levy(s.raw("xi"), "process.xi");
            break;
        case ProcessKind::Gou:
            p.xi = parse_levy(s.raw("xi"), "process.xi");
            p.eta = parse_levy(s.raw("eta"), "process.eta");
            break;
        case ProcessKind::Sde:
            p.u = parse_levy(s.raw("u"), "process.u");
            if (p.initial.kind == InitialLaw::Kind::Stationary) {
                throw ConfigError("process.initial: the SDE takes a constant or normal initial value");
            }
            break;
        case ProcessKind::Fou:
            p.lambda = s.number("lambda", p.lambda);
            if (!(p.lambda > 0.0)) throw ConfigError("process.lambda: must be > 0");
            if (p.initial.kind == InitialLaw::Kind::Stationary) {
                throw ConfigError("process.initial: FOU takes a constant or normal initial value");
            }
            break;
        case ProcessKind::W:
            p.drift_a = s.number("drift_a", 0.0);
            if (!(p.drift_a >= 0.0)) throw ConfigError("process.drift_a: must be >= 0");
            if (p.initial.kind == InitialLaw::Kind::Stationary) {
                throw ConfigError("process.initial: W takes a constant or normal X");
            }
            break;
    }
    s.finish();
    return p;
}

ValidateConfig parse_validate(const json& doc) {
    Section s(doc, "validate");
    ValidateConfig v;
    v.lags = s.numbers("lags", v.lags);
    for (double l : v.lags) {
        if (!(l > 0.0)) throw ConfigError("validate.lags: lags must be > 0");
    }
    v.series_terms = static_cast<int>(s.integer("series_terms", v.series_terms));
    if (v.series_terms < 1) throw ConfigError("validate.series_terms: must be >= 1");
    v.monte_carlo = s.boolean("monte_carlo", v.monte_carlo);
    v.mc_lags = s.numbers("mc_lags", {});
    if (s.has("theta_override")) {
        Section t(s.raw("theta_override"), "validate.theta_override");
        const double t1 = t.number("theta1");
        const double t2 = t.number("theta2");
        t.finish();
        if (!(t1 > 0.0 && t2 > 0.0)) throw ConfigError("validate.theta_override: theta1, theta2 must be > 0");
        v.theta_override = ThetaConstants::from_values(t1, t2);
    }
    v.tolerance_oracle = s.number("tolerance_oracle", v.tolerance_oracle);
    v.tolerance_series = s.number("tolerance_series", v.tolerance_series);
    v.mc_sigmas = s.number("mc_sigmas", v.mc_sigmas);
    if (!(v.tolerance_oracle > 0.0) || !(v.tolerance_series > 0.0) || !(v.mc_sigmas > 0.0)) {
        throw ConfigError("validate: tolerances must be > 0");
    }
    s.finish();
    return v;
}

HurstConfig parse_hurst(const json& doc) {
    Section s(doc, "hurst");
    HurstConfig h;
    const std::string src = s.text("source", "fgn");
    if (src == "process") {
        h.source = HurstConfig::Source::Process;
    } else if (src == "fgn") {
        h.source = HurstConfig::Source::Fgn;
    } else if (src == "iid") {
        h.source = HurstConfig::Source::Iid;
    } else {
        throw ConfigError("hurst.source: expected process, fgn or iid");
    }
    if (s.has("methods")) {
        h.methods.clear();
        const json& m = s.raw("methods");
        if (!m.is_array() || m.empty()) throw ConfigError("hurst.methods: expected a non-empty array");
        for (const json& e : m) {
            if (!e.is_string()) throw ConfigError("hurst.methods: expected strings");
            const auto name = e.get<std::string>();
            if (name != "variance-time" && name != "rescaled-range") {
                throw ConfigError("hurst.methods: unknown method \"" + name + "\"");
            }
            h.methods.push_back(name);
        }
    }
    const long n = s.integer("n", static_cast<long>(h.n));
    if (n < 512) throw ConfigError("hurst.n: need at least 512 samples");
    h.n = static_cast<std::size_t>(n);
    h.spacing = s.number("spacing", h.spacing);
    if (!(h.spacing > 0.0)) throw ConfigError("hurst.spacing: must be > 0");
    h.bootstrap = static_cast<int>(s.integer("bootstrap", h.bootstrap));
    if (h.bootstrap < 0) throw ConfigError("hurst.bootstrap: must be >= 0");
    s.finish();
    return h;
}

PvariationSettings parse_pvariation(const json& doc) {
    Section s(doc, "pvariation");
    PvariationSettings p;
    const std::string src = s.text("source", "fbm");
    if (src == "fbm") {
        p.source = PvariationSettings::Source::Fbm;
        p.hurst = s.number("hurst", p.hurst);
        if (!(p.hurst > 0.0 && p.hurst < 1.0)) throw ConfigError("pvariation.hurst: must lie in (0, 1)");
    } else if (src == "levy") {
        p.source = PvariationSettings::Source::Levy;
        p.levy = parse_levy(s.raw("levy"), "pvariation.levy");
    } else {
        throw ConfigError("pvariation.source: expected fbm or levy");
    }
    if (s.has("p_grid")) {
        const json& g = s.raw("p_grid");
        if (g.is_array()) {
            p.p_grid = s.numbers("p_grid", {});
        } else {
            Section r(g, "pvariation.p_grid");
            const double from = r.number("from");
            const double to = r.number("to");
            const double step = r.number("step");
            r.finish();
            if (!(from > 0.0) || !(to >= from) || !(step > 0.0)) {
                throw ConfigError("pvariation.p_grid: need 0 < from <= to and step > 0");
            }
            const long count = std::lround(std::floor((to - from) / step + 1e-9));
            for (long i = 0; i <= count; ++i) p.p_grid.push_back(from + static_cast<double>(i) * step);
        }
    } else {
        for (int i = 0; i <= 24; ++i) p.p_grid.push_back(0.8 + 0.05 * i);
    }
    for (double v : p.p_grid) {
        if (!(v > 0.0)) throw ConfigError("pvariation.p_grid: values must be > 0");
    }
    if (p.p_grid.empty()) throw ConfigError("pvariation.p_grid: empty");
    p.min_level = static_cast<int>(s.integer("min_level", p.min_level));
    p.max_level = static_cast<int>(s.integer("max_level", p.max_level));
    if (p.min_level < 1 || p.max_level < p.min_level + 2 || p.max_level > 20) {
        throw ConfigError("pvariation: need 1 <= min_level and min_level + 2 <= max_level <= 20");
    }
    p.threshold = s.number("threshold", p.threshold);
    s.finish();
    return p;
}

}  // namespace

LevyModel parse_levy(const json& doc, const std::string& where) {
    Section s(doc, where);
    LevyModel m;
    m.gaussian_a = s.number("gaussian", 0.0);
    m.drift = s.number("drift", 0.0);
    if (s.has("jumps")) {
        const json& arr = s.raw("jumps");
        if (!arr.is_array()) throw ConfigError(where + ".jumps: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = where + ".jumps[" + std::to_string(i) + "]";
            Section j(arr[i], at);
            const std::string type = j.text("type");
            if (type == "compound_poisson") {
                CompoundPoisson cp;
                cp.rate = j.number("rate");
                cp.law = parse_law(j.raw("law"), at + ".law");
                m.jumps.emplace_back(cp);
            } else if (type == "stable") {
                AlphaStable st;
                st.alpha = j.number("alpha");
                st.c1 = j.number("c1", 1.0);
                st.c2 = j.number("c2", 1.0);
                m.jumps.emplace_back(st);
            } else {
                throw ConfigError(at + ".type: unknown jump type \"" + type + "\"");
            }
            j.finish();
        }
    }
    s.finish();
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return m;
}

GfouSpec ProcessConfig::gfou_spec() const {
    GfouSpec spec;
    spec.levy = xi;
    spec.hurst = HurstIndex(hurst);
    spec.initial = initial;
    spec.horizon = horizon;
    spec.mesh = mesh;
    return spec;
}

SdeSpec ProcessConfig::sde_spec() const {
    SdeSpec spec;
    spec.u_model = u;
    spec.hurst = HurstIndex(hurst);
    spec.y0 = initial;
    spec.horizon = horizon;
    spec.mesh = mesh;
    return spec;
}

ExperimentConfig parse_config(const json& doc) {
    Section s(doc, "config");
    ExperimentConfig cfg;
    if (s.has("process")) cfg.process = parse_process(s.raw("process"));
    const long reps = s.integer("replications", cfg.replications);
    if (reps < 1) throw ConfigError("config.replications: must be >= 1");
    cfg.replications = static_cast<int>(reps);
    cfg.seed = s.unsigned_integer("seed", cfg.seed);
    const long jobs = s.integer("jobs", cfg.jobs);
    if (jobs < 1) throw ConfigError("config.jobs: must be >= 1");
    cfg.jobs = static_cast<int>(jobs);
    if (s.has("output")) {
        Section o(s.raw("output"), "output");
        cfg.out_dir = o.text("dir", "");
        const long thin = o.integer("thin", 1);
        if (thin < 1) throw ConfigError("output.thin: must be >= 1");
        cfg.thin = static_cast<std::size_t>(thin);
        o.finish();
    }
    if (s.has("validate")) cfg.validate = parse_validate(s.raw("validate"));
    if (s.has("hurst")) cfg.hurst = parse_hurst(s.raw("hurst"));
    if (s.has("pvariation")) cfg.pvariation = parse_pvariation(s.raw("pvariation"));
    s.finish();

    cfg.canonical = doc;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_config(doc);
}

std::string config_hash(const ExperimentConfig& cfg) {
    // Scheduling and output location do not change results, so they are left
    // out of the hash.
    json c = cfg.canonical;
    c.erase("jobs");
    if (c.contains("output")) c["output"].erase("dir");
    c["seed"] = cfg.seed;
    c["replications"] = cfg.replications;
    return hex64(fnv1a64(c.dump()));
}

}  // namespace gfou::cli
