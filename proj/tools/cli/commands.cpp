#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "gfou/covariance.hpp"
#include "gfou/csv.hpp"
#include "gfou/errors.hpp"
#include "gfou/estimators.hpp"
#include "gfou/process.hpp"
#include "gfou/stats.hpp"

namespace gfou::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
    if (ov.seed) {
        cfg.seed = *ov.seed;
        cfg.canonical["seed"] = *ov.seed;
    }
    if (ov.replications) {
        if (*ov.replications < 1) throw ConfigError("--reps must be >= 1");
        cfg.replications = *ov.replications;
        cfg.canonical["replications"] = *ov.replications;
    }
    if (ov.jobs) {
        if (*ov.jobs < 1) throw ConfigError("--jobs must be >= 1");
        cfg.jobs = *ov.jobs;
    }
    if (ov.tolerance) {
        if (!(*ov.tolerance > 0.0)) throw ConfigError("--tolerance must be > 0");
        cfg.validate.tolerance_oracle = *ov.tolerance;
        cfg.canonical["validate"]["tolerance_oracle"] = *ov.tolerance;
    }
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
}

fs::path resolve_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("GFOU_OUT_DIR"); env && *env) return env;
    return "gfou_out";
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

std::string header_comment(const ExperimentConfig& cfg) {
    return "config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed);
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f.exceptions(std::ios::badbit | std::ios::failbit);
    return f;
}

void write_summary(const ExperimentConfig& cfg, const fs::path& dir, const std::string& command, json body) {
    body["command"] = command;
    body["config_hash"] = config_hash(cfg);
    body["seed"] = cfg.seed;
    body["replications"] = cfg.replications;
    auto f = open_output(dir, "summary.json");
    f << body.dump(2) << '\n';
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// Values of `path` at the times of `grid`; path times may contain extra
/// points, and each grid time is matched to the closest path time.
std::vector<double> values_on_grid(const SamplePath& path, std::span<const double> grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) {
        auto it = std::lower_bound(path.times.begin(), path.times.end(), t);
        std::size_t i = static_cast<std::size_t>(it - path.times.begin());
        if (i == path.times.size() || (i > 0 && t - path.times[i - 1] < path.times[i] - t)) --i;
        if (std::abs(path.times[i] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
            throw std::logic_error("path does not contain grid time " + format_double(t));
        }
        out.push_back(path.values[i]);
    }
    return out;
}

std::vector<double> output_grid(const ProcessConfig& p) {
    const double cells = std::round(p.horizon / p.mesh);
    if (std::abs(cells * p.mesh - p.horizon) > 1e-9 * p.horizon) {
        throw ConfigError("process.horizon must be a multiple of process.mesh");
    }
    std::vector<double> t(static_cast<std::size_t>(cells) + 1);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) * p.mesh;
    return t;
}

void check_gfou_gates(const ProcessConfig& p) { p.gfou_spec().check_gates(); }

/// One replication of the configured process on [0, horizon].
class ProcessRunner {
public:
    explicit ProcessRunner(const ProcessConfig& p) : p_(p), grid_(output_grid(p)) {
        if (p.kind == ProcessKind::Gfou) gfou_.emplace(p.gfou_spec());
        if (p.kind == ProcessKind::Sde) p.sde_spec().validate();
        if (p.kind == ProcessKind::W && !HurstIndex(p.hurst).long_memory()) {
            throw ConfigError("process.hurst: W needs H > 1/2");
        }
    }

    const std::vector<double>& grid() const { return grid_; }

    std::vector<double> run(RandomStream& rng) const {
        const HurstIndex h(p_.hurst);
        switch (p_.kind) {
            case ProcessKind::Gfou:
                return values_on_grid(gfou_->sample(rng), grid_);
            case ProcessKind::Sde:
                return values_on_grid(euler_sde(p_.sde_spec(), rng), grid_);
            case ProcessKind::Fou: {
                const double x0 = p_.initial.draw(rng);
                return values_on_grid(simulate_fou(p_.lambda, h, x0, grid_, rng), grid_);
            }
            case ProcessKind::Gou:
                return values_on_grid(simulate_gou(p_.xi, p_.eta, p_.initial, grid_, rng), grid_);
            case ProcessKind::W:
                return values_on_grid(simulate_w(h, p_.initial, p_.drift_a, grid_, rng).closed, grid_);
        }
        throw std::logic_error("unknown process kind");
    }

private:
    ProcessConfig p_;
    std::vector<double> grid_;
    std::optional<GfouSimulator> gfou_;
};

}  // namespace

int run_simulate(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
    if (cfg.process.kind == ProcessKind::Gfou) check_gfou_gates(cfg.process);
    const ProcessRunner runner(cfg.process);
    const auto& grid = runner.grid();
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);

    std::vector<std::vector<double>> paths(reps);
    parallel_for(reps, cfg.jobs, [&](std::size_t r) {
        RandomStream rng(cfg.seed, r);
        paths[r] = runner.run(rng);
    });

    const std::string comment = header_comment(cfg);
    {
        auto f = open_output(out, "paths.csv");
        CsvWriter w(f, comment, {"rep", "t", "value"});
        for (std::size_t r = 0; r < reps; ++r) {
            for (std::size_t i = 0; i < grid.size(); i += cfg.thin) {
                w.row({std::to_string(r), format_double(grid[i]), format_double(paths[r][i])});
            }
        }
    }
    json slices = json::array();
    {
        auto f = open_output(out, "summary.csv");
        CsvWriter w(f, comment, {"t", "mean", "variance", "n"});
        std::vector<double> column(reps);
        for (std::size_t i = 0; i < grid.size(); i += cfg.thin) {
            for (std::size_t r = 0; r < reps; ++r) column[r] = paths[r][i];
            const double m = stats::mean(column);
            const double v = reps > 1 ? stats::variance(column) : 0.0;
            w.row({format_double(grid[i]), format_double(m), format_double(v), std::to_string(reps)});
        }
        for (std::size_t r = 0; r < reps; ++r) column[r] = paths[r].back();
        slices = {{"t", grid.back()},
                  {"mean", stats::mean(column)},
                  {"variance", reps > 1 ? stats::variance(column) : 0.0}};
    }
    json warnings = json::array();
    if (cfg.process.kind == ProcessKind::Gfou) {
        for (const auto& wmsg : cfg.process.gfou_spec().warnings()) {
            warnings.push_back(wmsg);
            log << "warning: " << wmsg << '\n';
        }
    }
    write_summary(cfg, out, "simulate",
                  {{"grid_points", grid.size()}, {"at_horizon", slices}, {"warnings", warnings}});
    log << "simulate: " << reps << " paths written to " << out.string() << '\n';
    return kExitOk;
}

int run_validate_cov(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
    const ProcessConfig& p = cfg.process;
    if (p.kind != ProcessKind::Gfou || p.initial.kind != InitialLaw::Kind::Stationary) {
        throw ConfigError("validate-cov needs a gfou process with a stationary initial law");
    }
    check_gfou_gates(p);
    const HurstIndex h(p.hurst);
    const ValidateConfig& v = cfg.validate;
    const ThetaConstants theta_sim = theta_constants(p.xi);
    const ThetaConstants theta = v.theta_override.value_or(theta_sim);

    std::vector<CovarianceReport> reports;
    for (double s : v.lags) {
        CovarianceReport rep = covariance_report(theta, h, s, v.series_terms, v.tolerance_oracle, v.tolerance_series);
        rep.mc_sigmas = v.mc_sigmas;
        reports.push_back(rep);
    }

    json mc_summary = nullptr;
    if (v.monte_carlo) {
        const ProcessRunner runner(p);
        const auto& grid = runner.grid();
        const std::size_t reps = static_cast<std::size_t>(cfg.replications);
        auto index_of_lag = [&](double s) -> std::size_t {
            const double k = std::round(s / p.mesh);
            if (std::abs(k * p.mesh - s) > 1e-9 * std::max(1.0, s) || k >= static_cast<double>(grid.size())) {
                return SamplePath::npos;
            }
            return static_cast<std::size_t>(k);
        };
        std::vector<std::size_t> idx;
        for (double s : v.lags) {
            const bool wanted = v.mc_lags.empty() || std::find(v.mc_lags.begin(), v.mc_lags.end(), s) != v.mc_lags.end();
            idx.push_back(wanted ? index_of_lag(s) : SamplePath::npos);
        }
        std::vector<std::vector<double>> at(reps);
        parallel_for(reps, cfg.jobs, [&](std::size_t r) {
            RandomStream rng(cfg.seed, r);
            const auto path = runner.run(rng);
            std::vector<double> row{path.front()};
            for (std::size_t k : idx) row.push_back(k == SamplePath::npos ? 0.0 : path[k]);
            at[r] = std::move(row);
        });
        std::vector<double> y0(reps);
        std::vector<double> ys(reps);
        for (std::size_t r = 0; r < reps; ++r) y0[r] = at[r][0];
        for (std::size_t j = 0; j < reports.size(); ++j) {
            if (idx[j] == SamplePath::npos) continue;
            for (std::size_t r = 0; r < reps; ++r) ys[r] = at[r][j + 1];
            const auto est = stats::batch_means_covariance(y0, ys);
            attach_mc(reports[j], est.value, est.stderr_);
        }
        const auto var = stats::batch_means_variance(y0);
        const double var_analytic = stationary_variance(theta, h);
        mc_summary = {{"variance_mc", var.value},
                      {"variance_mc_stderr", var.stderr_},
                      {"variance_analytic", var_analytic},
                      {"variance_agrees", std::abs(var.value - var_analytic) <= v.mc_sigmas * var.stderr_}};
    }

    bool oracle_ok = true;
    json rows = json::array();
    {
        auto f = open_output(out, "covariance.csv");
        CsvWriter w(f, header_comment(cfg),
                    {"s", "analytic", "series", "oracle", "mc", "mc_stderr", "analytic_vs_oracle",
                     "analytic_vs_series", "mc_vs_analytic"});
        for (const auto& r : reports) {
            oracle_ok = oracle_ok && r.analytic_vs_oracle;
            const std::string mc_flag = r.has_mc ? (r.mc_vs_analytic ? "true" : "false") : "na";
            w.row({format_double(r.lag_s), format_double(r.analytic), format_double(r.series), format_double(r.oracle),
                   r.has_mc ? format_double(r.mc_estimate) : "nan", r.has_mc ? format_double(r.mc_stderr) : "nan",
                   r.analytic_vs_oracle ? "true" : "false", r.analytic_vs_series ? "true" : "false", mc_flag});
            json row = {{"s", r.lag_s},
                        {"analytic", r.analytic},
                        {"series", r.series},
                        {"oracle", r.oracle},
                        {"analytic_vs_oracle", r.analytic_vs_oracle},
                        {"analytic_vs_series", r.analytic_vs_series}};
            if (r.has_mc) {
                row["mc"] = r.mc_estimate;
                row["mc_stderr"] = r.mc_stderr;
                row["mc_vs_analytic"] = r.mc_vs_analytic;
            }
            rows.push_back(row);
            log << "s=" << r.lag_s << " analytic=" << format_double(r.analytic) << " oracle=" << format_double(r.oracle)
                << (r.analytic_vs_oracle ? " ok" : " MISMATCH") << '\n';
        }
    }
    write_summary(cfg, out, "validate-cov",
                  {{"theta1", theta.theta1},
                   {"theta2", theta.theta2},
                   {"theta_overridden", v.theta_override.has_value()},
                   {"tolerance_oracle", v.tolerance_oracle},
                   {"tolerance_series", v.tolerance_series},
                   {"mc_sigmas", v.mc_sigmas},
                   {"lags", rows},
                   {"monte_carlo", mc_summary},
                   {"analytic_vs_oracle_all", oracle_ok}});
    return oracle_ok ? kExitOk : kExitValidation;
}

int run_hurst(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
    const HurstConfig& hc = cfg.hurst;
    const HurstIndex h(cfg.process.hurst);
    std::optional<ProcessRunner> runner;
    std::size_t stride = 1;
    if (hc.source == HurstConfig::Source::Process) {
        ProcessConfig p = cfg.process;
        if (p.kind != ProcessKind::Gfou && p.kind != ProcessKind::Fou) {
            throw ConfigError("hurst.source = process supports gfou and fou");
        }
        const double k = std::round(hc.spacing / p.mesh);
        if (k < 1.0 || std::abs(k * p.mesh - hc.spacing) > 1e-9 * hc.spacing) {
            throw ConfigError("hurst.spacing must be a multiple of process.mesh");
        }
        stride = static_cast<std::size_t>(k);
        p.horizon = static_cast<double>((hc.n - 1) * stride) * p.mesh;
        if (p.kind == ProcessKind::Gfou) check_gfou_gates(p);
        runner.emplace(p);
    }

    std::vector<HurstMethod> methods;
    for (const auto& m : hc.methods) {
        methods.push_back(m == "variance-time" ? HurstMethod::VarianceTime : HurstMethod::RescaledRange);
    }
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    std::vector<std::vector<EstimatorResult>> results(reps);
    parallel_for(reps, cfg.jobs, [&](std::size_t r) {
        RandomStream rng(cfg.seed, r);
        std::vector<double> x;
        switch (hc.source) {
            case HurstConfig::Source::Fgn:
                x = sample_fgn(h, hc.n, hc.spacing, rng);
                break;
            case HurstConfig::Source::Iid:
                x.resize(hc.n);
                for (double& v : x) v = rng.normal();
                break;
            case HurstConfig::Source::Process: {
                const auto path = runner->run(rng);
                for (std::size_t i = 0; i < hc.n; ++i) x.push_back(path[i * stride]);
                break;
            }
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            RandomStream boot = rng.derive(m + 1);
            results[r].push_back(estimate_hurst(x, methods[m], boot, hc.bootstrap));
        }
    });

    json per_method = json::array();
    {
        auto f = open_output(out, "hurst.csv");
        CsvWriter w(f, header_comment(cfg), {"rep", "method", "estimate", "stderr", "ci_low", "ci_high", "n_used"});
        for (std::size_t r = 0; r < reps; ++r) {
            for (const auto& e : results[r]) {
                w.row({std::to_string(r), e.name, format_double(e.point_estimate), format_double(e.stderr_),
                       format_double(e.ci_low), format_double(e.ci_high), std::to_string(e.n_used)});
            }
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            std::vector<double> est;
            for (std::size_t r = 0; r < reps; ++r) est.push_back(results[r][m].point_estimate);
            const double mean = stats::mean(est);
            const double sd = reps > 1 ? std::sqrt(stats::variance(est)) : 0.0;
            per_method.push_back({{"method", to_string(methods[m])}, {"mean", mean}, {"sd", sd}, {"n", reps}});
            log << to_string(methods[m]) << ": mean H = " << format_double(mean) << " (sd " << format_double(sd)
                << ", " << reps << " series)\n";
        }
    }
    write_summary(cfg, out, "hurst", {{"n", hc.n}, {"methods", per_method}});
    return kExitOk;
}

int run_pvariation(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
    const PvariationSettings& ps = cfg.pvariation;
    const PathSource source =
        ps.source == PvariationSettings::Source::Fbm ? PathSource::fbm(ps.hurst) : PathSource::of_levy(ps.levy);
    PvariationConfig pc;
    pc.p_grid = ps.p_grid;
    pc.min_level = ps.min_level;
    pc.max_level = ps.max_level;
    pc.replications = cfg.replications;
    pc.threshold = ps.threshold;
    const PvariationStudy study = run_pvariation_study(source, pc, cfg.seed);

    std::vector<std::string> cols{"p", "growth_exponent", "stabilizes", "theory", "agrees"};
    for (int l : study.levels) cols.push_back("median_level_" + std::to_string(l));
    std::size_t agreeing = 0;
    {
        auto f = open_output(out, "pvariation.csv");
        CsvWriter w(f, header_comment(cfg), cols);
        for (const auto& row : study.rows) {
            std::vector<std::string> cells{format_double(row.p), format_double(row.growth_exponent),
                                           row.stabilizes ? "true" : "false", to_string(row.theory),
                                           row.agrees ? "true" : "false"};
            for (double m : row.medians) cells.push_back(format_double(m));
            w.row(cells);
            agreeing += row.agrees ? 1 : 0;
        }
    }
    log << "pvariation: empirical transition at p = " << format_double(study.transition) << "; " << agreeing << "/"
        << study.rows.size() << " rows agree with the theoretical verdict\n";
    write_summary(cfg, out, "pvariation",
                  {{"transition", number_or_null(study.transition)},
                   {"threshold", ps.threshold},
                   {"rows_agreeing", agreeing},
                   {"rows", study.rows.size()}});
    return kExitOk;
}

int run_gate(const ExperimentConfig& cfg, std::ostream& log) {
    const ProcessConfig& p = cfg.process;
    if (p.kind != ProcessKind::Gfou) throw ConfigError("gate applies to gfou processes");
    const HurstIndex h(p.hurst);
    const GateResult ex = gfou_existence_gate(p.xi, h);
    int code = kExitOk;
    if (ex.ok) {
        log << "existence: ok (p = " << format_double(ex.witness_p) << ")\n";
    } else {
        log << "existence: rejected: " << ex.reason << '\n';
        code = kExitGate;
    }
    const GateResult st = gfou_stationarity_gate(p.xi, h);
    const bool needed = p.initial.kind == InitialLaw::Kind::Stationary;
    log << "stationarity: " << (st.ok ? "ok" : "rejected: " + st.reason) << (needed ? "" : " (not required)") << '\n';
    if (needed && !st.ok) code = kExitGate;
    return code;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and validation of generalized fractional OU processes"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    Overrides ov;
    app.add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", ov.seed, "base seed");
    app.add_option("--reps", ov.replications, "number of replications");
    app.add_option("--out", ov.out_dir, "output directory");
    app.add_option("--jobs", ov.jobs, "worker threads");
    app.add_option("--tolerance", ov.tolerance, "analytic-vs-oracle relative tolerance");
    auto* sim = app.add_subcommand("simulate", "simulate replications and write paths");
    auto* val = app.add_subcommand("validate-cov", "cross-check the stationary covariance");
    auto* hur = app.add_subcommand("hurst", "estimate the Hurst index");
    auto* pva = app.add_subcommand("pvariation", "p-variation transition study");
    auto* gat = app.add_subcommand("gate", "print existence and stationarity verdicts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        apply_overrides(cfg, ov);
        const fs::path dir = resolve_out_dir(cfg);
        if (sim->parsed()) return run_simulate(cfg, dir, out);
        if (val->parsed()) return run_validate_cov(cfg, dir, out);
        if (hur->parsed()) return run_hurst(cfg, dir, out);
        if (pva->parsed()) return run_pvariation(cfg, dir, out);
        if (gat->parsed()) return run_gate(cfg, out);
        return kExitConfig;
    } catch (const GateError& e) {
        err << "gate failure: " << e.what() << '\n';
        return kExitGate;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

}  // namespace gfou::cli
