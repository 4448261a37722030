#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfou/levy.hpp"
#include "gfou/process.hpp"

namespace gfou::cli {

/// Malformed or inconsistent configuration (exit code 4).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProcessKind { Gfou, Sde, Fou, Gou, W };

struct ProcessConfig {
    ProcessKind kind = ProcessKind::Gfou;
    double hurst = 0.7;
    double horizon = 1.0;
    double mesh = 1.0 / 256.0;
    LevyModel xi;           // gfou, gou
    LevyModel eta;          // gou
    LevyModel u;            // sde
    double lambda = 1.0;    // fou
    double drift_a = 0.0;   // w
    InitialLaw initial;     // Y_0, V_0, X_0, or the X of W

    GfouSpec gfou_spec() const;
    SdeSpec sde_spec() const;
};

struct ValidateConfig {
    std::vector<double> lags{0.5, 1.0, 2.0, 5.0, 10.0};
    int series_terms = 50;
    bool monte_carlo = true;
    std::vector<double> mc_lags;  // lags used for the MC column; empty = all lags <= horizon
    std::optional<ThetaConstants> theta_override;  // analytic side only
    double tolerance_oracle = 1e-5;
    double tolerance_series = 1e-6;
    double mc_sigmas = 3.0;
};

struct HurstConfig {
    enum class Source { Process, Fgn, Iid };
    Source source = Source::Fgn;
    std::vector<std::string> methods{"variance-time", "rescaled-range"};
    std::size_t n = 1 << 14;
    double spacing = 1.0;  // sampling step of the process sequence
    int bootstrap = 50;
};

struct PvariationSettings {
    enum class Source { Fbm, Levy };
    Source source = Source::Fbm;
    double hurst = 0.7;
    LevyModel levy;
    std::vector<double> p_grid;
    int min_level = 8;
    int max_level = 14;
    double threshold = 0.05;
};

struct ExperimentConfig {
    ProcessConfig process;
    int replications = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir;  // empty: --out, then $GFOU_OUT_DIR, then "gfou_out"
    std::size_t thin = 1;  // keep every thin-th grid time in path output
    ValidateConfig validate;
    HurstConfig hurst;
    PvariationSettings pvariation;

    /// Canonical JSON of the effective configuration (after overrides).
    nlohmann::json canonical;
};

/// Parses a configuration document; unknown keys and bad values throw
/// ConfigError naming the offending key path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

LevyModel parse_levy(const nlohmann::json& doc, const std::string& where);

std::string config_hash(const ExperimentConfig& cfg);

}  // namespace gfou::cli
