#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace gfou::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitValidation = 2,
    kExitGate = 3,
    kExitConfig = 4,
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<int> jobs;
    std::optional<double> tolerance;  // analytic-vs-oracle tolerance of validate-cov
    std::optional<std::string> out_dir;
};

/// Applies command-line overrides and records them in the canonical config.
void apply_overrides(ExperimentConfig& cfg, const Overrides& ov);

/// --out, then the config's output.dir, then $GFOU_OUT_DIR, then "gfou_out".
std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception (by index) is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Each command writes its files into `out` and messages to `log`, and
/// returns an exit code. Gate failures surface as GateError.
int run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_validate_cov(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_hurst(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_pvariation(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_gate(const ExperimentConfig& cfg, std::ostream& log);

/// Full command-line entry point (argv[0] included).
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gfou::cli
