#pragma once

#include "dephase/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dephase::cli {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { ok = 0, config_error = 1, numerical_failure = 2 };

struct Options {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool refine = false; // estimates: rerun at doubled resolution for stability ratios
};

/// Loads the config, then applies --out and --seed.
RunConfig resolve_config(const Options& opts);

int cmd_simulate(const Options& opts);
int cmd_picard(const Options& opts);
int cmd_particles(const Options& opts);
int cmd_estimates(const std::filesystem::path& run_dir, const Options& opts);
int cmd_sweep(const Options& opts, const std::string& parameter, const std::vector<double>& values);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, char** argv);

} // namespace dephase::cli
