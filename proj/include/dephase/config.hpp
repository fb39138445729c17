#pragma once

#include "dephase/core.hpp"
#include "dephase/norms.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace dephase {

struct PicardSettings {
    double tol = 1e-6;
    int max_iters = 30;
    double snapshot_every = 0.1; // trajectory stride used by the Volterra kernel
};

struct ParticleSettings {
    std::size_t n = 50000;
    double dt = 0.01;
    double t_max = 10.0;
};

/// Everything a run needs. Field names match the JSON keys documented in README.md.
struct RunConfig {
    double mu = 0.2;
    double dt = 0.01;
    double t_max = 20.0;
    int k_max = 16;
    OmegaGrid omega_grid{8.0, 257};
    EtaGrid eta_grid{25.0, 257};
    WeightParams weights = WeightParams::defaults();
    InitialDatum initial = InitialDatum::gaussian(1.0, {{1, {0.1, 0.0}}});
    double snapshot_every = 0.5;
    double fit_t_lo = 5.0;
    double fit_t_hi = 20.0;
    PicardSettings picard;
    ParticleSettings particles;
    std::uint64_t seed = 12345;
    std::filesystem::path out_dir = "out";

    /// Number of fixed time steps covering [0, t_max].
    std::size_t n_steps() const;

    /// Steps between stored snapshots for a given stride in model time.
    std::size_t stride_steps(double every) const;

    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    /// Gaussian sigma=1, eps1=0.1, mu=0.2, k_max=16, dt=0.01, t_max=20, W=8, 257 points.
    static RunConfig reference();
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Reads a JSON config file and applies DEPHASE_* environment overrides.
RunConfig load_config(const std::filesystem::path& path);

/// Applies DEPHASE_<KEY> overrides (e.g. DEPHASE_MU=0.1) to top-level keys.
void apply_env_overrides(nlohmann::json& j);

} // namespace dephase
