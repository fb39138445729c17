#pragma once

// Independent references for the kinetic solver: the finite-N Kuramoto model
//
//   d theta_i / dt = omega_i - mu R_N sin(theta_i - phi_N),
//   R_N e^{i phi_N} = (1/N) sum_j e^{i theta_j},
//
// and closed-form free-flow order parameters.

#include "dephase/core.hpp"

#include <cstdint>
#include <vector>

namespace dephase {

struct ParticleEnsemble {
    std::vector<double> thetas; // in [0, 2 pi)
    std::vector<double> omegas;
    double t = 0.0;

    std::size_t size() const noexcept { return thetas.size(); }
};

/// (1/N) sum_j e^{i theta_j}
cplx mean_field(const ParticleEnsemble& ens);

/// z1 = conj(mean field) = R_N e^{-i phi_N}, matching the kinetic convention.
OrderSample particle_order(const ParticleEnsemble& ens);

/// Stratified sample: omega by inverse CDF on a shifted regular lattice, theta by
/// inverse CDF of f0(theta | omega) on a shifted golden-ratio sequence. Deterministic
/// in (datum, n, seed). `omega_window` truncates unbounded families (lorentzian);
/// 0 means no truncation.
ParticleEnsemble sample_ensemble(const InitialDatum& datum, std::size_t n, std::uint64_t seed,
                                 double omega_window = 0.0);

/// RK4 step with the mean field recomputed at every stage.
ParticleEnsemble particle_step(const ParticleEnsemble& ens, double mu, double dt);

OrderSeries particle_run(const InitialDatum& datum, std::size_t n, double mu, double dt,
                         double t_max, std::uint64_t seed, double omega_window = 0.0);

OrderSeries particle_run(ParticleEnsemble ens, double mu, double dt, double t_max);

struct FreeFlowR {
    double R = 0.0;
    bool closed_form = true; // false: tabulated g, quadrature fallback
};

/// R(t) = |eps_1| |ghat(t)| for the mu = 0 flow.
FreeFlowR exact_free_flow_R(const InitialDatum& datum, double t);

} // namespace dephase
