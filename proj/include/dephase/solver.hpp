#pragma once

// Time integration of the gliding-frame equation in the mixed (k, omega)
// representation:
//
//   d/dt h_k = mu (k/2) [ z1(t) e^{+i t omega} h_{k-1} - conj(z1(t)) e^{-i t omega} h_{k+1} ]
//
// The phase factors e^{+-i t omega} are the omega-side image of the eta -+ t
// shifts of the (k, eta) form, so no interpolation is needed. Modes beyond
// +-k_max are taken to be zero.

#include "dephase/config.hpp"
#include "dephase/core.hpp"

#include <functional>
#include <vector>

namespace dephase {

/// Right-hand side with the same shape as the field; row k = 0 is exactly zero.
using RhsEvaluation = MixedField;

cplx order_parameter(const MixedField& field, double t);

RhsEvaluation apply_L(const MixedField& field, cplx z1, double t, double mu);

/// Prescribed order parameter as a function of time (linear transport solves).
using OrderProvider = std::function<cplx(const MixedField& stage_field, double t)>;

struct StepDiagnostics {
    double reality_drift = 0.0; // defect before symmetrization
};

/// One classical RK4 step; z1 is supplied per stage by `order`.
MixedField rk4_step(const MixedField& field, double dt, double mu, const OrderProvider& order,
                    StepDiagnostics* diag = nullptr);

struct SolverState {
    MixedField field;
    OrderSeries order_history;
    std::vector<MixedField> snapshots;
    std::size_t snapshot_stride = 50; // steps between snapshots
    double max_reality_drift = 0.0;

    double t() const { return field.time(); }
};

/// Self-consistent RK4 step: z1 is recomputed from every stage field.
/// Throws NumericalError on non-finite values.
SolverState step_rk4(SolverState state, double dt, double mu);

struct RunResult {
    OrderSeries series;                // z1 at every step, t = 0 included
    std::vector<MixedField> snapshots; // every snapshot_every, t = 0 and t_max included
    MixedField final_field;
    double max_reality_drift = 0.0;
};

RunResult run(const RunConfig& config);

/// Same as run() from an explicit initial field.
RunResult run_from(const MixedField& initial, const RunConfig& config);

/// f(t, theta, omega) on theta_grid x omega-grid, row-major in theta.
std::vector<double> reconstruct_f(const MixedField& field, double t,
                                  const std::vector<double>& theta_grid);

/// Local error estimate |Phi_dt(h) - Phi_{dt/2}^2(h)|_sup for the self-consistent stepper.
double richardson_local_error(const MixedField& field, double dt, double mu);

} // namespace dephase
