#include "dephase/solver.hpp"

#include "dephase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dephase {

cplx order_parameter(const MixedField& field, double t)
{
    return evaluate_spectral_at(field, 1, t);
}

RhsEvaluation apply_L(const MixedField& field, cplx z1, double t, double mu)
{
    const auto& grid = field.grid();
    const int K = field.k_max();
    const std::size_t n = grid.size();
    RhsEvaluation out(grid, K, t);
    if (mu == 0.0 || z1 == cplx{})
        return out;

    std::vector<cplx> up(n); // z1 e^{+i t omega}
    for (std::size_t j = 0; j < n; ++j)
        up[j] = z1 * std::polar(1.0, t * grid[j]);

    for (int k = -K; k <= K; ++k) {
        if (k == 0)
            continue;
        const double c = 0.5 * mu * double(k);
        auto dst = out.row(k);
        const bool has_lo = k - 1 >= -K;
        const bool has_hi = k + 1 <= K;
        for (std::size_t j = 0; j < n; ++j) {
            const cplx lo = has_lo ? up[j] * field(k - 1, j) : cplx{};
            const cplx hi = has_hi ? std::conj(up[j]) * field(k + 1, j) : cplx{};
            dst[j] = c * (lo - hi);
        }
    }
    return out;
}

namespace {

// a + s * b, written into out (same shape)
void axpy(MixedField& out, const MixedField& a, double s, const MixedField& b)
{
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = x[i] + s * y[i];
}

} // namespace

MixedField rk4_step(const MixedField& field, double dt, double mu, const OrderProvider& order,
                    StepDiagnostics* diag)
{
    if (!(dt > 0.0))
        throw ConfigError("dt>0 violated");
    const double t = field.time();
    const double th = t + 0.5 * dt;
    const double t1 = t + dt;

    const auto k1 = apply_L(field, order(field, t), t, mu);
    MixedField stage(field.grid(), field.k_max(), th);
    axpy(stage, field, 0.5 * dt, k1);
    const auto k2 = apply_L(stage, order(stage, th), th, mu);
    axpy(stage, field, 0.5 * dt, k2);
    const auto k3 = apply_L(stage, order(stage, th), th, mu);
    stage.set_time(t1);
    axpy(stage, field, dt, k3);
    const auto k4 = apply_L(stage, order(stage, t1), t1, mu);

    MixedField next(field.grid(), field.k_max(), t1);
    auto o = next.values();
    auto h = field.values();
    auto a = k1.values(), b = k2.values(), c = k3.values(), d = k4.values();
    const double s = dt / 6.0;
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = h[i] + s * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);

    if (!next.all_finite())
        throw NumericalError("non-finite field after RK4 step at t=" + std::to_string(t)
                             + " (reduce dt or increase k_max)");
    const double drift = next.reality_defect();
    next.symmetrize();
    if (diag)
        diag->reality_drift = drift;
    return next;
}

SolverState step_rk4(SolverState state, double dt, double mu)
{
    StepDiagnostics diag;
    auto self_consistent = [](const MixedField& f, double t) { return order_parameter(f, t); };
    state.field = rk4_step(state.field, dt, mu, self_consistent, &diag);
    state.max_reality_drift = std::max(state.max_reality_drift, diag.reality_drift);
    state.order_history.push_back(OrderSample::at(state.t(), order_parameter(state.field, state.t())));
    return state;
}

RunResult run_from(const MixedField& initial, const RunConfig& config)
{
    const std::size_t steps = config.n_steps();
    const std::size_t stride = config.stride_steps(config.snapshot_every);

    SolverState state{initial, {}, {}, stride, 0.0};
    state.field.set_time(0.0);
    state.order_history.reserve(steps + 1);
    state.order_history.push_back(OrderSample::at(0.0, order_parameter(state.field, 0.0)));
    state.snapshots.push_back(state.field);

    for (std::size_t i = 1; i <= steps; ++i) {
        state = step_rk4(std::move(state), config.dt, config.mu);
        // pin the clock to the grid so that repeated runs agree bit for bit
        const double t = double(i) * config.dt;
        state.field.set_time(t);
        state.order_history.back() = OrderSample::at(t, order_parameter(state.field, t));
        if (i % stride == 0 || i == steps)
            state.snapshots.push_back(state.field);
    }
    return {std::move(state.order_history), std::move(state.snapshots), state.field,
            state.max_reality_drift};
}

RunResult run(const RunConfig& config)
{
    config.validate();
    const auto initial = make_initial_field(config.initial, config.omega_grid, config.k_max);
    return run_from(initial, config);
}

std::vector<double> reconstruct_f(const MixedField& field, double t,
                                  const std::vector<double>& theta_grid)
{
    const auto& grid = field.grid();
    const int K = field.k_max();
    std::vector<double> out(theta_grid.size() * grid.size());
    for (std::size_t a = 0; a < theta_grid.size(); ++a)
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double phase = theta_grid[a] - grid[j] * t;
            cplx acc = field(0, j);
            for (int k = 1; k <= K; ++k)
                acc += field(k, j) * std::polar(1.0, k * phase)
                       + field(-k, j) * std::polar(1.0, -k * phase);
            out[a * grid.size() + j] = acc.real() / (2.0 * pi);
        }
    return out;
}

double richardson_local_error(const MixedField& field, double dt, double mu)
{
    auto self_consistent = [](const MixedField& f, double t) { return order_parameter(f, t); };
    const auto one = rk4_step(field, dt, mu, self_consistent);
    const auto half = rk4_step(rk4_step(field, 0.5 * dt, mu, self_consistent), 0.5 * dt, mu,
                               self_consistent);
    double e = 0.0;
    auto a = one.values();
    auto b = half.values();
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

} // namespace dephase
