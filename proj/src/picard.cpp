#include "dephase/picard.hpp"

#include "dephase/errors.hpp"
#include "dephase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dephase {

Trajectory::Trajectory(std::vector<MixedField> snapshots) : snapshots_(std::move(snapshots))
{
    if (snapshots_.empty())
        throw ConfigError("trajectory needs at least one snapshot");
    for (std::size_t i = 1; i < snapshots_.size(); ++i)
        if (!(snapshots_[i].time() > snapshots_[i - 1].time()))
            throw ConfigError("trajectory snapshot times must be strictly increasing");
}

Trajectory Trajectory::frozen(const MixedField& field, const std::vector<double>& times)
{
    std::vector<MixedField> snaps;
    snaps.reserve(times.size());
    for (double t : times) {
        snaps.push_back(field);
        snaps.back().set_time(t);
    }
    return Trajectory(std::move(snaps));
}

std::vector<cplx> Trajectory::row_at(int k, double s) const
{
    const auto& snaps = snapshots_;
    auto copy = [&](const MixedField& f) {
        auto r = f.row(k);
        return std::vector<cplx>(r.begin(), r.end());
    };
    if (s <= snaps.front().time())
        return copy(snaps.front());
    if (s >= snaps.back().time())
        return copy(snaps.back());
    auto it = std::upper_bound(snaps.begin(), snaps.end(), s,
                               [](double v, const MixedField& f) { return v < f.time(); });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (s - lo.time()) / (hi.time() - lo.time());
    auto a = lo.row(k);
    auto b = hi.row(k);
    std::vector<cplx> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        out[j] = (1.0 - w) * a[j] + w * b[j];
    return out;
}

OrderSeries volterra_solve(const Trajectory& h_traj, double mu, const TimeGrid& t_grid)
{
    const MixedField& f0 = h_traj.front();
    const auto& grid = f0.grid();
    const std::size_t nw = grid.size();
    const std::size_t N = t_grid.n;
    const double dt = t_grid.dt;
    if (mu != 0.0 && f0.k_max() < 2)
        throw ConfigError("volterra_solve needs k_max >= 2 for the m = -1 kernel");

    std::vector<cplx> forcing(N + 1), ghat(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        forcing[j] = evaluate_spectral_at(f0, 1, t_grid[j]);
        ghat[j] = evaluate_spectral_at(f0, 0, t_grid[j]);
    }

    OrderSeries out;
    out.reserve(N + 1);
    if (mu == 0.0) {
        for (std::size_t j = 0; j <= N; ++j)
            out.push_back(OrderSample::at(t_grid[j], forcing[j]));
        return out;
    }

    // a_i(omega) = w(omega) h_2(s_i, omega) e^{-i s_i omega}, so that
    // hhat_2(s_i, t_j + s_i) = sum_omega a_i(omega) e^{-i t_j omega}
    std::vector<cplx> a((N + 1) * nw);
    for (std::size_t i = 0; i <= N; ++i) {
        const double s = t_grid[i];
        const auto h2 = h_traj.row_at(2, s);
        for (std::size_t q = 0; q < nw; ++q)
            a[i * nw + q] = (grid.weight(q) * h2[q]) * std::polar(1.0, -s * grid[q]);
    }

    std::vector<cplx> z(N + 1);
    std::vector<cplx> kernel(N + 1);
    std::vector<cplx> phase(nw);
    z[0] = forcing[0];
    const double c = 0.5 * mu * dt;
    for (std::size_t j = 1; j <= N; ++j) {
        const double t = t_grid[j];
        for (std::size_t q = 0; q < nw; ++q)
            phase[q] = std::polar(1.0, -t * grid[q]);
        for (std::size_t i = 0; i <= j; ++i) {
            cplx acc{};
            const cplx* ai = &a[i * nw];
            for (std::size_t q = 0; q < nw; ++q)
                acc += ai[q] * phase[q];
            kernel[i] = acc;
        }
        cplx b = forcing[j];
        for (std::size_t i = 0; i < j; ++i) {
            const double ci = (i == 0) ? 0.5 : 1.0;
            b += c * ci * (z[i] * ghat[j - i] - std::conj(z[i]) * kernel[i]);
        }
        // endpoint: P z + Q conj(z) = b
        const cplx P = 1.0 - 0.5 * c * ghat[0];
        const cplx Q = 0.5 * c * kernel[j];
        const double det = std::norm(P) - std::norm(Q);
        if (std::abs(det) < 1e-8)
            throw NumericalError("singular Volterra step at t=" + std::to_string(t)
                                 + ": mu*dt is far outside the perturbative regime");
        z[j] = (std::conj(P) * b - Q * std::conj(b)) / det;
        if (!std::isfinite(z[j].real()) || !std::isfinite(z[j].imag()))
            throw NumericalError("non-finite Volterra solution at t=" + std::to_string(t));
    }
    for (std::size_t j = 0; j <= N; ++j)
        out.push_back(OrderSample::at(t_grid[j], z[j]));
    return out;
}

cplx interpolate_order(const OrderSeries& series, double t)
{
    const std::size_t n = series.size();
    if (n == 0)
        throw ConfigError("empty order series");
    if (n == 1)
        return series.front().z1;
    const double t0 = series.front().t;
    const double h = series[1].t - t0;
    const double x = (t - t0) / h;
    const double xr = std::round(x);
    if (std::abs(x - xr) < 1e-9 && xr >= 0.0 && xr <= double(n - 1))
        return series[std::size_t(xr)].z1;
    if (n < 4) {
        const std::size_t i = std::min<std::size_t>(std::size_t(std::max(0.0, std::floor(x))), n - 2);
        const double w = x - double(i);
        return (1.0 - w) * series[i].z1 + w * series[i + 1].z1;
    }
    std::ptrdiff_t base = std::ptrdiff_t(std::floor(x)) - 1;
    base = std::clamp<std::ptrdiff_t>(base, 0, std::ptrdiff_t(n) - 4);
    cplx acc{};
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a)
                l *= (x - double(base + b)) / double(a - b);
        acc += l * series[std::size_t(base + a)].z1;
    }
    return acc;
}

Trajectory linear_transport_solve(const OrderSeries& z_series, const MixedField& initial,
                                  double mu, const RunConfig& config, double snapshot_every)
{
    const std::size_t steps = config.n_steps();
    if (z_series.empty() || z_series.back().t < config.t_max - 1e-9)
        throw ConfigError("order series does not cover [0, t_max]");
    const std::size_t stride = config.stride_steps(snapshot_every);
    auto prescribed = [&z_series](const MixedField&, double t) {
        return interpolate_order(z_series, t);
    };
    MixedField h = initial;
    h.set_time(0.0);
    std::vector<MixedField> snaps{h};
    for (std::size_t i = 1; i <= steps; ++i) {
        h = rk4_step(h, config.dt, mu, prescribed);
        h.set_time(double(i) * config.dt);
        if (i % stride == 0 || i == steps)
            snaps.push_back(h);
    }
    return Trajectory(std::move(snaps));
}

namespace {

std::vector<SpectralField> to_spectral(const Trajectory& traj, const EtaGrid& eta)
{
    std::vector<SpectralField> out;
    out.reserve(traj.size());
    for (const auto& f : traj.snapshots())
        out.push_back(mixed_to_spectral(f, eta));
    return out;
}

double sup_difference(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b)
{
    double d = 0.0;
    for (std::size_t s = 0; s < std::min(a.size(), b.size()); ++s) {
        auto x = a[s].values();
        auto y = b[s].values();
        for (std::size_t i = 0; i < x.size(); ++i)
            d = std::max(d, std::abs(x[i] - y[i]));
    }
    return d;
}

} // namespace

PicardResult iterate(const RunConfig& config, double tol, int max_iters)
{
    config.validate();
    if (!(tol > 0.0))
        throw ConfigError("tol>0 violated");
    const auto f0 = make_initial_field(config.initial, config.omega_grid, config.k_max);
    const TimeGrid tg{config.dt, config.n_steps()};

    const std::size_t stride = config.stride_steps(config.picard.snapshot_every);
    std::vector<double> times;
    for (std::size_t i = 0; i <= tg.n; i += stride)
        times.push_back(tg[i]);
    if (times.back() < tg[tg.n])
        times.push_back(tg[tg.n]);

    Trajectory h_prev = Trajectory::frozen(f0, times);
    auto spec_prev = to_spectral(h_prev, config.eta_grid);
    OrderSeries z_prev = volterra_solve(h_prev, 0.0, tg); // free-flow forcing

    PicardResult result;
    for (int n = 1; n <= max_iters; ++n) {
        IterationRecord rec;
        rec.n = n;
        rec.z_series = volterra_solve(h_prev, config.mu, tg);
        rec.h_trajectory =
            linear_transport_solve(rec.z_series, f0, config.mu, config, config.picard.snapshot_every);
        auto spec = to_spectral(rec.h_trajectory, config.eta_grid);

        for (std::size_t j = 0; j < rec.z_series.size(); ++j)
            rec.delta_z = std::max(rec.delta_z, std::abs(rec.z_series[j].z1 - z_prev[j].z1));
        rec.delta_h = sup_difference(spec, spec_prev);
        rec.triple_norm_h = triple_norm_h(spec, config.weights).value();
        rec.triple_norm_R = triple_norm_R(rec.z_series, config.weights).value;

        const bool done = rec.delta_z < tol && rec.delta_h < tol;
        h_prev = rec.h_trajectory;
        z_prev = rec.z_series;
        spec_prev = std::move(spec);
        // keep the first and the latest trajectories only
        if (result.records.size() >= 2)
            result.records.back().h_trajectory = Trajectory{};
        result.records.push_back(std::move(rec));
        if (done) {
            result.converged = true;
            break;
        }
    }
    return result;
}

double fixed_point_check(const IterationRecord& record)
{
    double r = 0.0;
    for (const auto& h : record.h_trajectory.snapshots()) {
        const double t = h.time();
        const cplx z = interpolate_order(record.z_series, t);
        r = std::max(r, std::abs(evaluate_spectral_at(h, 1, t) - z));
    }
    return r;
}

} // namespace dephase
