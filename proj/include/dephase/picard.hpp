#pragma once

// Constructive iteration for the coupled (h, z1) system:
//
//   h^0 = f0
//   z^n  solves  z(t) = hhat_1(0, t) + mu sum_{m=+-1} (m/2) int_0^t z_m(s) hhat^n_{1-m}(s, t - m s) ds
//   h^{n+1} solves the linear transport problem driven by z^n.

#include "dephase/config.hpp"
#include "dephase/core.hpp"
#include "dephase/norms.hpp"

#include <vector>

namespace dephase {

/// Time-ordered snapshots with linear interpolation in time.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<MixedField> snapshots);

    /// Constant trajectory f0 sampled at the given times.
    static Trajectory frozen(const MixedField& field, const std::vector<double>& times);

    const std::vector<MixedField>& snapshots() const noexcept { return snapshots_; }
    std::size_t size() const noexcept { return snapshots_.size(); }
    const MixedField& front() const { return snapshots_.front(); }
    const MixedField& back() const { return snapshots_.back(); }

    /// Row k at time s, linear between neighbouring snapshots, clamped at the ends.
    std::vector<cplx> row_at(int k, double s) const;

private:
    std::vector<MixedField> snapshots_;
};

/// Uniform time grid t_j = j dt, j = 0..n.
struct TimeGrid {
    double dt = 0.01;
    std::size_t n = 0;
    double operator[](std::size_t j) const { return double(j) * dt; }
};

/// Trapezoidal marching for the self-referential Volterra equation in z1.
/// Throws NumericalError when the per-step 2x2 system is singular.
OrderSeries volterra_solve(const Trajectory& h_traj, double mu, const TimeGrid& t_grid);

/// Cubic Lagrange interpolation of z1 on a uniform series.
cplx interpolate_order(const OrderSeries& series, double t);

/// Linear transport with prescribed z1. Snapshots every `snapshot_every` in model time.
Trajectory linear_transport_solve(const OrderSeries& z_series, const MixedField& initial,
                                  double mu, const RunConfig& config, double snapshot_every);

struct IterationRecord {
    int n = 0;
    OrderSeries z_series;   // z^{n-1}, solved from h^{n-1}
    Trajectory h_trajectory; // h^n, transported with z^{n-1}
    double triple_norm_h = 0.0;
    double triple_norm_R = 0.0;
    double delta_z = 0.0;
    double delta_h = 0.0;
};

struct PicardResult {
    std::vector<IterationRecord> records;
    bool converged = false;
};

/// Iterates until delta_z < tol and delta_h < tol or max_iters. Only the last two
/// trajectories are kept; earlier records retain their series and diagnostics.
PicardResult iterate(const RunConfig& config, double tol, int max_iters);

/// sup_t |hhat_1(t, t) - z1(t)| over the record's snapshot times.
double fixed_point_check(const IterationRecord& record);

} // namespace dephase
