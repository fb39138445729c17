#include <doctest.h>

#include "dephase/config.hpp"
#include "dephase/errors.hpp"
#include "dephase/picard.hpp"
#include "dephase/solver.hpp"

#include <cmath>

using namespace dephase;

namespace {

RunConfig short_config(double mu, double t_max)
{
    auto c = RunConfig::reference();
    c.mu = mu;
    c.t_max = t_max;
    c.fit_t_lo = 0.0;
    c.fit_t_hi = t_max;
    return c;
}

// Explicit left-rectangle marching for the frozen Gaussian datum, where every kernel is
// closed form: ghat(x) = e^{-x^2/2}, hhat_2(s, t + s) = eps2 ghat(t + s).
std::vector<cplx> rectangle_volterra(double mu, cplx eps1, cplx eps2, double h, std::size_t n)
{
    auto g = [](double x) { return std::exp(-0.5 * x * x); };
    std::vector<cplx> z(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = h * double(j);
        cplx acc{};
        for (std::size_t i = 0; i < j; ++i) {
            const double s = h * double(i);
            acc += z[i] * g(t - s) - std::conj(z[i]) * eps2 * g(t + s);
        }
        z[j] = eps1 * g(t) + 0.5 * mu * h * acc;
    }
    return z;
}

const PicardResult& reference_picard()
{
    static const PicardResult r = [] {
        const auto c = RunConfig::reference();
        return iterate(c, c.picard.tol, c.picard.max_iters);
    }();
    return r;
}

} // namespace

TEST_CASE("trajectory interpolation and order interpolation")
{
    const OmegaGrid grid(4.0, 17);
    MixedField a(grid, 2, 0.0), b(grid, 2, 1.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        a(1, j) = 1.0;
        b(1, j) = 3.0;
    }
    const Trajectory tr(std::vector<MixedField>{a, b});
    CHECK(tr.row_at(1, 0.25)[3] == cplx{1.5, 0.0});
    CHECK(tr.row_at(1, -1.0)[3] == cplx{1.0, 0.0});
    CHECK(tr.row_at(1, 5.0)[3] == cplx{3.0, 0.0});
    CHECK_THROWS_AS(Trajectory(std::vector<MixedField>{b, a}), ConfigError);

    OrderSeries s;
    for (int i = 0; i <= 20; ++i) {
        const double t = 0.1 * i;
        s.push_back(OrderSample::at(t, {t * t * t - t, 2.0 * t}));
    }
    CHECK(interpolate_order(s, 0.5) == s[5].z1);
    // cubic Lagrange is exact on cubics
    CHECK(std::abs(interpolate_order(s, 0.537) - cplx{0.537 * 0.537 * 0.537 - 0.537, 1.074}) < 1e-13);
    CHECK(std::abs(interpolate_order(s, 1.96) - cplx{1.96 * 1.96 * 1.96 - 1.96, 3.92}) < 1e-12);
}

TEST_CASE("Volterra solve: free flow, homogeneous case, small k_max")
{
    const auto c = short_config(0.2, 2.0);
    const auto f0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
    const TimeGrid tg{c.dt, c.n_steps()};
    const auto tr = Trajectory::frozen(f0, {0.0, 2.0});
    const auto z = volterra_solve(tr, 0.0, tg);
    for (const auto& s : z)
        CHECK(std::abs(s.z1 - evaluate_spectral_at(f0, 1, s.t)) == 0.0);

    const auto inc = make_initial_field(InitialDatum::gaussian(1.0), c.omega_grid, c.k_max);
    for (const auto& s : volterra_solve(Trajectory::frozen(inc, {0.0, 2.0}), 0.2, tg))
        CHECK(s.z1 == cplx{});

    const auto tiny = make_initial_field(c.initial, c.omega_grid, 1);
    CHECK_THROWS_AS(volterra_solve(Trajectory::frozen(tiny, {0.0, 2.0}), 0.2, tg), ConfigError);
}

TEST_CASE("Volterra solve on the frozen datum matches a fine rectangle-rule solver")
{
    auto c = short_config(0.2, 5.0);
    const cplx eps1{0.1, 0.0}, eps2{0.03, 0.02};
    c.initial = InitialDatum::gaussian(1.0, {{1, eps1}, {2, eps2}});
    const auto f0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
    const TimeGrid tg{c.dt, c.n_steps()};
    const auto z = volterra_solve(Trajectory::frozen(f0, {0.0, c.t_max}), c.mu, tg);

    // first-order oracle at dt/10 and dt/20, combined by Richardson extrapolation
    const auto r10 = rectangle_volterra(c.mu, eps1, eps2, c.dt / 10.0, 10 * tg.n);
    const auto r20 = rectangle_volterra(c.mu, eps1, eps2, c.dt / 20.0, 20 * tg.n);
    double err = 0.0;
    for (std::size_t j = 0; j <= tg.n; ++j) {
        const cplx oracle = 2.0 * r20[20 * j] - r10[10 * j];
        err = std::max(err, std::abs(z[j].z1 - oracle));
    }
    CHECK(err < 1e-5);
}

TEST_CASE("linear transport: zero forcing keeps f0, direct-run forcing reproduces the run")
{
    const auto c = short_config(0.2, 5.0);
    const auto f0 = make_initial_field(c.initial, c.omega_grid, c.k_max);

    OrderSeries zero;
    for (std::size_t i = 0; i <= c.n_steps(); ++i)
        zero.push_back(OrderSample::at(double(i) * c.dt, {}));
    const auto frozen = linear_transport_solve(zero, f0, c.mu, c, 0.5);
    for (const auto& s : frozen.snapshots()) {
        auto a = s.values();
        auto b = f0.values();
        for (std::size_t i = 0; i < a.size(); ++i)
            REQUIRE(a[i] == b[i]);
    }

    const auto direct = run(c);
    const auto tr = linear_transport_solve(direct.series, f0, c.mu, c, c.snapshot_every);
    REQUIRE(tr.size() == direct.snapshots.size());
    double err = 0.0;
    for (std::size_t s = 0; s < tr.size(); ++s) {
        auto a = tr.snapshots()[s].values();
        auto b = direct.snapshots[s].values();
        for (std::size_t i = 0; i < a.size(); ++i)
            err = std::max(err, std::abs(a[i] - b[i]));
        // mode zero stays g in every iterate
        for (std::size_t j = 0; j < f0.grid().size(); ++j)
            REQUIRE(tr.snapshots()[s](0, j) == f0(0, j));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("Picard with zero coupling converges at once")
{
    const auto c = short_config(0.0, 5.0);
    const auto r = iterate(c, 1e-6, 10);
    CHECK(r.converged);
    REQUIRE(r.records.size() == 1);
    const auto f0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
    for (const auto& s : r.records[0].z_series)
        CHECK(s.z1 == evaluate_spectral_at(f0, 1, s.t));
    CHECK(r.records[0].delta_h == 0.0);
    CHECK(fixed_point_check(r.records[0]) < 1e-12);
}

TEST_CASE("Picard on the reference configuration")
{
    const auto& r = reference_picard();
    REQUIRE(r.converged);
    const auto& rec = r.records;
    for (std::size_t n = 1; n < rec.size(); ++n)
        CHECK(rec[n].delta_z <= 0.5 * rec[n - 1].delta_z);

    const auto direct = run(RunConfig::reference());
    double err = 0.0;
    for (std::size_t j = 0; j < direct.series.size(); ++j)
        err = std::max(err, std::abs(direct.series[j].z1 - rec.back().z_series[j].z1));
    CHECK(err <= 1e-4);

    const double last = fixed_point_check(rec.back());
    CHECK(last <= 1e-4);
    CHECK(fixed_point_check(rec.front()) > last);

    for (const auto& x : rec) {
        CHECK(x.triple_norm_h <= 2.0 * rec.front().triple_norm_h);
        CHECK(x.triple_norm_R <= 2.0 * rec.front().triple_norm_R);
        CHECK(x.delta_z >= 0.0);
        CHECK(x.delta_h >= 0.0);
    }
}

TEST_CASE("strong coupling is reported, not asserted")
{
    auto c = short_config(5.0, 4.0);
    try {
        const auto r = iterate(c, 1e-6, 4);
        MESSAGE("mu=5: converged=" << r.converged << " after " << r.records.size()
                                   << " iterations, last delta_z=" << r.records.back().delta_z);
    } catch (const NumericalError& e) {
        MESSAGE("mu=5: aborted: " << std::string(e.what()));
    }
}
