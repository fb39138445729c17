#include <doctest.h>

#include "dephase/config.hpp"
#include "dephase/errors.hpp"
#include "dephase/estimates.hpp"
#include "dephase/solver.hpp"

#include <cmath>

using namespace dephase;

namespace {

RunConfig gaussian_config(double mu, double t_max)
{
    auto c = RunConfig::reference();
    c.mu = mu;
    c.t_max = t_max;
    c.fit_t_lo = 0.0;
    c.fit_t_hi = t_max;
    return c;
}

double gauss_pdf(double w) { return std::exp(-0.5 * w * w) / std::sqrt(2.0 * pi); }

} // namespace

TEST_CASE("order parameter at t = 0 and for the incoherent state")
{
    const auto c = RunConfig::reference();
    const auto h = make_initial_field(c.initial, c.omega_grid, c.k_max);
    CHECK(std::abs(order_parameter(h, 0.0) - cplx{0.1, 0.0}) < 1e-14);

    auto inc = c;
    inc.initial.perturbation.clear();
    inc.t_max = 2.0;
    const auto res = run(inc);
    for (const auto& s : res.series)
        CHECK(s.R == 0.0);
}

TEST_CASE("free-flow order parameter is the Gaussian transform")
{
    auto c = gaussian_config(0.0, 5.0);
    const auto res = run(c);
    double err = 0.0;
    for (const auto& s : res.series)
        err = std::max(err, std::abs(s.z1 - cplx{0.1 * std::exp(-0.5 * s.t * s.t), 0.0}));
    CHECK(err < 1e-8);
    // field itself frozen
    const auto h0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
    auto a = res.final_field.values();
    auto b = h0.values();
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE(a[i] == b[i]);
}

TEST_CASE("right-hand side: mode zero row vanishes, zero coupling is free flow")
{
    const auto c = RunConfig::reference();
    const auto h = make_initial_field(c.initial, c.omega_grid, c.k_max);
    const auto L = apply_L(h, {0.07, -0.02}, 1.3, 0.2);
    for (const auto& v : L.row(0))
        CHECK(v == cplx{});
    CHECK(apply_L(h, {}, 1.3, 0.2).sup_abs() == 0.0);
    CHECK(apply_L(h, {0.1, 0.0}, 1.3, 0.0).sup_abs() == 0.0);
}

TEST_CASE("right-hand side agrees with the shifted spectral form")
{
    // only h_0 = g populated: L h has rows +-1 only, and the transform of row 1
    // is (mu/2) c ghat(eta - t) by the shift theorem
    const OmegaGrid grid(8.0, 257);
    const EtaGrid eta(25.0, 257);
    const auto h = make_initial_field(InitialDatum::gaussian(1.0), grid, 4);
    const cplx c{0.06, 0.03};
    const double t = 2.5, mu = 0.2;
    const auto L = apply_L(h, c, t, mu);
    for (std::size_t j = 0; j < grid.size(); ++j)
        CHECK(std::abs(L(1, j) - 0.5 * mu * c * std::polar(1.0, t * grid[j]) * gauss_pdf(grid[j])) < 1e-16);
    for (int k : {-4, -3, -2, 0, 2, 3, 4})
        for (const auto& v : L.row(k))
            CHECK(v == cplx{});
    const auto S = mixed_to_spectral(L, eta);
    double err = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double s = eta[i] - t;
        err = std::max(err, std::abs(S(1, i) - 0.5 * mu * c * std::exp(-0.5 * s * s)));
        err = std::max(err, std::abs(S(-1, i) - 0.5 * mu * std::conj(c) * std::exp(-0.5 * (eta[i] + t) * (eta[i] + t))));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("RK4 local error scales with the fifth power of dt")
{
    auto c = RunConfig::reference();
    const auto h = make_initial_field(c.initial, c.omega_grid, c.k_max);
    const double e1 = richardson_local_error(h, 0.4, c.mu);
    const double e2 = richardson_local_error(h, 0.2, c.mu);
    INFO("errors " << e1 << " " << e2);
    CHECK(e1 / e2 >= 24.0);
    CHECK(e1 / e2 <= 40.0);
}

TEST_CASE("mode zero is conserved exactly and reality is preserved")
{
    auto c = gaussian_config(0.2, 3.0);
    const auto h0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
    const auto res = run(c);
    for (const auto& s : res.snapshots)
        for (std::size_t j = 0; j < h0.grid().size(); ++j)
            REQUIRE(s(0, j) == h0(0, j));
    CHECK(res.max_reality_drift < 1e-15);
    CHECK(res.snapshots.front().time() == 0.0);
    CHECK(res.snapshots.back().time() == 3.0);
    CHECK(res.series.size() == 301);
}

TEST_CASE("Gaussian coupled run decays exponentially on [5, 20]")
{
    auto c = RunConfig::reference();
    const auto res = run(c);
    const auto fit = fit_decay(res.series, 5.0, 20.0);
    CHECK(fit.slope < 0.0);
    CHECK(fit.r_squared >= 0.98);
}

TEST_CASE("reconstruction of f")
{
    const OmegaGrid grid(8.0, 65);
    const auto datum = InitialDatum::gaussian(1.0, {{1, {0.1, 0.0}}, {2, {0.0, 0.05}}});
    const auto h = make_initial_field(datum, grid, 4);
    std::vector<double> theta;
    for (int i = 0; i < 16; ++i)
        theta.push_back(2.0 * pi * i / 16.0);

    auto f0 = [&](double th, double w) {
        return gauss_pdf(w) / (2.0 * pi) * (1.0 + 0.2 * std::cos(th) - 0.1 * std::sin(2.0 * th));
    };
    SUBCASE("t = 0 recovers f0")
    {
        const auto f = reconstruct_f(h, 0.0, theta);
        for (std::size_t a = 0; a < theta.size(); ++a)
            for (std::size_t j = 0; j < grid.size(); ++j)
                CHECK(std::abs(f[a * grid.size() + j] - f0(theta[a], grid[j])) < 1e-10);
    }
    SUBCASE("free flow at t = 3 is f0 transported")
    {
        RunConfig c = RunConfig::reference();
        c.mu = 0.0;
        c.t_max = 3.0;
        c.k_max = 4;
        c.omega_grid = grid;
        c.initial = datum;
        const auto res = run(c);
        const auto f = reconstruct_f(res.final_field, 3.0, theta);
        for (std::size_t a = 0; a < theta.size(); ++a)
            for (std::size_t j = 0; j < grid.size(); ++j)
                CHECK(std::abs(f[a * grid.size() + j] - f0(theta[a] - 3.0 * grid[j], grid[j])) < 1e-10);
    }
    SUBCASE("incoherent state is g / 2 pi")
    {
        const auto hi = make_initial_field(InitialDatum::gaussian(1.0), grid, 4);
        const auto f = reconstruct_f(hi, 7.0, theta);
        for (std::size_t a = 0; a < theta.size(); ++a)
            for (std::size_t j = 0; j < grid.size(); ++j)
                CHECK(f[a * grid.size() + j] == doctest::Approx(gauss_pdf(grid[j]) / (2.0 * pi)).epsilon(1e-13));
    }
}

TEST_CASE("a coarse step produces a large Richardson error")
{
    auto c = RunConfig::reference();
    const auto h = make_initial_field(c.initial, c.omega_grid, c.k_max);
    CHECK(richardson_local_error(h, 1.0, c.mu) > 1e-8);
    CHECK(richardson_local_error(h, c.dt, c.mu) < 1e-12);
}

TEST_CASE("run configuration validation")
{
    auto c = RunConfig::reference();
    c.t_max = 20.005;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::reference();
    c.eta_grid = EtaGrid(10.0, 257);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig::reference();
    c.mu = -1.0;
    CHECK_THROWS_AS(run(c), ConfigError);
}
