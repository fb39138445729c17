#include <doctest.h>

#include "dephase/core.hpp"
#include "dephase/errors.hpp"
#include "dephase/norms.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

using namespace dephase;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// weight evaluated directly in 50-digit arithmetic
double weight_oracle(double lambda, double p, int k, double eta)
{
    const big x = boost::multiprecision::sqrt(big(1) + big(k) * k + big(eta) * eta);
    return static_cast<double>(boost::multiprecision::exp(big(lambda) * x)
                               * boost::multiprecision::pow(x, big(p)));
}

OrderSeries sampled(double (*R)(double), double t_max, double dt)
{
    OrderSeries s;
    for (std::size_t i = 0; double(i) * dt <= t_max + 1e-12; ++i) {
        const double t = double(i) * dt;
        s.push_back(OrderSample::at(t, {R(t), 0.0}));
    }
    return s;
}

} // namespace

TEST_CASE("bracket and its triangle-type inequality")
{
    CHECK(bracket(0.0) == 1.0);
    CHECK(bracket2(3, 4.0) == doctest::Approx(std::sqrt(26.0)));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_int_distribution<int> ki(-20, 20);
    for (int i = 0; i < 1000; ++i) {
        const int k = ki(rng), l = ki(rng);
        const double e = u(rng), x = u(rng);
        CHECK(bracket2(k + l, e + x) <= bracket2(k, e) + bracket2(l, x) + 1e-12);
    }
}

TEST_CASE("weight A: trivial values and extended-precision oracle")
{
    CHECK(weight_A(0.0, 0.0, 5, -3.0) == 1.0);
    CHECK(weight_A(1.0, 2.0, 0, 0.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    const double expect = std::exp(0.5 * std::sqrt(26.0)) * std::pow(26.0, 1.5);
    CHECK(weight_A(0.5, 3.0, 3, 4.0) == doctest::Approx(expect).epsilon(1e-12));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam(0.0, 2.0), pp(0.0, 6.0), ee(-40.0, 40.0);
    std::uniform_int_distribution<int> kk(-30, 30);
    for (int i = 0; i < 200; ++i) {
        const double l = lam(rng), p = pp(rng), e = ee(rng);
        const int k = kk(rng);
        const double oracle = weight_oracle(l, p, k, e);
        CHECK(std::abs(weight_A(l, p, k, e) - oracle) <= 1e-12 * oracle);
    }
    CHECK_THROWS_AS(weight_A(10.0, 3.0, 0, 1e3), NumericalError);
}

TEST_CASE("norm of a single entry, zero field, homogeneity")
{
    const EtaGrid eta(4.0, 9); // eta = 0 at index 4
    SpectralField f(eta, 2);
    CHECK(norm_lambda_p(f, 0.3, 2.0).value == 0.0);
    const cplx c{0.3, -0.4};
    f(1, 4) = c;
    const double want = std::abs(c) * std::exp(0.7 * std::sqrt(2.0)) * std::pow(2.0, 1.5);
    const auto v = norm_lambda_p(f, 0.7, 3.0);
    CHECK(v.value == doctest::Approx(want).epsilon(1e-14));
    CHECK(v.argsup_k == 1);
    CHECK(v.argsup_eta == 0.0);
    for (auto& x : f.values())
        x *= 3.0;
    CHECK(norm_lambda_p(f, 0.7, 3.0).value == doctest::Approx(3.0 * want).epsilon(1e-14));
}

TEST_CASE("norm is monotone in lambda and p")
{
    const EtaGrid eta(10.0, 101);
    SpectralField f(eta, 3);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    for (auto& v : f.values())
        v = {n01(rng), n01(rng)};
    double prev = 0.0;
    for (double l : {0.0, 0.1, 0.2, 0.4}) {
        const double v = norm_lambda_p(f, l, 1.0).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(norm_lambda_p(f, 0.2, 2.0).value >= norm_lambda_p(f, 0.2, 1.0).value);
}

TEST_CASE("Gaussian mode-zero norm matches a dense scan")
{
    const EtaGrid eta(12.0, 2401);
    SpectralField f(eta, 0);
    for (std::size_t i = 0; i < eta.size(); ++i)
        f(0, i) = std::exp(-0.5 * eta[i] * eta[i]);
    // 10x refined scan of the same weighted profile, written out independently
    double scan = 0.0;
    const std::size_t m = 10 * (eta.size() - 1) + 1;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = -12.0 + 24.0 * double(i) / double(m - 1);
        const double x = std::sqrt(1.0 + e * e);
        scan = std::max(scan, std::exp(0.3 * x) * x * std::exp(-0.5 * e * e));
    }
    CHECK(norm_lambda_p(f, 0.3, 1.0).value == doctest::Approx(scan).epsilon(1e-6));
}

TEST_CASE("r_{lambda,p} and beta")
{
    const auto s = sampled([](double t) { return std::exp(-t); }, 5.0, 0.25);
    for (double r : r_lambda_p(s, 1.0, 0.0))
        CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
    const auto r0 = r_lambda_p(s, 0.0, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(r0[i] == s[i].R);

    // free-flow Gaussian r_{0.5,3}; peak located by dense scan
    const auto g = sampled([](double t) { return 0.1 * std::exp(-0.5 * t * t); }, 5.0, 0.001);
    const auto rg = r_lambda_p(g, 0.5, 3.0);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < rg.size(); ++i) {
        const double t = g[i].t;
        CHECK(rg[i] == doctest::Approx(0.1 * std::exp(-0.5 * t * t + 0.5 * t) * std::pow(1 + t * t, 1.5))
                           .epsilon(1e-12));
        if (rg[i] > rg[imax])
            imax = i;
    }
    CHECK(g[imax].t > 0.5);
    CHECK(g[imax].t < 2.5);

    WeightParams w = WeightParams::defaults();
    CHECK(beta(0.0, 0.2, w) == doctest::Approx(w.lambda0 - 0.2));
    w.lambda0 = 1.0;
    w.a = 0.5;
    CHECK(beta(1e12, 0.0, w) == doctest::Approx(1.0 - 0.25 * pi).epsilon(1e-9));
    CHECK(1.0 - 0.25 * pi == doctest::Approx(0.2146).epsilon(1e-3));
    for (double t : {0.0, 1.0, 2.0, 8.0})
        for (double l : {0.0, 0.1, 0.3}) {
            CHECK(beta(t + 0.5, l, w) < beta(t, l, w));
            CHECK(beta(t, l + 0.1, w) < beta(t, l, w));
        }
}

TEST_CASE("weight params validation names the constraint")
{
    WeightParams w = WeightParams::defaults();
    w.a = 2.0 * w.lambda0 / pi;
    try {
        w.validate();
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("a<2*lambda0/pi") != std::string::npos);
    }
}

TEST_CASE("triple norm of a frozen trajectory is attained at t = 0")
{
    const EtaGrid eta(6.0, 61);
    SpectralField h0(eta, 2, 0.0);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (int k = -2; k <= 2; ++k)
        for (std::size_t i = 0; i < eta.size(); ++i)
            h0(k, i) = cplx{n01(rng), n01(rng)} * std::exp(-std::abs(eta[i]) - std::abs(k));
    std::vector<SpectralField> traj;
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        traj.push_back(h0);
        traj.back().set_time(t);
    }
    const auto w = WeightParams::defaults();
    const auto tn = triple_norm_h(traj, w);
    double want1 = 0.0, want2 = 0.0;
    for (double l : w.lambda_samples) {
        want1 = std::max(want1, std::sqrt(w.lambda0 - l) * norm_lambda_p(h0, l, 1.0).value);
        want2 = std::max(want2, std::sqrt(w.lambda0 - l) * norm_lambda_p(h0, l, w.gamma).value);
    }
    CHECK(tn.first.value == doctest::Approx(want1).epsilon(1e-14));
    CHECK(tn.second.value == doctest::Approx(want2).epsilon(1e-14));
    CHECK(tn.first.t == 0.0);

    for (auto& s : traj)
        for (auto& v : s.values())
            v = 0.0;
    CHECK(triple_norm_h(traj, w).value() == 0.0);
}

TEST_CASE("triple norm of R: zero, free flow and the boundary profile")
{
    auto w = WeightParams::defaults(50);
    w.a = 0.25;
    const auto zero = sampled([](double) { return 0.0; }, 10.0, 0.1);
    CHECK(triple_norm_R(zero, w).value == 0.0);

    const auto g = sampled([](double t) { return 0.1 * std::exp(-0.5 * t * t); }, 10.0, 0.01);
    const auto tn = triple_norm_R(g, w);
    double scan = 0.0;
    for (double l : w.lambda_samples)
        for (int i = 0; i <= 1000; ++i) {
            const double t = 0.01 * i;
            if (w.lambda0 - l - w.a * std::atan(t) <= 0.0)
                continue;
            scan = std::max(scan, 0.1 * std::exp(-0.5 * t * t + l * t) * std::pow(1 + t * t, 1.5));
        }
    CHECK(std::isfinite(tn.value));
    CHECK(tn.value == doctest::Approx(scan).epsilon(1e-12));

    // R = e^{-lambda0 t} <t>^{-gamma}: every admissible sample stays below 1, t = 0 gives exactly 1
    const auto edge = sampled([](double t) { return std::exp(-0.5 * t) * std::pow(1 + t * t, -1.5); },
                              10.0, 0.01);
    const auto te = triple_norm_R(edge, w);
    CHECK(te.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(te.t == 0.0);
}

TEST_CASE("free-flow triple norm is stable under sample refinement")
{
    const OmegaGrid grid(8.0, 257);
    const EtaGrid eta(25.0, 257);
    const auto datum = InitialDatum::gaussian(1.0, {{1, {0.1, 0.0}}});
    const auto h = make_initial_field(datum, grid, 2);
    auto traj_at = [&](double dt) {
        std::vector<SpectralField> out;
        for (std::size_t i = 0; double(i) * dt <= 10.0 + 1e-12; ++i) {
            auto s = mixed_to_spectral(h, eta);
            s.set_time(double(i) * dt);
            out.push_back(std::move(s));
        }
        return out;
    };
    const double coarse = triple_norm_h(traj_at(0.5), WeightParams::defaults(10)).value();
    const double fine = triple_norm_h(traj_at(0.25), WeightParams::defaults(20)).value();
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(fine - coarse) <= 0.02 * coarse);
}
