#include "dephase/oracle.hpp"

#include "dephase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

namespace dephase {

cplx mean_field(const ParticleEnsemble& ens)
{
    cplx acc{};
    for (double th : ens.thetas)
        acc += std::polar(1.0, th);
    return acc / double(ens.size());
}

OrderSample particle_order(const ParticleEnsemble& ens)
{
    return OrderSample::at(ens.t, std::conj(mean_field(ens)));
}

namespace {

double wrap_angle(double th)
{
    th = std::fmod(th, 2.0 * pi);
    if (th < 0.0)
        th += 2.0 * pi;
    if (th >= 2.0 * pi)
        th = 0.0;
    return th;
}

/// Inverse CDF of a density tabulated on a uniform grid (trapezoidal cumulative).
class TabulatedQuantile {
public:
    TabulatedQuantile(std::vector<double> x, std::vector<double> pdf) : x_(std::move(x))
    {
        cdf_.assign(x_.size(), 0.0);
        for (std::size_t i = 1; i < x_.size(); ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (x_[i] - x_[i - 1]);
        const double total = cdf_.back();
        if (!(total > 0.0))
            throw DatumError("frequency density is not normalizable");
        for (auto& c : cdf_)
            c /= total;
    }

    double operator()(double u) const
    {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin())
            return x_.front();
        if (it == cdf_.end())
            return x_.back();
        const std::size_t i = std::size_t(it - cdf_.begin());
        const double w = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
        return x_[i - 1] + w * (x_[i] - x_[i - 1]);
    }

private:
    std::vector<double> x_;
    std::vector<double> cdf_;
};

TabulatedQuantile frequency_quantile(const InitialDatum& datum, double window)
{
    double lo, hi;
    if (datum.family == FrequencyFamily::tabulated) {
        lo = datum.table_omega.front();
        hi = datum.table_omega.back();
    } else {
        if (!(window > 0.0))
            throw ConfigError("an omega window is required to tabulate this frequency family");
        lo = -window;
        hi = window;
    }
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const OmegaGrid fine(half, 1u << 17 | 1u);
    std::vector<double> x(fine.size()), pdf;
    for (std::size_t j = 0; j < fine.size(); ++j)
        x[j] = mid + fine[j];
    if (datum.family == FrequencyFamily::lorentzian) {
        pdf = tabulate_frequencies(datum, fine).g; // same smooth cutoff as the kinetic grid
    } else {
        pdf.resize(x.size());
        for (std::size_t j = 0; j < x.size(); ++j)
            pdf[j] = datum.density(x[j]);
    }
    return TabulatedQuantile(std::move(x), std::move(pdf));
}

/// Inverse of F(theta) = (theta + sum_k 2 Re(eps_k (e^{ik theta} - 1)/(ik))) / (2 pi).
class PhaseQuantile {
public:
    explicit PhaseQuantile(const InitialDatum& datum) : modes_(datum.positive_modes())
    {
        const std::size_t n = std::size_t(4096 * std::max(1, datum.highest_mode()));
        grid_.resize(n + 1);
        cdf_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            grid_[i] = 2.0 * pi * double(i) / double(n);
            cdf_[i] = cdf(grid_[i]);
        }
        for (std::size_t i = 1; i <= n; ++i)
            if (cdf_[i] < cdf_[i - 1])
                throw DatumError("conditional phase density is negative");
    }

    double cdf(double th) const
    {
        double v = th;
        for (const auto& p : modes_)
            v += 2.0 * std::real(p.amplitude * (std::polar(1.0, p.mode * th) - 1.0)
                                 / cplx(0.0, double(p.mode)));
        return v / (2.0 * pi);
    }

    double pdf(double th) const
    {
        double v = 1.0;
        for (const auto& p : modes_)
            v += 2.0 * std::real(p.amplitude * std::polar(1.0, p.mode * th));
        return v / (2.0 * pi);
    }

    double operator()(double u) const
    {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t i = std::clamp<std::size_t>(std::size_t(it - cdf_.begin()), 1, cdf_.size() - 1);
        const double w = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
        double th = grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
        for (int it_n = 0; it_n < 4; ++it_n) {
            const double p = pdf(th);
            if (!(p > 1e-12))
                break;
            th = std::clamp(th - (cdf(th) - u) / p, grid_[i - 1], grid_[i]);
        }
        return wrap_angle(th);
    }

private:
    std::vector<Perturbation> modes_;
    std::vector<double> grid_;
    std::vector<double> cdf_;
};

} // namespace

ParticleEnsemble sample_ensemble(const InitialDatum& datum, std::size_t n, std::uint64_t seed,
                                 double omega_window)
{
    if (n < 2)
        throw ConfigError("particle ensemble needs n >= 2");
    datum.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shift_omega = unit(rng);
    const double shift_theta = unit(rng);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);

    ParticleEnsemble ens;
    ens.thetas.resize(n);
    ens.omegas.resize(n);

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = (double(i) + shift_omega) / double(n);

    if (datum.family == FrequencyFamily::gaussian && !(omega_window > 0.0)) {
        const boost::math::normal_distribution<double> normal(0.0, datum.sigma);
        for (std::size_t i = 0; i < n; ++i)
            ens.omegas[i] = boost::math::quantile(normal, std::clamp(u[i], 1e-300, 1.0 - 1e-16));
    } else if (datum.family == FrequencyFamily::lorentzian && !(omega_window > 0.0)) {
        for (std::size_t i = 0; i < n; ++i)
            ens.omegas[i] = datum.delta * std::tan(pi * (u[i] - 0.5));
    } else {
        const auto q = frequency_quantile(datum, omega_window);
        for (std::size_t i = 0; i < n; ++i)
            ens.omegas[i] = q(u[i]);
    }

    const PhaseQuantile phase(datum);
    for (std::size_t i = 0; i < n; ++i) {
        double v = shift_theta + double(i + 1) * golden;
        v -= std::floor(v);
        ens.thetas[i] = phase(v);
    }
    return ens;
}

namespace {

void velocity(const std::vector<double>& thetas, const std::vector<double>& omegas, double mu,
              std::vector<double>& out)
{
    const std::size_t n = thetas.size();
    std::vector<cplx> e(n);
    cplx Z{};
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = std::polar(1.0, thetas[i]);
        Z += e[i];
    }
    Z /= double(n);
    const cplx Zc = std::conj(Z);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = omegas[i] - mu * std::imag(e[i] * Zc);
}

} // namespace

ParticleEnsemble particle_step(const ParticleEnsemble& ens, double mu, double dt)
{
    if (!(dt > 0.0))
        throw ConfigError("dt>0 violated");
    const std::size_t n = ens.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
    velocity(ens.thetas, ens.omegas, mu, k1);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = ens.thetas[i] + 0.5 * dt * k1[i];
    velocity(stage, ens.omegas, mu, k2);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = ens.thetas[i] + 0.5 * dt * k2[i];
    velocity(stage, ens.omegas, mu, k3);
    for (std::size_t i = 0; i < n; ++i)
        stage[i] = ens.thetas[i] + dt * k3[i];
    velocity(stage, ens.omegas, mu, k4);

    ParticleEnsemble next;
    next.omegas = ens.omegas;
    next.thetas.resize(n);
    next.t = ens.t + dt;
    for (std::size_t i = 0; i < n; ++i)
        next.thetas[i] =
            wrap_angle(ens.thetas[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    return next;
}

OrderSeries particle_run(ParticleEnsemble ens, double mu, double dt, double t_max)
{
    const std::size_t steps = std::size_t(std::llround(t_max / dt));
    OrderSeries out;
    out.reserve(steps + 1);
    ens.t = 0.0;
    out.push_back(particle_order(ens));
    for (std::size_t i = 1; i <= steps; ++i) {
        ens = particle_step(ens, mu, dt);
        ens.t = double(i) * dt;
        out.push_back(particle_order(ens));
    }
    return out;
}

OrderSeries particle_run(const InitialDatum& datum, std::size_t n, double mu, double dt,
                         double t_max, std::uint64_t seed, double omega_window)
{
    return particle_run(sample_ensemble(datum, n, seed, omega_window), mu, dt, t_max);
}

FreeFlowR exact_free_flow_R(const InitialDatum& datum, double t)
{
    cplx eps1{};
    for (const auto& p : datum.positive_modes())
        if (p.mode == 1)
            eps1 = p.amplitude;
    if (auto g = datum.closed_form_ghat(t))
        return {std::abs(eps1) * std::abs(*g), true};

    const double lo = datum.table_omega.front(), hi = datum.table_omega.back();
    const OmegaGrid grid(0.5 * (hi - lo), 8193);
    const double mid = 0.5 * (hi + lo);
    cplx acc{};
    double mass = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double w = mid + grid[j];
        const double g = datum.density(w);
        acc += grid.weight(j) * g * std::polar(1.0, -t * w);
        mass += grid.weight(j) * g;
    }
    return {std::abs(eps1) * std::abs(acc) / mass, false};
}

} // namespace dephase
