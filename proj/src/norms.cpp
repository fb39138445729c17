#include "dephase/norms.hpp"

#include "dephase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dephase {

WeightParams WeightParams::defaults(std::size_t n_lambda)
{
    WeightParams w;
    w.lambda0 = 0.5;
    w.a = 0.5 * (2.0 * w.lambda0 / pi);
    w.gamma = 3.0;
    for (std::size_t i = 0; i < n_lambda; ++i)
        w.lambda_samples.push_back(w.lambda0 * double(i) / double(n_lambda));
    return w;
}

void WeightParams::validate() const
{
    if (!(lambda0 > 0.0))
        throw ConfigError("weights: lambda0 must be positive");
    if (!(a > 0.0))
        throw ConfigError("weights: a must be positive");
    if (!(a < 2.0 * lambda0 / pi))
        throw ConfigError("weights: a<2*lambda0/pi violated (a = " + std::to_string(a)
                          + ", 2*lambda0/pi = " + std::to_string(2.0 * lambda0 / pi) + ")");
    if (!(gamma >= 3.0))
        throw ConfigError("weights: gamma>=3 violated");
    if (lambda_samples.empty())
        throw ConfigError("weights: lambda_samples is empty");
    for (double l : lambda_samples)
        if (!(l >= 0.0 && l < lambda0))
            throw ConfigError("weights: lambda samples must lie in [0, lambda0)");
    if (!std::is_sorted(lambda_samples.begin(), lambda_samples.end()))
        throw ConfigError("weights: lambda_samples must be ascending");
    if (!std::is_sorted(t_samples.begin(), t_samples.end()))
        throw ConfigError("weights: t_samples must be ascending");
}

double bracket(double t) { return std::sqrt(1.0 + t * t); }

double bracket2(int k, double eta) { return std::sqrt(1.0 + double(k) * double(k) + eta * eta); }

double log_weight_A(double lambda, double p, int k, double eta)
{
    const double b = bracket2(k, eta);
    return lambda * b + p * std::log(b);
}

double weight_A(double lambda, double p, int k, double eta)
{
    const double lw = log_weight_A(lambda, p, k, eta);
    if (lw > std::log(std::numeric_limits<double>::max()))
        throw NumericalError("weight A^{lambda,p} overflows at k=" + std::to_string(k)
                             + ", eta=" + std::to_string(eta)
                             + ": lambda too large for the lattice");
    return std::exp(lw);
}

NormValue norm_lambda_p(const SpectralField& field, double lambda, double p)
{
    const auto& eta = field.grid();
    NormValue best;
    for (int k = -field.k_max(); k <= field.k_max(); ++k) {
        auto row = field.row(k);
        for (std::size_t j = 0; j < eta.size(); ++j) {
            const double m = std::abs(row[j]);
            if (!std::isfinite(m))
                throw NumericalError("norm of a non-finite spectral field");
            if (m == 0.0)
                continue;
            const double v = weight_A(lambda, p, k, eta[j]) * m;
            if (v > best.value) {
                best.value = v;
                best.argsup_k = k;
                best.argsup_eta = eta[j];
            }
        }
    }
    return best;
}

std::vector<double> r_lambda_p(const OrderSeries& series, double lambda, double p)
{
    std::vector<double> r(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double t = series[i].t;
        r[i] = series[i].R * std::exp(lambda * t) * std::pow(bracket(t), p);
    }
    return r;
}

double beta(double t, double lambda, const WeightParams& params)
{
    return params.lambda0 - lambda - params.a * std::atan(t);
}

namespace {

bool sampled_time(const WeightParams& params, double t)
{
    if (params.t_samples.empty())
        return true;
    return std::any_of(params.t_samples.begin(), params.t_samples.end(),
                       [t](double s) { return std::abs(s - t) <= 1e-9 * std::max(1.0, t); });
}

} // namespace

TripleNormH triple_norm_h(const std::vector<SpectralField>& trajectory, const WeightParams& params)
{
    params.validate();
    TripleNormH out;
    bool admissible = false;
    for (const auto& h : trajectory) {
        const double t = h.time();
        if (!sampled_time(params, t))
            continue;
        for (double lambda : params.lambda_samples) {
            const double b = beta(t, lambda, params);
            if (!(b > 0.0))
                continue;
            admissible = true;
            const double sb = std::sqrt(b);
            const double v1 = sb * norm_lambda_p(h, lambda, 1.0).value;
            const double v2 = sb * norm_lambda_p(h, lambda, params.gamma).value / bracket(t);
            if (v1 > out.first.value)
                out.first = {v1, lambda, t};
            if (v2 > out.second.value)
                out.second = {v2, lambda, t};
        }
    }
    if (!admissible)
        throw ConfigError("triple norm: no sampled (lambda, t) with beta(t, lambda) > 0");
    return out;
}

TripleNorm triple_norm_R(const OrderSeries& series, const WeightParams& params)
{
    params.validate();
    TripleNorm out;
    for (const auto& s : series) {
        if (!sampled_time(params, s.t))
            continue;
        for (double lambda : params.lambda_samples) {
            if (!(beta(s.t, lambda, params) > 0.0))
                continue;
            const double v = s.R * std::exp(lambda * s.t) * std::pow(bracket(s.t), params.gamma);
            if (v > out.value)
                out = {v, lambda, s.t};
        }
    }
    return out;
}

NormReport norm_report(const SpectralField& field, const std::vector<double>& lambdas,
                       const std::vector<double>& ps)
{
    NormReport report;
    for (double lambda : lambdas)
        for (double p : ps) {
            const auto n = norm_lambda_p(field, lambda, p);
            report.push_back({lambda, p, n.value, n.argsup_k, n.argsup_eta, field.time()});
        }
    return report;
}

} // namespace dephase
