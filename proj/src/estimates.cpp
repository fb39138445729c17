#include "dephase/estimates.hpp"

#include "dephase/errors.hpp"
#include "dephase/picard.hpp"
#include "dephase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dephase {

DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                        double t_hi, double floor)
{
    DecayFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi)
            continue;
        if (!(y[i] > floor)) {
            fit.shrunk = true;
            break;
        }
        xs.push_back(t[i]);
        ys.push_back(std::log(y[i]));
    }
    if (xs.size() < 3)
        throw NumericalError("decay fit needs at least 3 samples above the floor in the window");
    if (fit.shrunk)
        fit.t_hi = xs.back();

    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.n_samples = xs.size();
    return fit;
}

DecayFit fit_decay(const OrderSeries& series, double t_lo, double t_hi, double floor)
{
    std::vector<double> t, R;
    t.reserve(series.size());
    R.reserve(series.size());
    for (const auto& s : series) {
        t.push_back(s.t);
        R.push_back(s.R);
    }
    return fit_log_linear(t, R, t_lo, t_hi, floor);
}

void RatioTrack::push(double t, double ratio)
{
    times.push_back(t);
    ratios.push_back(ratio);
    running_max.push_back(running_max.empty() ? ratio : std::max(running_max.back(), ratio));
}

double RatioTrack::argmax_t() const
{
    if (ratios.empty())
        return 0.0;
    return times[std::size_t(std::max_element(ratios.begin(), ratios.end()) - ratios.begin())];
}

RatioTrack check_nesting(const std::vector<SpectralField>& fields,
                         const std::vector<std::pair<double, double>>& lambda_pairs, double p)
{
    RatioTrack track{"nesting", {}, {}, {}};
    for (const auto& f : fields) {
        double worst = 0.0;
        for (const auto& [lambda, lambda_prime] : lambda_pairs) {
            if (!(lambda_prime > lambda))
                throw ConfigError("nesting check needs lambda' > lambda");
            const double lhs = norm_lambda_p(f, lambda, p + 1.0).value;
            const double rhs = norm_lambda_p(f, lambda_prime, p).value / (lambda_prime - lambda);
            if (lhs > rhs) {
                std::ostringstream msg;
                msg << "nesting inequality violated at t=" << f.time() << ", lambda=" << lambda
                    << ", lambda'=" << lambda_prime << ": " << lhs << " > " << rhs;
                throw InequalityViolation(msg.str());
            }
            if (rhs > 0.0)
                worst = std::max(worst, lhs / rhs);
        }
        track.push(f.time(), worst);
    }
    return track;
}

RatioTrack check_L_continuity(const std::vector<MixedField>& trajectory, const OrderSeries& z_series,
                              const WeightParams& params, const EtaGrid& eta)
{
    params.validate();
    const double p = params.gamma;
    RatioTrack track{"L_continuity", {}, {}, {}};
    for (const auto& h : trajectory) {
        const double t = h.time();
        const cplx z = interpolate_order(z_series, t);
        const auto Lh = mixed_to_spectral(apply_L(h, z, t, 1.0), eta);
        const auto hs = mixed_to_spectral(h, eta);
        double worst = 0.0;
        for (double lambda : params.lambda_samples) {
            const double num = norm_lambda_p(Lh, lambda, p).value;
            const double r0 = std::abs(z) * std::exp(lambda * t);
            const double rp = r0 * std::pow(bracket(t), p);
            const double den = r0 * norm_lambda_p(hs, lambda, p + 1.0).value
                               + rp * norm_lambda_p(hs, lambda, 1.0).value;
            if (num == 0.0)
                continue;
            if (!(den > 0.0))
                throw NumericalError("L continuity: zero denominator with nonzero L_t h at t="
                                     + std::to_string(t));
            worst = std::max(worst, num / den);
        }
        track.push(t, worst);
    }
    return track;
}

RatioTrack check_apriori_R(const OrderSeries& series, const std::vector<SpectralField>& h_trajectory,
                           const SpectralField& f0, const WeightParams& params, double mu)
{
    params.validate();
    const double p = params.gamma;
    const std::size_t m = h_trajectory.size();
    std::vector<double> ts(m), R(m);
    for (std::size_t i = 0; i < m; ++i) {
        ts[i] = h_trajectory[i].time();
        R[i] = std::abs(interpolate_order(series, ts[i]));
    }

    std::vector<double> worst(m, 0.0);
    for (double lambda : params.lambda_samples) {
        const double n0 = norm_lambda_p(f0, lambda, p).value;
        std::vector<double> r(m), hn(m);
        for (std::size_t i = 0; i < m; ++i) {
            r[i] = R[i] * std::exp(lambda * ts[i]) * std::pow(bracket(ts[i]), p);
            hn[i] = norm_lambda_p(h_trajectory[i], lambda, p).value;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double i1 = 0.0, i2 = 0.0;
            for (std::size_t i = 0; i + 1 <= j; ++i) {
                const double ds = ts[i + 1] - ts[i];
                auto f1 = [&](std::size_t q) {
                    return r[q] * (std::pow(bracket(ts[q]), -p) + std::pow(bracket(ts[j] - ts[q]), -p));
                };
                auto f2 = [&](std::size_t q) { return r[q] * hn[q] * std::pow(bracket(ts[q]), -p); };
                i1 += 0.5 * ds * (f1(i) + f1(i + 1));
                i2 += 0.5 * ds * (f2(i) + f2(i + 1));
            }
            const double rhs = n0 + mu * n0 * i1 + mu * i2;
            if (rhs > 0.0)
                worst[j] = std::max(worst[j], r[j] / rhs);
        }
    }
    RatioTrack track{"apriori_R", {}, {}, {}};
    for (std::size_t j = 0; j < m; ++j)
        track.push(ts[j], worst[j]);
    return track;
}

HInfinity extract_h_infinity(const std::vector<SpectralField>& trajectory, const WeightParams& params,
                             std::optional<std::pair<double, double>> window, double floor)
{
    if (trajectory.empty())
        throw ConfigError("h_infinity extraction needs a nonempty trajectory");
    const auto& last = trajectory.back();
    HInfinity out{last, {}, {}, {}, false, false};
    for (const auto& h : trajectory) {
        SpectralField diff(h.grid(), h.k_max(), h.time());
        auto d = diff.values();
        auto a = h.values();
        auto b = last.values();
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = a[i] - b[i];
        out.times.push_back(h.time());
        out.distances.push_back(norm_lambda_p(diff, 0.0, params.gamma).value);
    }
    const auto [lo, hi] = window.value_or(std::pair{trajectory.front().time(), 0.5 * last.time()});
    double dmax = 0.0;
    for (std::size_t i = 0; i < out.times.size(); ++i)
        if (out.times[i] >= lo && out.times[i] <= hi)
            dmax = std::max(dmax, out.distances[i]);
    if (dmax <= floor) {
        out.frozen = true;
        out.decaying = true;
        return out;
    }
    try {
        out.fit = fit_log_linear(out.times, out.distances, lo, hi, floor);
    } catch (const NumericalError&) {
        return out; // too few samples: reported as non-decaying
    }
    // decay means a clean exponential over the window that loses at least two decades
    const double span = out.fit.t_hi - out.fit.t_lo;
    out.decaying = out.fit.slope < 0.0 && out.fit.r_squared >= 0.9
                   && -out.fit.slope * span >= std::log(100.0);
    return out;
}

std::vector<double> mode_amplitudes(const MixedField& field)
{
    std::vector<double> a(std::size_t(field.k_max() + 1), 0.0);
    for (int k = 0; k <= field.k_max(); ++k)
        for (const auto& v : field.row(k))
            a[std::size_t(k)] = std::max(a[std::size_t(k)], std::abs(v));
    return a;
}

double geometric_mode_ratio(const std::vector<double>& amplitudes, double floor)
{
    if (amplitudes.size() < 3 || !(amplitudes[1] > floor))
        return 0.0;
    double q = 0.0;
    for (std::size_t k = 2; k < amplitudes.size(); ++k) {
        if (!(amplitudes[k] > floor))
            continue;
        q = std::max(q, std::pow(amplitudes[k] / amplitudes[1], 1.0 / double(k - 1)));
    }
    return q;
}

} // namespace dephase
