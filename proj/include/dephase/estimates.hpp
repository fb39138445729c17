#pragma once

// Post-processing of run artifacts: decay fits, ratio trackers for the a-priori
// inequalities, and extraction of the asymptotic profile h_infinity.
//
// The inequalities involve unspecified constants C; apart from the nesting
// inequality (which has none) the trackers report ratios and their maxima, and
// the assertions are boundedness and stability under refinement.

#include "dephase/core.hpp"
#include "dephase/norms.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dephase {

struct DecayFit {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_samples = 0;
    bool shrunk = false; // window truncated where the signal fell below the floor
};

inline constexpr double decay_floor = 1e-13;

/// Least squares line through (t, log y) on [t_lo, t_hi]. The window is cut at the
/// first sample below `floor`. Throws NumericalError with fewer than 3 usable samples.
DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                        double t_hi, double floor = decay_floor);

DecayFit fit_decay(const OrderSeries& series, double t_lo, double t_hi, double floor = decay_floor);

struct RatioTrack {
    std::string name;
    std::vector<double> times;
    std::vector<double> ratios;
    std::vector<double> running_max;

    void push(double t, double ratio);
    double max() const { return running_max.empty() ? 0.0 : running_max.back(); }
    double argmax_t() const;
};

/// ||f||_{lambda,p+1} <= ||f||_{lambda',p} / (lambda' - lambda) for every field and pair.
/// Throws InequalityViolation on any violation.
RatioTrack check_nesting(const std::vector<SpectralField>& fields,
                         const std::vector<std::pair<double, double>>& lambda_pairs, double p);

/// ||L_t h||_{lambda,gamma} / (r_{lambda,0} ||h||_{lambda,gamma+1} + r_{lambda,gamma} ||h||_{lambda,1}),
/// maximized over params.lambda_samples at each snapshot.
RatioTrack check_L_continuity(const std::vector<MixedField>& trajectory, const OrderSeries& z_series,
                              const WeightParams& params, const EtaGrid& eta);

/// r_{lambda,gamma}(t) over the right-hand side of the a-priori bound for r with C = 1,
/// integrals by the trapezoidal rule on the snapshot times.
RatioTrack check_apriori_R(const OrderSeries& series, const std::vector<SpectralField>& h_trajectory,
                           const SpectralField& f0, const WeightParams& params, double mu);

struct HInfinity {
    SpectralField h_inf;
    DecayFit fit;
    std::vector<double> times;
    std::vector<double> distances; // ||h(t) - h(t_last)||_{0,gamma}
    bool frozen = false;           // all distances below the floor
    bool decaying = false;
};

/// h_infinity = last snapshot; Cauchy distances fitted on [t_lo, t_hi]
/// (default [0, t_last/2]).
HInfinity extract_h_infinity(const std::vector<SpectralField>& trajectory, const WeightParams& params,
                             std::optional<std::pair<double, double>> window = std::nullopt,
                             double floor = 1e-11);

/// a_k = sup_omega |h_k(omega)| for k = 0..k_max.
std::vector<double> mode_amplitudes(const MixedField& field);

/// max_{k>=2, a_k > floor} (a_k / a_1)^{1/(k-1)}; < 1 means at least geometric decay in k.
double geometric_mode_ratio(const std::vector<double>& amplitudes, double floor = 1e-14);

} // namespace dephase
