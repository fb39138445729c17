#pragma once

// Analytic weights and norms on the (k, eta) lattice.
//
//   A^{lambda,p}_k(eta) = exp(lambda <k,eta>) <k,eta>^p
//   ||f||_{lambda,p}     = sup_{k,eta} A^{lambda,p}_k(eta) |fhat_k(eta)|
//   r_{lambda,p}(t)      = |z1(t)| exp(lambda t) <t>^p
//   beta(t, lambda)      = lambda0 - lambda - a arctan t
//
// Continuous suprema over lambda, t and eta are taken over declared samples.

#include "dephase/core.hpp"

#include <vector>

namespace dephase {

struct WeightParams {
    double lambda0 = 0.5;
    double a = 0.5 / pi;                 // half of the admissible bound 2 lambda0 / pi
    double gamma = 3.0;
    std::vector<double> lambda_samples;  // ascending, each in [0, lambda0)
    std::vector<double> t_samples;       // optional restriction of the time samples

    /// lambda0 = 0.5, a = lambda0/pi, gamma = 3, n evenly spaced lambdas in [0, lambda0).
    static WeightParams defaults(std::size_t n_lambda = 10);

    /// Throws ConfigError naming the violated constraint.
    void validate() const;
};

double bracket(double t);
double bracket2(int k, double eta);

/// Throws NumericalError when the weight exceeds the representable range.
double weight_A(double lambda, double p, int k, double eta);
double log_weight_A(double lambda, double p, int k, double eta);

struct NormValue {
    double value = 0.0;
    int argsup_k = 0;
    double argsup_eta = 0.0;
};

/// sup over the lattice. Throws NumericalError on non-finite entries.
NormValue norm_lambda_p(const SpectralField& field, double lambda, double p);

std::vector<double> r_lambda_p(const OrderSeries& series, double lambda, double p);

double beta(double t, double lambda, const WeightParams& params);

struct TripleNorm {
    double value = 0.0;
    double lambda = 0.0;
    double t = 0.0;
};

struct TripleNormH {
    TripleNorm first;   // |||h|||_{a,1}
    TripleNorm second;  // |||h/<t>|||_{a,gamma}
    double value() const { return first.value + second.value; }
};

/// |||h|||_a over the trajectory's time tags and params.lambda_samples.
/// Throws ConfigError when no sampled (lambda, t) has beta > 0.
TripleNormH triple_norm_h(const std::vector<SpectralField>& trajectory,
                          const WeightParams& params);

/// |||R|||_a = sup_{beta > 0} R(t) exp(lambda t) <t>^gamma.
TripleNorm triple_norm_R(const OrderSeries& series, const WeightParams& params);

/// One row of a norm report.
struct NormReportEntry {
    double lambda = 0.0;
    double p = 0.0;
    double value = 0.0;
    int argsup_k = 0;
    double argsup_eta = 0.0;
    double t = 0.0;
};

using NormReport = std::vector<NormReportEntry>;

NormReport norm_report(const SpectralField& field, const std::vector<double>& lambdas,
                       const std::vector<double>& ps);

} // namespace dephase
