#pragma once

// Grids, fields and initial data for the gliding-frame phase density
//
//   h(t, theta, omega) = f(t, theta + omega t, omega)
//
// stored as angular Fourier modes h_k(t, omega) on a uniform frequency grid.
// Transforms carry no 2*pi prefactors:
//
//   h_k(omega)   = int_T h(theta, omega) exp(-i k theta) dtheta
//   hhat_k(eta)  = int_R h_k(omega) exp(-i eta omega) domega
//
// so that z1(t) = hhat_1(t, t) and hhat_0(eta) = ghat(eta).

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dephase {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Uniform symmetric grid on [-half_width, half_width].
class UniformGrid {
public:
    UniformGrid(double half_width, std::size_t n_points);

    double half_width() const noexcept { return half_width_; }
    std::size_t size() const noexcept { return n_points_; }
    double spacing() const noexcept { return 2.0 * half_width_ / double(n_points_ - 1); }

    /// Node j; exactly antisymmetric under j -> n-1-j.
    double operator[](std::size_t j) const noexcept
    {
        return double(2 * std::ptrdiff_t(j) - std::ptrdiff_t(n_points_ - 1)) * half_width_
               / double(n_points_ - 1);
    }

    /// Trapezoidal weight of node j.
    double weight(std::size_t j) const noexcept
    {
        return (j == 0 || j + 1 == n_points_) ? 0.5 * spacing() : spacing();
    }

    std::vector<double> nodes() const;
    std::vector<double> weights() const;

    bool operator==(const UniformGrid&) const = default;

private:
    double half_width_;
    std::size_t n_points_;
};

/// Natural-frequency grid, at least 16 points.
class OmegaGrid : public UniformGrid {
public:
    OmegaGrid(double half_width, std::size_t n_points);
};

/// Dual-frequency grid on which analytic norms are evaluated.
class EtaGrid : public UniformGrid {
public:
    EtaGrid(double half_width, std::size_t n_points);
};

/// Complex matrix over (k, grid index) with k in [-k_max, k_max].
template <class Grid>
class ModeMatrix {
public:
    ModeMatrix(Grid grid, int k_max, double time_tag = 0.0);

    int k_max() const noexcept { return k_max_; }
    std::size_t rows() const noexcept { return std::size_t(2 * k_max_ + 1); }
    const Grid& grid() const noexcept { return grid_; }
    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    cplx& operator()(int k, std::size_t j) noexcept { return values_[index(k, j)]; }
    const cplx& operator()(int k, std::size_t j) const noexcept { return values_[index(k, j)]; }

    std::span<cplx> row(int k) noexcept { return {values_.data() + index(k, 0), grid_.size()}; }
    std::span<const cplx> row(int k) const noexcept
    {
        return {values_.data() + index(k, 0), grid_.size()};
    }

    std::span<cplx> values() noexcept { return values_; }
    std::span<const cplx> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    /// sup |values|
    double sup_abs() const noexcept;

private:
    std::size_t index(int k, std::size_t j) const noexcept
    {
        return std::size_t(k + k_max_) * grid_.size() + j;
    }

    Grid grid_;
    int k_max_;
    double time_;
    std::vector<cplx> values_;
};

/// h_k(omega_j) at a given model time. Reality: h_{-k} = conj(h_k).
class MixedField : public ModeMatrix<OmegaGrid> {
public:
    using ModeMatrix::ModeMatrix;

    /// max_{k,j} |h_{-k}(omega_j) - conj(h_k(omega_j))|
    double reality_defect() const noexcept;

    /// Replace h_k by (h_k + conj(h_{-k}))/2 for k >= 0 and mirror.
    void symmetrize() noexcept;
};

/// hhat_k(eta_j). Reality: hhat_{-k}(-eta) = conj(hhat_k(eta)).
class SpectralField : public ModeMatrix<EtaGrid> {
public:
    using ModeMatrix::ModeMatrix;

    double reality_defect() const noexcept;
};

/// z1(t) = R exp(-i phi). z_{-1} is conj(z1) and is never stored.
struct OrderSample {
    double t = 0.0;
    cplx z1{};
    double R = 0.0;

    static OrderSample at(double t, cplx z1) { return {t, z1, std::abs(z1)}; }
};

using OrderSeries = std::vector<OrderSample>;

enum class FrequencyFamily { gaussian, lorentzian, tabulated };

/// Perturbation of the uniform phase profile on angular mode `mode` != 0.
struct Perturbation {
    int mode = 1;
    cplx amplitude{};
};

/// f0(theta, omega) = g(omega)/(2 pi) * (1 + sum_k 2 Re(eps_k exp(i k theta))).
struct InitialDatum {
    FrequencyFamily family = FrequencyFamily::gaussian;
    double sigma = 1.0;          // gaussian standard deviation
    double delta = 1.0;          // lorentzian half width
    double taper_fraction = 0.125; // lorentzian: width of the smooth cutoff relative to W
    std::vector<double> table_omega; // tabulated g, ascending
    std::vector<double> table_g;
    std::vector<Perturbation> perturbation;
    bool check_normalization = true;

    static InitialDatum gaussian(double sigma, std::vector<Perturbation> eps = {});
    static InitialDatum lorentzian(double delta, std::vector<Perturbation> eps = {});

    /// Untruncated density g(omega); tabulated data are linearly interpolated.
    double density(double omega) const;

    /// Closed-form ghat(t) for gaussian and lorentzian families.
    std::optional<double> closed_form_ghat(double t) const;

    /// Perturbations folded onto positive modes with duplicates summed.
    std::vector<Perturbation> positive_modes() const;

    int highest_mode() const;

    /// 1 + sum_k 2 Re(eps_k exp(i k theta))
    double phase_profile(double theta) const;

    /// Minimum of phase_profile over a dense theta sample.
    double min_phase_profile() const;

    /// Throws DatumError unless f0 is a nonnegative normalizable density.
    void validate() const;
};

/// g sampled on a frequency grid and normalized to unit trapezoidal mass.
struct FrequencyTable {
    std::vector<double> g;
    double raw_mass = 0.0; // mass before normalization; 1 - raw_mass is the truncation loss
};

FrequencyTable tabulate_frequencies(const InitialDatum& datum, const OmegaGrid& grid);

/// h_k(0, omega): h_0 = g, h_k = eps_k g, h_{-k} = conj(eps_k) g.
MixedField make_initial_field(const InitialDatum& datum, const OmegaGrid& grid, int k_max);

/// Trapezoidal sum  sum_j w_j row_j phase_j ; the single quadrature kernel of the library.
cplx weighted_sum(std::span<const cplx> row, const UniformGrid& grid, std::span<const cplx> phase);

/// exp(-i eta omega_j) for every node.
std::vector<cplx> transform_phase(const UniformGrid& grid, double eta);

/// hhat_k(eta) by direct quadrature at an arbitrary eta.
cplx evaluate_spectral_at(const MixedField& field, int k, double eta);

/// hhat_k on every eta node. Throws ConfigError if spacing(eta) * W > pi.
SpectralField mixed_to_spectral(const MixedField& field, const EtaGrid& eta);

/// Total mass int h_0(omega) domega.
double total_mass(const MixedField& field);

} // namespace dephase
