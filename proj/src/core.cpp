#include "dephase/core.hpp"

#include "dephase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace dephase {

UniformGrid::UniformGrid(double half_width, std::size_t n_points)
    : half_width_(half_width), n_points_(n_points)
{
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ConfigError("grid half_width must be positive and finite");
    if (n_points < 2)
        throw ConfigError("grid needs at least 2 points");
}

std::vector<double> UniformGrid::nodes() const
{
    std::vector<double> out(n_points_);
    for (std::size_t j = 0; j < n_points_; ++j)
        out[j] = (*this)[j];
    return out;
}

std::vector<double> UniformGrid::weights() const
{
    std::vector<double> out(n_points_);
    for (std::size_t j = 0; j < n_points_; ++j)
        out[j] = weight(j);
    return out;
}

OmegaGrid::OmegaGrid(double half_width, std::size_t n_points)
    : UniformGrid(half_width, n_points)
{
    if (n_points < 16)
        throw ConfigError("omega grid needs n_points >= 16");
}

EtaGrid::EtaGrid(double half_width, std::size_t n_points)
    : UniformGrid(half_width, n_points)
{
}

template <class Grid>
ModeMatrix<Grid>::ModeMatrix(Grid grid, int k_max, double time_tag)
    : grid_(std::move(grid)), k_max_(k_max), time_(time_tag)
{
    if (k_max < 0)
        throw ConfigError("k_max must be nonnegative");
    values_.assign(rows() * grid_.size(), cplx{});
}

template <class Grid>
bool ModeMatrix<Grid>::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](const cplx& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

template <class Grid>
double ModeMatrix<Grid>::sup_abs() const noexcept
{
    double m = 0.0;
    for (const auto& v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

template class ModeMatrix<OmegaGrid>;
template class ModeMatrix<EtaGrid>;

double MixedField::reality_defect() const noexcept
{
    double d = 0.0;
    for (int k = 0; k <= k_max(); ++k) {
        auto pos = row(k);
        auto neg = row(-k);
        for (std::size_t j = 0; j < pos.size(); ++j)
            d = std::max(d, std::abs(neg[j] - std::conj(pos[j])));
    }
    return d;
}

void MixedField::symmetrize() noexcept
{
    for (int k = 0; k <= k_max(); ++k) {
        auto pos = row(k);
        auto neg = row(-k);
        for (std::size_t j = 0; j < pos.size(); ++j) {
            const cplx avg = 0.5 * (pos[j] + std::conj(neg[j]));
            pos[j] = avg;
            neg[j] = std::conj(avg);
        }
    }
}

double SpectralField::reality_defect() const noexcept
{
    const std::size_t n = grid().size();
    double d = 0.0;
    for (int k = 0; k <= k_max(); ++k)
        for (std::size_t j = 0; j < n; ++j)
            d = std::max(d, std::abs((*this)(-k, n - 1 - j) - std::conj((*this)(k, j))));
    return d;
}

// ---------------------------------------------------------------------------
// Initial data

InitialDatum InitialDatum::gaussian(double sigma, std::vector<Perturbation> eps)
{
    InitialDatum d;
    d.family = FrequencyFamily::gaussian;
    d.sigma = sigma;
    d.perturbation = std::move(eps);
    return d;
}

InitialDatum InitialDatum::lorentzian(double delta, std::vector<Perturbation> eps)
{
    InitialDatum d;
    d.family = FrequencyFamily::lorentzian;
    d.delta = delta;
    d.perturbation = std::move(eps);
    return d;
}

double InitialDatum::density(double omega) const
{
    switch (family) {
    case FrequencyFamily::gaussian:
        return std::exp(-0.5 * omega * omega / (sigma * sigma)) / (sigma * std::sqrt(2.0 * pi));
    case FrequencyFamily::lorentzian:
        return delta / (pi * (delta * delta + omega * omega));
    case FrequencyFamily::tabulated: {
        if (table_omega.empty() || omega < table_omega.front() || omega > table_omega.back())
            return 0.0;
        auto it = std::upper_bound(table_omega.begin(), table_omega.end(), omega);
        if (it == table_omega.end())
            return table_g.back();
        const std::size_t i = std::size_t(it - table_omega.begin());
        const double x0 = table_omega[i - 1], x1 = table_omega[i];
        const double s = (omega - x0) / (x1 - x0);
        return (1.0 - s) * table_g[i - 1] + s * table_g[i];
    }
    }
    return 0.0;
}

std::optional<double> InitialDatum::closed_form_ghat(double t) const
{
    switch (family) {
    case FrequencyFamily::gaussian:
        return std::exp(-0.5 * sigma * sigma * t * t);
    case FrequencyFamily::lorentzian:
        return std::exp(-delta * std::abs(t));
    case FrequencyFamily::tabulated:
        return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Perturbation> InitialDatum::positive_modes() const
{
    std::map<int, cplx> acc;
    for (const auto& p : perturbation) {
        if (p.mode == 0)
            throw DatumError("perturbation on mode 0 is not allowed (mode 0 is g)");
        if (p.mode > 0)
            acc[p.mode] += p.amplitude;
        else
            acc[-p.mode] += std::conj(p.amplitude);
    }
    std::vector<Perturbation> out;
    for (const auto& [k, a] : acc)
        out.push_back({k, a});
    return out;
}

int InitialDatum::highest_mode() const
{
    int m = 0;
    for (const auto& p : perturbation)
        m = std::max(m, std::abs(p.mode));
    return m;
}

double InitialDatum::phase_profile(double theta) const
{
    double v = 1.0;
    for (const auto& p : positive_modes())
        v += 2.0 * std::real(p.amplitude * std::polar(1.0, p.mode * theta));
    return v;
}

double InitialDatum::min_phase_profile() const
{
    const auto modes = positive_modes();
    const int top = std::max(1, highest_mode());
    const std::size_t n = std::size_t(4096 * top);
    double m = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = 2.0 * pi * double(i) / double(n);
        double v = 1.0;
        for (const auto& p : modes)
            v += 2.0 * std::real(p.amplitude * std::polar(1.0, p.mode * theta));
        m = std::min(m, v);
    }
    return m;
}

void InitialDatum::validate() const
{
    switch (family) {
    case FrequencyFamily::gaussian:
        if (!(sigma > 0.0))
            throw DatumError("gaussian sigma must be positive");
        break;
    case FrequencyFamily::lorentzian:
        if (!(delta > 0.0))
            throw DatumError("lorentzian delta must be positive");
        if (!(taper_fraction > 0.0 && taper_fraction < 1.0))
            throw DatumError("lorentzian taper_fraction must lie in (0, 1)");
        break;
    case FrequencyFamily::tabulated:
        if (table_omega.size() < 2 || table_omega.size() != table_g.size())
            throw DatumError("tabulated g needs matching omega/g columns with >= 2 rows");
        if (!std::is_sorted(table_omega.begin(), table_omega.end()))
            throw DatumError("tabulated omega must be ascending");
        if (std::any_of(table_g.begin(), table_g.end(), [](double v) { return !(v >= 0.0); }))
            throw DatumError("tabulated g must be nonnegative");
        break;
    }
    for (const auto& p : perturbation)
        if (!std::isfinite(p.amplitude.real()) || !std::isfinite(p.amplitude.imag()))
            throw DatumError("perturbation amplitude must be finite");
    // sampled at 4096 points per mode; a profile dipping to exactly 0 between nodes
    // is still accepted up to rounding
    if (min_phase_profile() < -1e-12)
        throw DatumError("initial datum is not a probability density: f0 takes negative values");
}

FrequencyTable tabulate_frequencies(const InitialDatum& datum, const OmegaGrid& grid)
{
    FrequencyTable out;
    out.g.resize(grid.size());
    const double W = grid.half_width();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double w = grid[j];
        double v = datum.density(w);
        if (datum.family == FrequencyFamily::lorentzian) {
            const double edge = W * (1.0 - datum.taper_fraction);
            const double width = 0.25 * W * datum.taper_fraction;
            v *= 0.5 * std::erfc((std::abs(w) - edge) / width);
        }
        out.g[j] = v;
    }
    double mass = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        mass += grid.weight(j) * out.g[j];
    out.raw_mass = mass;
    if (!(mass > 0.0))
        throw DatumError("frequency density has no mass on the omega grid");
    if (datum.check_normalization && datum.family == FrequencyFamily::tabulated
        && std::abs(mass - 1.0) > 1e-2)
        throw DatumError("tabulated g is not normalized (mass " + std::to_string(mass) + ")");
    for (auto& v : out.g)
        v /= mass;
    return out;
}

MixedField make_initial_field(const InitialDatum& datum, const OmegaGrid& grid, int k_max)
{
    datum.validate();
    if (datum.highest_mode() > k_max)
        throw ConfigError("k_max = " + std::to_string(k_max)
                          + " is smaller than the highest perturbed mode "
                          + std::to_string(datum.highest_mode()));
    const auto table = tabulate_frequencies(datum, grid);
    MixedField field(grid, k_max, 0.0);
    auto r0 = field.row(0);
    for (std::size_t j = 0; j < grid.size(); ++j)
        r0[j] = table.g[j];
    for (const auto& p : datum.positive_modes()) {
        auto pos = field.row(p.mode);
        auto neg = field.row(-p.mode);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            pos[j] = p.amplitude * table.g[j];
            neg[j] = std::conj(p.amplitude) * table.g[j];
        }
    }
    return field;
}

// ---------------------------------------------------------------------------
// Transforms

cplx weighted_sum(std::span<const cplx> row, const UniformGrid& grid, std::span<const cplx> phase)
{
    cplx acc{};
    for (std::size_t j = 0; j < row.size(); ++j)
        acc += (grid.weight(j) * row[j]) * phase[j];
    return acc;
}

std::vector<cplx> transform_phase(const UniformGrid& grid, double eta)
{
    std::vector<cplx> phase(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        phase[j] = std::polar(1.0, -eta * grid[j]);
    return phase;
}

cplx evaluate_spectral_at(const MixedField& field, int k, double eta)
{
    const auto phase = transform_phase(field.grid(), eta);
    return weighted_sum(field.row(k), field.grid(), phase);
}

SpectralField mixed_to_spectral(const MixedField& field, const EtaGrid& eta)
{
    const auto& omega = field.grid();
    if (eta.spacing() * omega.half_width() > pi * (1.0 + 1e-12))
        throw ConfigError("eta grid too coarse for the omega window: spacing(eta) * W = "
                          + std::to_string(eta.spacing() * omega.half_width()) + " > pi");
    SpectralField out(eta, field.k_max(), field.time());
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const auto phase = transform_phase(omega, eta[i]);
        for (int k = -field.k_max(); k <= field.k_max(); ++k)
            out(k, i) = weighted_sum(field.row(k), omega, phase);
    }
    return out;
}

double total_mass(const MixedField& field)
{
    double m = 0.0;
    auto r0 = field.row(0);
    for (std::size_t j = 0; j < r0.size(); ++j)
        m += field.grid().weight(j) * r0[j].real();
    return m;
}

} // namespace dephase
