#include "dephase/config.hpp"

#include "dephase/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace dephase {

using nlohmann::json;

std::size_t RunConfig::n_steps() const
{
    return std::size_t(std::llround(t_max / dt));
}

std::size_t RunConfig::stride_steps(double every) const
{
    return std::max<std::size_t>(1, std::size_t(std::llround(every / dt)));
}

void RunConfig::validate() const
{
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw ConfigError("mu>=0 violated");
    if (!(dt > 0.0))
        throw ConfigError("dt>0 violated");
    if (!(t_max > 0.0))
        throw ConfigError("t_max>0 violated");
    if (std::abs(double(n_steps()) * dt - t_max) > 1e-9 * t_max)
        throw ConfigError("t_max must be an integer multiple of dt");
    if (k_max < 1)
        throw ConfigError("k_max>=1 violated");
    if (initial.highest_mode() > k_max)
        throw ConfigError("k_max is smaller than the highest perturbed mode");
    if (!(snapshot_every > 0.0))
        throw ConfigError("snapshot_every>0 violated");
    if (eta_grid.half_width() < t_max + 1.0)
        throw ConfigError("eta_grid.half_width>=t_max+1 violated: shifted evaluations eta+-t "
                          "must stay on the grid");
    if (!(fit_t_lo < fit_t_hi))
        throw ConfigError("fit_window must satisfy lo<hi");
    if (!(picard.tol > 0.0))
        throw ConfigError("picard.tol>0 violated");
    if (picard.max_iters < 1)
        throw ConfigError("picard.max_iters>=1 violated");
    if (!(picard.snapshot_every > 0.0))
        throw ConfigError("picard.snapshot_every>0 violated");
    if (particles.n < 2)
        throw ConfigError("particles.n>=2 violated");
    if (!(particles.dt > 0.0) || !(particles.t_max > 0.0))
        throw ConfigError("particles.dt>0 and particles.t_max>0 required");
    weights.validate();
    initial.validate();
}

RunConfig RunConfig::reference()
{
    return RunConfig{};
}

namespace {

const char* family_name(FrequencyFamily f)
{
    switch (f) {
    case FrequencyFamily::gaussian:
        return "gaussian";
    case FrequencyFamily::lorentzian:
        return "lorentzian";
    case FrequencyFamily::tabulated:
        return "tabulated";
    }
    return "gaussian";
}

FrequencyFamily parse_family(const std::string& s)
{
    if (s == "gaussian")
        return FrequencyFamily::gaussian;
    if (s == "lorentzian")
        return FrequencyFamily::lorentzian;
    if (s == "tabulated")
        return FrequencyFamily::tabulated;
    throw ConfigError("initial.family must be gaussian, lorentzian or tabulated (got '" + s
                      + "')");
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

RunConfig config_from_json(const json& j)
{
    try {
        RunConfig c;
        read(j, "mu", c.mu);
        read(j, "dt", c.dt);
        read(j, "t_max", c.t_max);
        read(j, "k_max", c.k_max);
        read(j, "snapshot_every", c.snapshot_every);
        read(j, "seed", c.seed);
        if (j.contains("out_dir"))
            c.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("omega_grid")) {
            const auto& g = j.at("omega_grid");
            c.omega_grid = OmegaGrid(g.value("half_width", c.omega_grid.half_width()),
                                     g.value("n_points", c.omega_grid.size()));
        }
        if (j.contains("eta_grid")) {
            const auto& g = j.at("eta_grid");
            c.eta_grid = EtaGrid(g.value("half_width", c.eta_grid.half_width()),
                                 g.value("n_points", c.eta_grid.size()));
        }
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            read(w, "lambda0", c.weights.lambda0);
            if (w.contains("a"))
                c.weights.a = w.at("a").get<double>();
            else
                c.weights.a = 0.5 * (2.0 * c.weights.lambda0 / pi);
            read(w, "gamma", c.weights.gamma);
            if (w.contains("lambda_samples")) {
                c.weights.lambda_samples = w.at("lambda_samples").get<std::vector<double>>();
            } else {
                const std::size_t n = w.value("n_lambda", std::size_t(10));
                c.weights.lambda_samples.clear();
                for (std::size_t i = 0; i < n; ++i)
                    c.weights.lambda_samples.push_back(c.weights.lambda0 * double(i) / double(n));
            }
            read(w, "t_samples", c.weights.t_samples);
        }
        if (j.contains("initial")) {
            const auto& d = j.at("initial");
            InitialDatum datum;
            datum.family = parse_family(d.value("family", std::string("gaussian")));
            read(d, "sigma", datum.sigma);
            read(d, "delta", datum.delta);
            read(d, "taper_fraction", datum.taper_fraction);
            read(d, "check_normalization", datum.check_normalization);
            if (d.contains("table")) {
                datum.table_omega = d.at("table").at("omega").get<std::vector<double>>();
                datum.table_g = d.at("table").at("g").get<std::vector<double>>();
            }
            if (d.contains("perturbation"))
                for (const auto& p : d.at("perturbation"))
                    datum.perturbation.push_back(
                        {p.at("k").get<int>(), {p.value("re", 0.0), p.value("im", 0.0)}});
            c.initial = std::move(datum);
        }
        if (j.contains("fit_window")) {
            const auto w = j.at("fit_window").get<std::vector<double>>();
            if (w.size() != 2)
                throw ConfigError("fit_window must be [lo, hi]");
            c.fit_t_lo = w[0];
            c.fit_t_hi = w[1];
        } else {
            c.fit_t_lo = 0.25 * c.t_max;
            c.fit_t_hi = c.t_max;
        }
        if (j.contains("picard")) {
            const auto& p = j.at("picard");
            read(p, "tol", c.picard.tol);
            read(p, "max_iters", c.picard.max_iters);
            read(p, "snapshot_every", c.picard.snapshot_every);
        }
        if (j.contains("particles")) {
            const auto& p = j.at("particles");
            read(p, "n", c.particles.n);
            read(p, "dt", c.particles.dt);
            read(p, "t_max", c.particles.t_max);
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

json config_to_json(const RunConfig& c)
{
    json perturbation = json::array();
    for (const auto& p : c.initial.perturbation)
        perturbation.push_back({{"k", p.mode}, {"re", p.amplitude.real()}, {"im", p.amplitude.imag()}});
    json initial = {{"family", family_name(c.initial.family)},
                    {"sigma", c.initial.sigma},
                    {"delta", c.initial.delta},
                    {"taper_fraction", c.initial.taper_fraction},
                    {"check_normalization", c.initial.check_normalization},
                    {"perturbation", perturbation}};
    if (c.initial.family == FrequencyFamily::tabulated)
        initial["table"] = {{"omega", c.initial.table_omega}, {"g", c.initial.table_g}};
    return {
        {"mu", c.mu},
        {"dt", c.dt},
        {"t_max", c.t_max},
        {"k_max", c.k_max},
        {"omega_grid", {{"half_width", c.omega_grid.half_width()}, {"n_points", c.omega_grid.size()}}},
        {"eta_grid", {{"half_width", c.eta_grid.half_width()}, {"n_points", c.eta_grid.size()}}},
        {"weights",
         {{"lambda0", c.weights.lambda0},
          {"a", c.weights.a},
          {"gamma", c.weights.gamma},
          {"lambda_samples", c.weights.lambda_samples},
          {"t_samples", c.weights.t_samples}}},
        {"initial", initial},
        {"snapshot_every", c.snapshot_every},
        {"fit_window", {c.fit_t_lo, c.fit_t_hi}},
        {"picard",
         {{"tol", c.picard.tol},
          {"max_iters", c.picard.max_iters},
          {"snapshot_every", c.picard.snapshot_every}}},
        {"particles", {{"n", c.particles.n}, {"dt", c.particles.dt}, {"t_max", c.particles.t_max}}},
        {"seed", c.seed},
        {"out_dir", c.out_dir.string()},
    };
}

void apply_env_overrides(json& j)
{
    static const char* keys[] = {"mu", "dt", "t_max", "k_max", "snapshot_every", "seed", "out_dir"};
    for (const char* key : keys) {
        std::string name = "DEPHASE_";
        for (const char* p = key; *p; ++p)
            name += char(std::toupper(static_cast<unsigned char>(*p)));
        const char* v = std::getenv(name.c_str());
        if (!v)
            continue;
        auto parsed = json::parse(v, nullptr, false);
        j[key] = parsed.is_discarded() ? json(std::string(v)) : parsed;
    }
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("config file " + path.string() + " is not a JSON object");
    apply_env_overrides(j);
    return config_from_json(j);
}

} // namespace dephase
