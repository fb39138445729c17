#include "dephase/cli.hpp"

#include "dephase/errors.hpp"
#include "dephase/estimates.hpp"
#include "dephase/io.hpp"
#include "dephase/oracle.hpp"
#include "dephase/picard.hpp"
#include "dephase/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <thread>

#include <CLI11.hpp>

namespace dephase::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double richardson_warn = 1e-8;

std::string config_hash(const RunConfig& c)
{
    auto j = config_to_json(c);
    j.erase("out_dir");
    return fnv1a_hex(j.dump());
}

/// Collects emitted files and checks; written last as manifest.json.
class Manifest {
public:
    Manifest(std::string command, const RunConfig& config, fs::path dir)
        : dir_(std::move(dir)), start_(std::chrono::steady_clock::now())
    {
        doc_["tool"] = "dephase";
        doc_["tool_version"] = tool_version;
        doc_["command"] = std::move(command);
        doc_["config_hash"] = config_hash(config);
        doc_["files"] = json::array();
        doc_["checks"] = json::object();
        doc_["warnings"] = json::array();
        doc_["metadata"] = json::object();
    }

    void add_file(const fs::path& relative)
    {
        const auto full = dir_ / relative;
        doc_["files"].push_back({{"path", relative.generic_string()},
                                 {"bytes", fs::file_size(full)},
                                 {"checksum", file_checksum(full)}});
    }

    void check(const std::string& name, bool pass) { doc_["checks"][name] = pass ? "pass" : "fail"; }
    void warn(const std::string& msg) { doc_["warnings"].push_back(msg); }
    json& metadata() { return doc_["metadata"]; }

    void write()
    {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["wall_clock_seconds"] = secs;
        write_text(dir_ / "manifest.json", doc_.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    json doc_;
};

template <class F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_failure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
}

void write_config(const fs::path& dir, const RunConfig& c, Manifest& m)
{
    write_text(dir / "config.json", config_to_json(c).dump(2) + "\n");
    m.add_file("config.json");
}

std::string snapshot_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshots/snap_%04zu.bin", i);
    return buf;
}

double omega_window_for(const RunConfig& c)
{
    return c.initial.family == FrequencyFamily::gaussian ? 0.0 : c.omega_grid.half_width();
}

} // namespace

RunConfig resolve_config(const Options& opts)
{
    auto c = load_config(opts.config);
    if (opts.out)
        c.out_dir = *opts.out;
    if (opts.seed)
        c.seed = *opts.seed;
    return c;
}

int cmd_simulate(const Options& opts)
{
    return guarded([&] {
        const auto c = resolve_config(opts);
        const auto dir = c.out_dir;
        fs::create_directories(dir / "snapshots");
        Manifest m("simulate", c, dir);
        write_config(dir, c, m);

        const auto table = tabulate_frequencies(c.initial, c.omega_grid);
        m.metadata()["truncation_loss"] = 1.0 - table.raw_mass;

        const auto f0 = make_initial_field(c.initial, c.omega_grid, c.k_max);
        const double rich = richardson_local_error(f0, c.dt, c.mu);
        m.metadata()["richardson_local_error"] = rich;
        if (rich > richardson_warn)
            m.warn("Richardson local error " + format_double(rich) + " at t=0 exceeds "
                   + format_double(richardson_warn) + ": dt is too coarse for this mu and grid");

        std::optional<RunResult> run_result;
        try {
            run_result.emplace(run_from(f0, c));
        } catch (const NumericalError& e) {
            m.warn(std::string("numerical abort: ") + e.what());
            m.check("finite", false);
            m.write();
            throw;
        }
        const auto& res = *run_result;
        m.metadata()["max_reality_drift"] = res.max_reality_drift;

        write_order_csv(dir / "order_series.csv", res.series);
        m.add_file("order_series.csv");
        for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
            write_snapshot_binary(dir / snapshot_name(i), res.snapshots[i]);
            m.add_file(snapshot_name(i));
        }
        write_snapshot_csv(dir / "final_field.csv", res.final_field);
        m.add_file("final_field.csv");

        double mass_err = 0.0, mode0_err = 0.0;
        for (const auto& s : res.snapshots) {
            mass_err = std::max(mass_err, std::abs(total_mass(s) - 1.0));
            for (std::size_t j = 0; j < s.grid().size(); ++j)
                mode0_err = std::max(mode0_err, std::abs(s(0, j) - f0(0, j)));
        }
        m.metadata()["mass_error"] = mass_err;
        m.check("finite", true);
        m.check("mass_conservation", mass_err <= 1e-10);
        m.check("mode_zero_conservation", mode0_err <= 1e-12);
        m.check("richardson", rich <= richardson_warn);
        m.write();
        std::cout << "simulate: " << res.series.size() << " samples, R(t_max) = "
                  << format_double(res.series.back().R) << ", output in " << dir.string() << "\n";
        return int(ok);
    });
}

int cmd_picard(const Options& opts)
{
    return guarded([&] {
        const auto c = resolve_config(opts);
        const auto dir = c.out_dir;
        fs::create_directories(dir);
        Manifest m("picard", c, dir);
        write_config(dir, c, m);

        const auto result = iterate(c, c.picard.tol, c.picard.max_iters);
        json log = json::array();
        for (const auto& r : result.records) {
            json row = {{"n", r.n},
                        {"delta_z", r.delta_z},
                        {"delta_h", r.delta_h},
                        {"triple_norm_h", r.triple_norm_h},
                        {"triple_norm_R", r.triple_norm_R}};
            if (r.h_trajectory.size() > 0)
                row["fixed_point_residual"] = fixed_point_check(r);
            log.push_back(row);
        }
        write_text(dir / "picard_log.json", log.dump(2) + "\n");
        m.add_file("picard_log.json");
        write_order_csv(dir / "order_series.csv", result.records.back().z_series);
        m.add_file("order_series.csv");
        m.metadata()["iterations"] = result.records.size();
        m.check("converged", result.converged);
        m.write();
        std::cout << "picard: " << result.records.size() << " iteration(s), "
                  << (result.converged ? "converged" : "NOT converged") << "\n";
        if (!result.converged) {
            std::cerr << "picard iteration did not converge; delta_z history:";
            for (const auto& r : result.records)
                std::cerr << ' ' << format_double(r.delta_z);
            std::cerr << "\n";
            return int(numerical_failure);
        }
        return int(ok);
    });
}

int cmd_particles(const Options& opts)
{
    return guarded([&] {
        const auto c = resolve_config(opts);
        const auto dir = c.out_dir;
        fs::create_directories(dir);
        Manifest m("particles", c, dir);
        write_config(dir, c, m);
        const auto series = particle_run(c.initial, c.particles.n, c.mu, c.particles.dt,
                                         c.particles.t_max, c.seed, omega_window_for(c));
        write_order_csv(dir / "particles_series.csv", series);
        m.add_file("particles_series.csv");
        m.metadata()["source"] = "particle";
        m.metadata()["n"] = c.particles.n;
        m.metadata()["seed"] = c.seed;
        m.check("R_in_unit_interval", std::all_of(series.begin(), series.end(), [](const auto& s) {
                    return s.R >= 0.0 && s.R <= 1.0 + 1e-12;
                }));
        m.write();
        std::cout << "particles: " << series.size() << " samples written to "
                  << (dir / "particles_series.csv").string() << "\n";
        return int(ok);
    });
}

int cmd_estimates(const fs::path& run_dir, const Options& opts)
{
    return guarded([&] {
        const auto manifest_path = run_dir / "manifest.json";
        if (!fs::exists(manifest_path))
            throw ConfigError("no manifest.json in " + run_dir.string());
        const auto manifest = json::parse(read_text(manifest_path));
        std::vector<std::string> expected_snapshots, missing;
        bool has_series = false;
        for (const auto& f : manifest.at("files")) {
            const auto p = f.at("path").get<std::string>();
            if (p.rfind("snapshots/", 0) == 0)
                expected_snapshots.push_back(p);
            if (p == "order_series.csv")
                has_series = true;
            if (!fs::exists(run_dir / p))
                missing.push_back(p);
        }
        if (!has_series)
            missing.push_back("order_series.csv");
        if (expected_snapshots.empty())
            missing.push_back("snapshots/*.bin");
        if (!missing.empty()) {
            std::cerr << "run directory " << run_dir.string() << " is incomplete; missing:\n";
            for (const auto& p : missing)
                std::cerr << "  - " << p << "\n";
            return int(config_error);
        }

        const auto c = config_from_json(json::parse(read_text(run_dir / "config.json")));
        const auto series = read_order_csv(run_dir / "order_series.csv");
        std::vector<MixedField> traj;
        for (const auto& p : expected_snapshots)
            traj.push_back(read_snapshot_binary(run_dir / p));
        std::vector<SpectralField> spec;
        for (const auto& h : traj)
            spec.push_back(mixed_to_spectral(h, c.eta_grid));

        json reports = json::array();

        std::optional<DecayFit> rfit;
        try {
            rfit = fit_decay(series, c.fit_t_lo, c.fit_t_hi);
        } catch (const NumericalError& e) {
            std::cerr << "decay fit unavailable: " << e.what() << "\n";
        }
        reports.push_back(check_report("decay_fit", 0.0, 0.0, rfit, std::nullopt));

        std::vector<std::pair<double, double>> pairs;
        const auto& ls = c.weights.lambda_samples;
        for (std::size_t i = 0; i + 1 < ls.size(); ++i)
            pairs.emplace_back(ls[i], ls[i + 1]);
        if (!pairs.empty()) {
            const auto nest = check_nesting(spec, pairs, c.weights.gamma);
            reports.push_back(check_report("nesting", nest.max(), nest.argmax_t(), std::nullopt, std::nullopt));
        }

        const auto lc = check_L_continuity(traj, series, c.weights, c.eta_grid);
        std::optional<double> stability;
        if (opts.refine) {
            auto fine = c;
            fine.dt = 0.5 * c.dt;
            fine.k_max = 2 * c.k_max;
            fine.omega_grid = OmegaGrid(c.omega_grid.half_width(), 2 * c.omega_grid.size() - 1);
            const auto res = run(fine);
            const auto lc_fine = check_L_continuity(res.snapshots, res.series, fine.weights, fine.eta_grid);
            stability = std::abs(lc_fine.max() - lc.max()) / lc.max();
        }
        reports.push_back(check_report("L_continuity", lc.max(), lc.argmax_t(), std::nullopt, stability));

        const auto ap = check_apriori_R(series, spec, spec.front(), c.weights, c.mu);
        reports.push_back(check_report("apriori_R", ap.max(), ap.argmax_t(), std::nullopt, std::nullopt));

        const auto hinf = extract_h_infinity(spec, c.weights);
        auto hrep = check_report("h_infinity", hinf.distances.empty() ? 0.0 : hinf.distances.front(), 0.0,
                                 hinf.fit.n_samples ? std::optional(hinf.fit) : std::nullopt,
                                 std::nullopt);
        hrep["decaying"] = hinf.decaying;
        hrep["frozen"] = hinf.frozen;
        hrep["geometric_mode_ratio"] = geometric_mode_ratio(mode_amplitudes(traj.back()));
        reports.push_back(hrep);

        const auto out = opts.out.value_or(run_dir);
        write_text(out / "estimates.json", reports.dump(2) + "\n");
        std::cout << "estimates: " << reports.size() << " reports written to "
                  << (out / "estimates.json").string() << "\n";
        return int(ok);
    });
}

int cmd_sweep(const Options& opts, const std::string& parameter, const std::vector<double>& values)
{
    return guarded([&] {
        static const std::vector<std::string> allowed{"mu", "epsilon", "dt", "k_max"};
        if (std::find(allowed.begin(), allowed.end(), parameter) == allowed.end())
            throw ConfigError("sweep parameter must be one of mu, epsilon, dt, k_max");
        if (values.empty())
            throw ConfigError("sweep needs at least one value");
        const auto base = resolve_config(opts);
        fs::create_directories(base.out_dir);

        struct Row {
            double value = 0.0;
            std::string status = "pending";
            double rate = std::numeric_limits<double>::quiet_NaN();
            double r2 = std::numeric_limits<double>::quiet_NaN();
            double max_ratio_L = std::numeric_limits<double>::quiet_NaN();
            double R_final = std::numeric_limits<double>::quiet_NaN();
        };
        std::vector<Row> rows(values.size());

        auto job = [&](std::size_t i) {
            Row& row = rows[i];
            row.value = values[i];
            try {
                auto c = base;
                if (parameter == "mu") {
                    c.mu = values[i];
                } else if (parameter == "dt") {
                    c.dt = values[i];
                } else if (parameter == "k_max") {
                    c.k_max = int(std::lround(values[i]));
                } else {
                    bool found = false;
                    for (auto& p : c.initial.perturbation)
                        if (p.mode == 1) {
                            p.amplitude = values[i];
                            found = true;
                        }
                    if (!found)
                        c.initial.perturbation.push_back({1, values[i]});
                }
                char sub[32];
                std::snprintf(sub, sizeof sub, "row_%03zu", i);
                c.out_dir = base.out_dir / sub;
                c.validate();
                const auto res = run(c);
                write_order_csv(c.out_dir / "order_series.csv", res.series);
                row.R_final = res.series.back().R;
                try {
                    const auto fit = fit_decay(res.series, c.fit_t_lo, c.fit_t_hi);
                    row.rate = -fit.slope;
                    row.r2 = fit.r_squared;
                } catch (const NumericalError&) {
                }
                try {
                    row.max_ratio_L =
                        check_L_continuity(res.snapshots, res.series, c.weights, c.eta_grid).max();
                } catch (const ConfigError&) {
                }
                row.status = "ok";
            } catch (const ConfigError& e) {
                row.status = std::string("config_error");
                std::cerr << "sweep row " << i << ": " << e.what() << "\n";
            } catch (const NumericalError& e) {
                row.status = std::string("numerical_failure");
                std::cerr << "sweep row " << i << ": " << e.what() << "\n";
            }
        };

        const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, unsigned(values.size())));
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < values.size(); i = next++)
                job(i);
        };
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < workers; ++w)
            pool.emplace_back(worker);
        worker();
        for (auto& th : pool)
            th.join();

        std::string csv = "value,status,decay_rate,r2,max_ratio_L,R_final\n";
        for (const auto& r : rows)
            csv += format_double(r.value) + ',' + r.status + ',' + format_double(r.rate) + ','
                   + format_double(r.r2) + ',' + format_double(r.max_ratio_L) + ','
                   + format_double(r.R_final) + '\n';
        write_text(base.out_dir / "sweep_summary.csv", csv);
        std::cout << "sweep: " << rows.size() << " rows written to "
                  << (base.out_dir / "sweep_summary.csv").string() << "\n";
        return int(ok);
    });
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"dephase: kinetic Kuramoto dephasing simulator"};
    app.require_subcommand(1);
    Options opts;
    std::string run_dir;
    std::string parameter;
    std::vector<double> values;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", opts.config, "run configuration (JSON)");
        if (need_config)
            c->required();
        sub->add_option("--out", opts.out, "output directory");
        sub->add_option("--seed", opts.seed, "random seed");
        sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    };
    auto* sim = app.add_subcommand("simulate", "integrate the nonlinear gliding-frame equation");
    add_common(sim, true);
    auto* pic = app.add_subcommand("picard", "run the alternating Volterra/transport iteration");
    add_common(pic, true);
    auto* par = app.add_subcommand("particles", "finite-N Kuramoto reference run");
    add_common(par, true);
    auto* est = app.add_subcommand("estimates", "post-process a simulate run directory");
    add_common(est, false);
    est->add_option("run_dir", run_dir, "directory written by simulate")->required();
    est->add_flag("--refine", opts.refine, "rerun at doubled resolution for stability ratios");
    auto* swp = app.add_subcommand("sweep", "independent runs over one parameter");
    add_common(swp, true);
    swp->add_option("--param", parameter, "mu | epsilon | dt | k_max")->required();
    swp->add_option("--values", values, "comma separated values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? int(ok) : int(config_error);
    }
    if (const char* t = std::getenv("DEPHASE_THREADS"); t && opts.threads == 1)
        opts.threads = unsigned(std::max(1, std::atoi(t)));

    if (sim->parsed())
        return cmd_simulate(opts);
    if (pic->parsed())
        return cmd_picard(opts);
    if (par->parsed())
        return cmd_particles(opts);
    if (est->parsed())
        return cmd_estimates(run_dir, opts);
    return cmd_sweep(opts, parameter, values);
}

} // namespace dephase::cli
