// Command-line front end.
//
//   cse run      --config run.cfg [--out dir] [--instances n] [--seed s]
//                [--threads t] [--scenario name]
//   cse sweep    ... (scenario must be a sweep)
//   cse spectrum ... (spectrum scenario, per-instance eigenvalue exports)
//   cse fit      --table fom.csv --w-u 1.9 [--out dir]
//   cse render   --field field.csv --out field.pgm
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure,
// 3 partial experiment (some instances failed).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"

#include "cse/config.hpp"
#include "cse/errors.hpp"
#include "cse/experiment.hpp"
#include "cse/export.hpp"
#include "cse/io.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kPartial = 3 };

struct RunFlags {
    std::string config;
    std::string out;
    std::optional<std::size_t> instances;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string scenario;
};

void add_run_flags(CLI::App* app, RunFlags& f)
{
    app->add_option("--config", f.config, "configuration file (or a metadata.json to rerun)")
        ->required();
    app->add_option("--out", f.out, "output directory (overrides run.output)");
    app->add_option("--instances", f.instances, "number of random instances");
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--threads", f.threads, "worker threads");
    app->add_option("--scenario", f.scenario, "scenario name (overrides run.scenario)");
}

cse::RunConfig resolve(const RunFlags& f)
{
    std::optional<cse::Scenario> scenario;
    if (!f.scenario.empty())
        scenario = cse::parse_scenario(f.scenario);
    cse::RunConfig cfg = cse::load_config(f.config, scenario);
    if (!f.out.empty())
        cfg.output = f.out;
    if (f.instances)
        cfg.instances = *f.instances;
    if (f.seed)
        cfg.base_seed = *f.seed;
    if (f.threads)
        cfg.threads = *f.threads;
    cfg.validate();
    return cfg;
}

int status_of(bool partial, std::size_t completed)
{
    if (completed == 0)
        return kNumerical;
    return partial ? kPartial : kOk;
}

int do_experiment(const cse::RunConfig& cfg)
{
    cse::ensure_writable(cfg.output);
    std::clog << "[cse] " << cse::to_string(cfg.scenario) << ": " << cfg.instances
              << " instance(s), N = " << cfg.cloud.N << ", box " << cfg.cloud.Lx << " x "
              << cfg.cloud.Ly << " x " << cfg.cloud.Lz << '\n';
    const cse::ExperimentResult r = cse::run_experiment(cfg);
    cse::export_experiment(r, cfg.output);
    std::clog << "[cse] wrote " << cfg.output.string() << " (" << r.completed << "/"
              << r.records.size() << " instances, " << r.wall_seconds << " s)\n";
    for (const auto& w : r.wx)
        std::cout << "t = " << w.t << "  w_x = " << w.mean << " +- " << w.std << '\n';
    return status_of(r.partial, r.completed);
}

int do_sweep(const cse::RunConfig& cfg)
{
    if (!cse::is_sweep(cfg.scenario))
        throw cse::ConfigError("scenario " + std::string(cse::to_string(cfg.scenario)) +
                               " is not a sweep");
    cse::ensure_writable(cfg.output);
    const cse::SweepResult s = cse::sweep(cfg, cfg.sweep_values);
    cse::export_sweep(s, cfg, cfg.output);
    std::size_t completed = 0;
    for (const auto& p : s.points) {
        completed += p.result.completed;
        const auto& w = p.result.width_at(cfg.t_fit);
        std::cout << s.variable << " = " << p.value << "  w_x(t=" << cfg.t_fit << ") = " << w.mean
                  << " +- " << w.std << '\n';
    }
    if (s.fit)
        std::cout << "xi = " << s.fit->xi << "  (w_u = " << s.fit->w_u << ")\n";
    return status_of(s.partial, completed);
}

int do_fit(const std::string& table, double w_u, const std::string& out)
{
    std::ifstream in(table);
    if (!in)
        throw cse::IoError("cannot open " + table);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string h;
        while (std::getline(ss, h, ','))
            header.push_back(h);
    }
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw cse::ConfigError(table + ": missing column '" + name + "'");
    };
    const std::size_t iN = col("N"), iL = col("L"), iw = col("w");
    std::vector<cse::FomPoint> pts;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        if (cells.size() < header.size())
            throw cse::ConfigError(table + ": short row '" + line + "'");
        pts.push_back({std::stod(cells[iN]), std::stod(cells[iL]), std::stod(cells[iw])});
    }
    const cse::FomFit fit = cse::fit_fom(pts, w_u);
    std::cout << "xi = " << cse::format_number(fit.xi) << "\n";
    for (std::size_t i = 0; i < pts.size(); ++i)
        std::cout << "N = " << pts[i].N << "  residual = " << fit.residuals[i] << '\n';
    if (!out.empty()) {
        cse::ensure_writable(out);
        std::ofstream j(std::filesystem::path(out) / "fom_fit.json");
        j << nlohmann::json{{"xi", fit.xi}, {"w_u", fit.w_u}, {"residuals", fit.residuals}}.dump(2)
          << '\n';
    }
    return kOk;
}

// OpenBLAS 0.3.20 autodetects kernels on AVX512-FP16 CPUs that return wrong
// eigenvectors from dsyevd. Pin a safe core type unless the user chose one;
// the library still verifies every decomposition.
void pin_blas_core(char** argv)
{
    if (std::getenv("OPENBLAS_CORETYPE") || std::getenv("CSE_NO_REEXEC"))
        return;
    ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
    ::setenv("CSE_NO_REEXEC", "1", 1);
    ::execv("/proc/self/exe", argv);
}

}  // namespace

int main(int argc, char** argv)
{
    pin_blas_core(argv);

    CLI::App app{"Collective spontaneous emission: dynamics, far-field maps, spatial coherence"};
    app.require_subcommand(1);

    RunFlags run_flags, sweep_flags, spectrum_flags;
    auto* run = app.add_subcommand("run", "run the configured scenario");
    add_run_flags(run, run_flags);
    auto* sweep = app.add_subcommand("sweep", "run a sweep scenario and fit where applicable");
    add_run_flags(sweep, sweep_flags);
    auto* spec = app.add_subcommand("spectrum", "export exchange-matrix spectra");
    add_run_flags(spec, spectrum_flags);

    std::string table, fit_out;
    double w_u = 0.0;
    auto* fit = app.add_subcommand("fit", "fit xi in w = w_u (1 + xi sigma_H) to a table N,L,w");
    fit->add_option("--table", table, "CSV with columns N,L,w")->required();
    fit->add_option("--w-u", w_u, "measured uncorrelated width")->required();
    fit->add_option("--out", fit_out, "directory for fom_fit.json");

    std::string field_csv, pgm_out;
    auto* render = app.add_subcommand("render", "render a field-map CSV as a graymap");
    render->add_option("--field", field_csv, "field-map CSV")->required();
    render->add_option("--out", pgm_out, "output .pgm")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) {
            const auto cfg = resolve(run_flags);
            return cse::is_sweep(cfg.scenario) ? do_sweep(cfg) : do_experiment(cfg);
        }
        if (*sweep)
            return do_sweep(resolve(sweep_flags));
        if (*spec) {
            spectrum_flags.scenario = "spectrum";
            auto cfg = resolve(spectrum_flags);
            cfg.export_spectra = true;
            return do_experiment(cfg);
        }
        if (*fit)
            return do_fit(table, w_u, fit_out);
        if (*render) {
            cse::write_graymap(cse::read_field_csv(field_csv), pgm_out);
            return kOk;
        }
    } catch (const cse::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const cse::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kConfig;
    } catch (const cse::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
