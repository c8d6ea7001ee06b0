#include "cse/export.hpp"

#include <fstream>
#include <system_error>
#include <unistd.h>

#include "cse/errors.hpp"
#include "cse/io.hpp"

namespace cse {

namespace fs = std::filesystem;

namespace {

std::string time_tag(double t) { return "t" + format_number(t); }

// Files are written below <dir>/.staging and renamed into <dir> by commit().
// If the process dies first, <dir> holds no half-written outputs.
class StagedDir {
public:
    explicit StagedDir(const fs::path& dir) : final_(dir), staging_(dir / ".staging")
    {
        std::error_code ec;
        fs::remove_all(staging_, ec);
        fs::create_directories(staging_, ec);
        if (ec)
            throw IoError("cannot create " + staging_.string() + ": " + ec.message());
    }

    const fs::path& path() const { return staging_; }

    void commit()
    {
        for (const auto& entry : fs::directory_iterator(staging_)) {
            const fs::path target = final_ / entry.path().filename();
            std::error_code ec;
            fs::remove_all(target, ec);
            fs::rename(entry.path(), target, ec);
            if (ec)
                throw IoError("cannot move " + entry.path().string() + ": " + ec.message());
        }
        fs::remove_all(staging_);
    }

private:
    fs::path final_;
    fs::path staging_;
};

void write_json(const nlohmann::json& j, const fs::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

const char* failure_name(FailureKind k)
{
    switch (k) {
    case FailureKind::None: return "none";
    case FailureKind::Config: return "configuration";
    case FailureKind::Numerical: return "numerical";
    case FailureKind::Domain: return "domain";
    case FailureKind::Other: return "other";
    }
    return "other";
}

void write_widths(const std::vector<WidthStats>& ws, const fs::path& path)
{
    CsvWriter csv(path, {"t_over_tau", "w_mean", "w_std", "n_instances"});
    for (const auto& w : ws)
        csv.row(w.t, w.mean, w.std, w.n);
}

void write_experiment_files(const ExperimentResult& r, const fs::path& dir)
{
    const RunConfig& cfg = r.config;
    const bool averaged = !cfg.representative;

    write_json(experiment_metadata(r), dir / "metadata.json");

    for (const auto& rec : r.records) {
        if (!rec.ok)
            continue;
        const std::string id = std::to_string(rec.index);
        write_norm_csv(rec.norms, dir / ("norms_instance_" + id + ".csv"));
        if (cfg.export_spectra)
            write_spectrum_csv(rec.spectrum, dir / ("spectrum_instance_" + id + ".csv"));
        if (rec.atoms)
            write_positions_csv(*rec.atoms, dir / ("positions_instance_" + id + ".csv"));
        for (const auto& map : rec.maps) {
            const std::string stem = "field_instance_" + id + "_" + time_tag(map.t);
            write_field_csv(map, dir / (stem + ".csv"));
            if (cfg.export_graymaps)
                write_graymap(map, dir / (stem + ".pgm"));
        }
    }

    {
        CsvWriter csv(dir / "spectrum_summary.csv",
                      {"instance", "seed", "sample_sigma", "closed_form_sigma", "beta_min",
                       "beta_max", "late_rate"});
        for (const auto& rec : r.records) {
            if (!rec.ok)
                continue;
            const auto& s = rec.spectrum;
            csv.row(rec.index, rec.seed, s.sample_sigma, s.closed_form_sigma,
                    s.betas.empty() ? 0.0 : s.betas.front(), s.betas.empty() ? 0.0 : s.betas.back(),
                    rec.late_rate);
        }
    }

    if (!r.wx.empty()) {
        CsvWriter csv(dir / "widths_instances.csv",
                      {"instance", "seed", "t_over_tau", "w_x", "w_y", "saturated_x",
                       "saturated_y"});
        for (const auto& rec : r.records) {
            if (!rec.ok)
                continue;
            for (std::size_t k = 0; k < rec.wx.size(); ++k)
                csv.row(rec.index, rec.seed, rec.times[k], rec.wx[k].w, rec.wy[k].w,
                        rec.wx[k].saturated, rec.wy[k].saturated);
        }
    }

    if (!averaged)
        return;

    if (!r.norms.times.empty()) {
        CsvWriter csv(dir / "norms_aggregate.csv",
                      {"t_over_tau", "norm_mean", "norm_min", "norm_max"});
        for (std::size_t i = 0; i < r.norms.times.size(); ++i)
            csv.row(r.norms.times[i], r.norms.mean[i], r.norms.min[i], r.norms.max[i]);
    }
    if (!r.wx.empty()) {
        write_widths(r.wx, dir / "widths_x.csv");
        write_widths(r.wy, dir / "widths_y.csv");
        for (std::size_t k = 0; k < r.mean_abs_hx.size(); ++k)
            write_correlation_csv(r.lags, r.mean_abs_hx[k],
                                  dir / ("correlation_x_" + time_tag(cfg.times[k]) + ".csv"));
    }
}

}  // namespace

void ensure_writable(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / (".probe-" + std::to_string(::getpid()));
    {
        std::ofstream out(probe);
        if (!out || !(out << "ok"))
            throw IoError("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

nlohmann::json experiment_metadata(const ExperimentResult& r)
{
    using nlohmann::json;
    json seeds = json::array();
    json detail = json::array();
    for (const auto& rec : r.records) {
        seeds.push_back(rec.seed);
        json d = {{"index", rec.index},     {"seed", rec.seed},
                  {"ok", rec.ok},           {"seconds", rec.seconds},
                  {"resampled_atoms", rec.resampled}};
        if (!rec.ok) {
            d["failure"] = failure_name(rec.failure);
            d["error"] = rec.error;
        }
        detail.push_back(std::move(d));
    }
    const double ratio = r.closed_form_sigma > 0.0 ? r.sigma_mean / r.closed_form_sigma : 0.0;
    return {
        {"software", "cse"},
        {"version", kVersion},
        {"scenario", std::string(to_string(r.config.scenario))},
        {"config_text", to_config_text(r.config)},
        {"seeds", seeds},
        {"instances", r.records.size()},
        {"completed", r.completed},
        {"partial", r.partial},
        {"wall_seconds", r.wall_seconds},
        {"instance_detail", detail},
        {"spectrum",
         {{"sample_sigma_mean", r.sigma_mean},
          {"sample_sigma_std", r.sigma_std},
          {"closed_form_sigma", r.closed_form_sigma},
          {"sample_over_closed_form", ratio}}},
    };
}

void export_experiment(const ExperimentResult& result, const fs::path& dir)
{
    ensure_writable(dir);
    StagedDir staged(dir);
    write_experiment_files(result, staged.path());
    staged.commit();
}

void export_sweep(const SweepResult& s, const RunConfig& base, const fs::path& dir)
{
    using nlohmann::json;
    ensure_writable(dir);
    StagedDir staged(dir);
    const fs::path root = staged.path();

    json points = json::array();
    {
        CsvWriter csv(root / "sweep_table.csv",
                      {s.variable.c_str(), "N", "Lx", "Ly", "Lz", "z_obs", "sigma_h",
                       "t_over_tau", "w_mean", "w_std", "n_instances"});
        for (const auto& p : s.points) {
            const std::string sub = s.variable + "_" + format_number(p.value);
            fs::create_directories(root / sub);
            write_experiment_files(p.result, root / sub);
            const auto& c = p.config.cloud;
            for (const auto& w : p.result.wx)
                csv.row(p.value, c.N, c.Lx, c.Ly, c.Lz, p.config.grid.z_obs,
                        sigma_h_closed_form(static_cast<double>(c.N), std::cbrt(c.Lx * c.Ly * c.Lz)),
                        w.t, w.mean, w.std, w.n);
            points.push_back({{"value", p.value},
                              {"directory", sub},
                              {"completed", p.result.completed},
                              {"partial", p.result.partial}});
        }
    }
    if (s.time_series) {
        fs::create_directories(root / "time_series");
        write_experiment_files(*s.time_series, root / "time_series");
    }

    json meta = {
        {"software", "cse"},
        {"version", kVersion},
        {"scenario", std::string(to_string(s.scenario))},
        {"variable", s.variable},
        {"config_text", to_config_text(base)},
        {"partial", s.partial},
        {"points", points},
    };

    if (s.scenario == Scenario::FomSweep) {
        CsvWriter csv(root / "fom_table.csv",
                      {"N", "L", "sigma_h", "w", "used_in_fit", "residual"});
        std::size_t used = 0;
        for (std::size_t i = 0; i < s.fom_points.size(); ++i) {
            const auto& fp = s.fom_points[i];
            const double resid =
                s.fit && s.fom_used[i] ? s.fit->residuals[used] : std::nan("");
            if (s.fom_used[i])
                ++used;
            csv.row(fp.N, fp.L, sigma_h_closed_form(fp.N, fp.L), fp.w, bool(s.fom_used[i]),
                    resid);
        }
        if (s.fit) {
            json fit = {{"xi", s.fit->xi}, {"w_u", s.fit->w_u}, {"residuals", s.fit->residuals}};
            meta["fit"] = fit;
            write_json(fit, root / "fom_fit.json");
        } else {
            meta["fit"] = nullptr;
        }
    }
    write_json(meta, root / "metadata.json");
    staged.commit();
}

}  // namespace cse
