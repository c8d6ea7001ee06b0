#include "cse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>
#include <thread>

#include "cse/errors.hpp"

namespace cse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool needs_fields(Scenario s)
{
    return s != Scenario::NormTrace && s != Scenario::Spectrum;
}

double box_scale(const CloudSpec& c)
{
    return std::cbrt(c.Lx * c.Ly * c.Lz);
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd)
{
    mean = 0.0;
    sd = 0.0;
    if (xs.empty())
        return;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2)
        return;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

InstanceRecord run_instance(const RunConfig& config, std::size_t index)
{
    const auto start = Clock::now();
    const CloudSpec spec = config.cloud_for(index);
    InstanceRecord rec;
    rec.index = index;
    rec.seed = spec.seed;
    rec.times = config.times;

    try {
        AtomPositions atoms = sample_cloud(spec);
        rec.resampled = atoms.resampled;

        std::shared_ptr<const Eigensystem> eig;
        {
            const ExchangeMatrix exchange = assemble_exchange(atoms, spec.dipole_axis);
            eig = std::make_shared<const Eigensystem>(decompose(exchange));
        }
        rec.spectrum = spectrum(*eig, box_scale(spec));

        const Propagator prop(eig, initial_amplitudes(atoms, spec.laser_axis));

        // Dense trace out to one step past the last observation time so the
        // centred late-time rate is available.
        const double t_last = config.times.back();
        const double t_end = t_last + 1.0;
        const auto steps = static_cast<std::size_t>(std::floor(t_end / config.norm_step + 1e-9));
        for (std::size_t k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * config.norm_step;
            rec.norms.times.push_back(t);
            rec.norms.norms.push_back(prop.norm(t));
        }
        rec.late_rate = t_last >= 1.0 ? prop.decay_rate(t_last, 1.0) : prop.decay_rate(1.0, 1.0);

        if (needs_fields(config.scenario)) {
            for (double t : config.times) {
                FieldMap map = field_map(atoms, prop.at(t), spec.dipole_axis, config.grid);
                const CorrelationProfile hx = cross_correlation(map, Axis::X, config.window);
                const CorrelationProfile hy = cross_correlation(map, Axis::Y, config.window);
                rec.wx.push_back(coherence_width(hx, t));
                rec.wy.push_back(coherence_width(hy, t));
                if (rec.lags.empty())
                    rec.lags = hx.lags;
                std::vector<double> mag(hx.H.size());
                std::transform(hx.H.begin(), hx.H.end(), mag.begin(),
                               [](std::complex<double> h) { return std::abs(h); });
                rec.abs_hx.push_back(std::move(mag));
                if (config.export_field_maps)
                    rec.maps.push_back(std::move(map));
            }
        }
        if (config.export_positions)
            rec.atoms = std::move(atoms);
        rec.ok = true;
    } catch (const ConfigError& e) {
        rec.failure = FailureKind::Config;
        rec.error = e.what();
    } catch (const NumericalError& e) {
        rec.failure = FailureKind::Numerical;
        rec.error = e.what();
    } catch (const DomainError& e) {
        rec.failure = FailureKind::Domain;
        rec.error = e.what();
    } catch (const std::exception& e) {
        rec.failure = FailureKind::Other;
        rec.error = e.what();
    }
    if (!rec.ok)
        std::clog << "[experiment] instance " << index << " (seed " << rec.seed
                  << ") failed: " << rec.error << '\n';
    rec.seconds = seconds_since(start);
    return rec;
}

const WidthStats& ExperimentResult::width_at(double t) const
{
    for (const WidthStats& w : wx)
        if (w.t == t)
            return w;
    throw ConfigError("no widths recorded at t = " + std::to_string(t));
}

void aggregate(ExperimentResult& r)
{
    const auto& cfg = r.config;
    std::vector<const InstanceRecord*> ok;
    for (const auto& rec : r.records)
        if (rec.ok)
            ok.push_back(&rec);
    r.completed = ok.size();
    r.partial = r.completed < r.records.size();

    r.wx.clear();
    r.wy.clear();
    r.mean_abs_hx.clear();
    r.lags.clear();
    if (needs_fields(cfg.scenario)) {
        for (std::size_t k = 0; k < cfg.times.size(); ++k) {
            for (int a = 0; a < 2; ++a) {
                WidthStats ws;
                ws.t = cfg.times[k];
                std::vector<double> vals;
                for (const auto* rec : ok) {
                    const CoherenceWidth& w = a == 0 ? rec->wx[k] : rec->wy[k];
                    if (w.saturated)
                        ++ws.saturated;
                    else
                        vals.push_back(w.w);
                }
                ws.n = vals.size();
                mean_std(vals, ws.mean, ws.std);
                (a == 0 ? r.wx : r.wy).push_back(ws);
            }
            if (!ok.empty()) {
                std::vector<double> acc(ok.front()->abs_hx[k].size(), 0.0);
                for (const auto* rec : ok)
                    for (std::size_t i = 0; i < acc.size(); ++i)
                        acc[i] += rec->abs_hx[k][i];
                for (double& v : acc)
                    v /= static_cast<double>(ok.size());
                r.mean_abs_hx.push_back(std::move(acc));
            }
        }
        if (!ok.empty())
            r.lags = ok.front()->lags;
    }

    r.norms = {};
    if (!ok.empty()) {
        r.norms.times = ok.front()->norms.times;
        const std::size_t m = r.norms.times.size();
        r.norms.mean.assign(m, 0.0);
        r.norms.min.assign(m, INFINITY);
        r.norms.max.assign(m, -INFINITY);
        for (const auto* rec : ok) {
            for (std::size_t i = 0; i < m; ++i) {
                const double v = rec->norms.norms[i];
                r.norms.mean[i] += v;
                r.norms.min[i] = std::min(r.norms.min[i], v);
                r.norms.max[i] = std::max(r.norms.max[i], v);
            }
        }
        for (double& v : r.norms.mean)
            v /= static_cast<double>(ok.size());
    }

    std::vector<double> sigmas;
    for (const auto* rec : ok)
        sigmas.push_back(rec->spectrum.sample_sigma);
    mean_std(sigmas, r.sigma_mean, r.sigma_std);
    r.closed_form_sigma = sigma_h_closed_form(static_cast<double>(cfg.cloud.N), box_scale(cfg.cloud));
}

ExperimentResult run_experiment(const RunConfig& config)
{
    config.validate();
    const auto start = Clock::now();
    ExperimentResult result;
    result.config = config;
    if (config.representative)
        result.config.instances = 5;
    const std::size_t n = result.config.instances;
    result.records.resize(n);

    const std::size_t workers = std::min(config.threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            result.records[i] = run_instance(result.config, i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                    result.records[i] = run_instance(result.config, i);
            });
        }
    }
    aggregate(result);
    result.wall_seconds = seconds_since(start);
    return result;
}

RunConfig sweep_point_config(const RunConfig& base, double value)
{
    RunConfig c = base;
    auto as_count = [&](double v) {
        const double r = std::round(v);
        if (r < 1.0 || std::abs(r - v) > 1e-9)
            throw ConfigError("sweep value " + std::to_string(v) + " is not an atom count");
        return static_cast<std::size_t>(r);
    };
    switch (base.scenario) {
    case Scenario::CoherenceVsN:
    case Scenario::AsymX:
    case Scenario::AsymZ:
        c.cloud.N = as_count(value);
        break;
    case Scenario::FomSweep: {
        c.cloud.N = as_count(value);
        const double L = std::cbrt(value / base.sweep_density);
        c.cloud.Lx = c.cloud.Ly = c.cloud.Lz = L;
        break;
    }
    case Scenario::ZobsSensitivity:
        c.grid.z_obs = value;
        break;
    default:
        throw ConfigError("scenario " + std::string(to_string(base.scenario)) +
                          " is not a sweep");
    }
    return c;
}

double measured_uncorrelated_width(const SweepResult& s)
{
    const SweepPoint* smallest = nullptr;
    for (const auto& p : s.points)
        if (p.result.completed > 0 && (!smallest || p.config.cloud.N < smallest->config.cloud.N))
            smallest = &p;
    if (!smallest)
        throw NumericalError("no completed sweep point to measure w_u from");
    return smallest->result.width_at(0.0).mean;
}

SweepResult sweep(const RunConfig& base, const std::vector<double>& values)
{
    SweepResult out;
    out.scenario = base.scenario;
    out.variable = base.scenario == Scenario::ZobsSensitivity ? "z_obs" : "N";

    // Validate every point before any computation.
    std::vector<RunConfig> configs;
    for (double v : values) {
        configs.push_back(sweep_point_config(base, v));
        configs.back().validate();
    }

    if (base.scenario == Scenario::AsymX || base.scenario == Scenario::AsymZ) {
        out.time_series = run_experiment(base);
        out.partial = out.partial || out.time_series->partial;
    }

    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepPoint p{values[i], configs[i], run_experiment(configs[i])};
        out.partial = out.partial || p.result.partial;
        out.points.push_back(std::move(p));
    }

    if (base.scenario == Scenario::FomSweep) {
        std::vector<FomPoint> used;
        for (const auto& p : out.points) {
            FomPoint fp{static_cast<double>(p.config.cloud.N), p.config.cloud.Lx, 0.0};
            bool usable = p.result.completed > 0;
            if (usable) {
                const WidthStats& w = p.result.width_at(base.t_fit);
                fp.w = w.mean;
                usable = w.n > 0;
            }
            out.fom_points.push_back(fp);
            out.fom_used.push_back(usable);
            if (usable)
                used.push_back(fp);
        }
        if (used.size() >= 3)
            out.fit = fit_fom(used, measured_uncorrelated_width(out));
    }
    return out;
}

}  // namespace cse
