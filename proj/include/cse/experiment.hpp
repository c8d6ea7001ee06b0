#pragma once

// Multi-instance orchestration: each instance samples its own cloud, evolves
// it, and reduces field maps to coherence widths. Instances are independent
// and run on a bounded worker pool; all reductions use instance order so the
// results do not depend on scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cse/coherence.hpp"
#include "cse/config.hpp"
#include "cse/coupling.hpp"
#include "cse/evolution.hpp"
#include "cse/radiation.hpp"

namespace cse {

inline constexpr const char* kVersion = "0.1.0";

enum class FailureKind { None, Config, Numerical, Domain, Other };

struct InstanceRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    FailureKind failure = FailureKind::None;
    std::string error;
    double seconds = 0.0;

    std::size_t resampled = 0;
    NormTrace norms;          // dense trace on a norm_step grid
    double late_rate = 0.0;   // -d ln norm / dt at the last observation time
    SpectrumStats spectrum;

    std::vector<double> times;
    std::vector<CoherenceWidth> wx, wy;
    std::vector<double> lags;
    std::vector<std::vector<double>> abs_hx;  // |H_x| per observation time

    std::vector<FieldMap> maps;          // only with export.field_maps
    std::optional<AtomPositions> atoms;  // only with export.positions
};

// Runs one instance with seed base_seed + index. Failures are captured in the
// record rather than thrown.
InstanceRecord run_instance(const RunConfig& config, std::size_t index);

struct WidthStats {
    double t = 0.0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation over instances
    std::size_t n = 0;          // instances entering mean/std
    std::size_t saturated = 0;  // excluded because the width saturated
};

struct NormAggregate {
    std::vector<double> times, mean, min, max;
};

struct ExperimentResult {
    RunConfig config;
    std::vector<InstanceRecord> records;

    std::vector<WidthStats> wx, wy;
    NormAggregate norms;
    std::vector<double> lags;
    std::vector<std::vector<double>> mean_abs_hx;  // per time
    double sigma_mean = 0.0;
    double sigma_std = 0.0;
    double closed_form_sigma = 0.0;

    std::size_t completed = 0;
    bool partial = false;
    double wall_seconds = 0.0;

    const WidthStats& width_at(double t) const;
};

// Recomputes every aggregate from result.records.
void aggregate(ExperimentResult& result);

ExperimentResult run_experiment(const RunConfig& config);

struct SweepPoint {
    double value = 0.0;
    RunConfig config;
    ExperimentResult result;
};

struct SweepResult {
    Scenario scenario = Scenario::CoherenceVsN;
    std::string variable;  // "N" or "z_obs"
    std::vector<SweepPoint> points;
    std::optional<FomFit> fit;
    std::vector<FomPoint> fom_points;
    std::vector<bool> fom_used;  // false where w saturated or no instance completed
    std::optional<ExperimentResult> time_series;  // asym-x / asym-z w-vs-t run
    bool partial = false;
};

// Config for one swept value: N at fixed box (coherence-vs-N, asym-*),
// N with a cubic box at sweep.density (fom-sweep), or z_obs.
RunConfig sweep_point_config(const RunConfig& base, double value);

SweepResult sweep(const RunConfig& base, const std::vector<double>& values);

// Uncorrelated width for the figure-of-merit fit: mean t = 0 width of the
// smallest-N point.
double measured_uncorrelated_width(const SweepResult& sweep);

}  // namespace cse
