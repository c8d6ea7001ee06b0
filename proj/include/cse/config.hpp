#pragma once

// Run configuration.
//
// The file format is flat text, one `section.key = value` per line, `#` starts
// a comment, lists are comma separated. Unknown or repeated keys are errors.
//
//   cloud.N            atom count
//   cloud.Lx/Ly/Lz     box edges (wavelengths)
//   cloud.dipole_axis  unit vector, e.g. 0,1,0
//   cloud.laser_axis   unit vector, e.g. 1,0,0
//   run.scenario       norm-trace | field-evolution | coherence-vs-time |
//                      coherence-vs-N | fom-sweep | asym-x | asym-z |
//                      spectrum | zobs-sensitivity
//   run.instances      number of random clouds (default 20)
//   run.base_seed      instance i uses base_seed + i
//   run.threads        worker count for instances
//   run.output         output directory
//   run.representative true: 5 instances, per-instance output only
//   run.times          observation times in tau, ascending, first is 0
//   evolution.norm_step  spacing of the dense norm trace (tau)
//   grid.z_obs / grid.x_span / grid.y_span / grid.spacing
//   analysis.window    half-width of the correlation window (wavelengths)
//   analysis.t_fit     time at which sweeps report w
//   sweep.values       swept values (N, or z_obs for zobs-sensitivity)
//   sweep.density      atoms per cubic wavelength for fom-sweep
//   export.field_maps / export.graymaps / export.positions / export.spectra

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cse/ensemble.hpp"
#include "cse/radiation.hpp"

namespace cse {

enum class Scenario {
    NormTrace,
    FieldEvolution,
    CoherenceVsTime,
    CoherenceVsN,
    FomSweep,
    AsymX,
    AsymZ,
    Spectrum,
    ZobsSensitivity,
};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

// Scenarios that vary one parameter across several experiments.
bool is_sweep(Scenario s);

struct RunConfig {
    CloudSpec cloud;
    std::vector<double> times{0.0, 10.0, 20.0, 30.0, 40.0};
    ObservationGrid grid;
    double window = 10.0;
    double t_fit = 40.0;
    double norm_step = 0.5;

    Scenario scenario = Scenario::CoherenceVsTime;
    std::size_t instances = 20;
    std::uint64_t base_seed = 1;
    std::size_t threads = 1;
    bool representative = false;
    std::filesystem::path output = "out";

    std::vector<double> sweep_values;
    double sweep_density = 1500.0 / (40.0 * 40.0 * 40.0);

    bool export_field_maps = false;
    bool export_graymaps = false;
    bool export_positions = false;
    bool export_spectra = false;

    // Throws ConfigError.
    void validate() const;

    CloudSpec cloud_for(std::size_t instance) const;
};

// Scenario presets (box shape, default sweep values, export switches)
// applied before the file's own keys.
RunConfig defaults_for(Scenario s);

// A scenario override replaces run.scenario, including its presets.
RunConfig parse_config(std::istream& in, std::optional<Scenario> scenario = {});
RunConfig parse_config_text(std::string_view text, std::optional<Scenario> scenario = {});

// Reads a config file, or the config echo embedded in a metadata.json.
RunConfig load_config(const std::filesystem::path& path, std::optional<Scenario> scenario = {});

// Canonical text form; parse_config_text(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

}  // namespace cse
