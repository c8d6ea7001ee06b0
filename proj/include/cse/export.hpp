#pragma once

// Output files. Everything for one experiment is written into a staging
// directory first and moved into place only once all files are complete.

#include <filesystem>

#include "json.hpp"

#include "cse/experiment.hpp"

namespace cse {

// Creates dir if needed and proves it is writable. Throws IoError.
void ensure_writable(const std::filesystem::path& dir);

// Provenance document: config echo (re-loadable), seeds, timings, version,
// partiality and per-instance failures.
nlohmann::json experiment_metadata(const ExperimentResult& result);

void export_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

// Combined table sweep_table.csv plus one sub-directory per swept value; a
// fom-sweep also writes fom_table.csv and fom_fit.json.
void export_sweep(const SweepResult& result, const RunConfig& base,
                  const std::filesystem::path& dir);

}  // namespace cse
