#pragma once

#include <string>
#include <vector>

#include "gasil/config.hpp"
#include "gasil/trainer.hpp"

namespace gasil {

// One completed (or loaded) training run.
struct RunRecord {
    ExperimentConfig config;
    std::vector<IterationRow> rows;
    std::string directory;
    double wall_clock_seconds = 0.0;

    // last row carrying an evaluation result
    double final_eval_return() const;
};

// CSV column names, identical for both agents; cells that do not apply stay
// empty. Documented in docs/schema.md.
std::string csv_header();
std::string csv_row(const IterationRow& row);

// Runs total_steps/horizon iterations, streaming rows to <dir>/run.csv and
// leaving config_resolved.toml, meta.txt, checkpoints and the buffer snapshot
// in the output directory. Fully deterministic per (config, seed) apart from
// the wall-clock entry in meta.txt.
RunRecord run_experiment(const ExperimentConfig& config);

// Reads a run directory written by run_experiment back into a RunRecord.
RunRecord load_run_record(const std::string& dir);

enum class SweepAxis { BufferCapacity, DiscUpdates, Alpha, ObsNoise, Delay };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

// One run per (value, seed); run directories are <output_dir>/<axis>_<value>_seed<seed>.
// Failures are recorded in the summary and the sweep continues. Writes
// <output_dir>/summary.csv.
std::vector<RunRecord> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                 const std::vector<double>& values,
                                 const std::vector<std::uint64_t>& seeds);

}  // namespace gasil
