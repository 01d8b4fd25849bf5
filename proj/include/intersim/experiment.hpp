#pragma once

#include <string>
#include <vector>

#include "intersim/config_file.hpp"
#include "intersim/environment.hpp"
#include "intersim/metrics.hpp"

namespace intersim {

// One grid cell: a controller at one penetration rate under one seed.
struct CellResult {
    std::string controller;
    double pr = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<MetricsRow> rows;          // per episode; eval row last for dqn
    std::vector<ConflictRow> conflicts;    // from the reported (eval) episode
};

std::string checkpoint_path(const std::string& out_dir, double pr,
                            std::uint64_t seed);

// Runs one cell. For dqn this trains for cfg.agent.episodes episodes, saves
// a checkpoint, then reports one greedy evaluation episode; for fixed it
// runs the single fixed-time episode. Never throws: failures land in the
// result so other cells can continue.
CellResult run_scenario(const ExperimentConfig& cfg, const std::string& controller,
                        double pr, std::uint64_t seed);

// Evaluation-only cell from an existing checkpoint.
CellResult run_eval(const ExperimentConfig& cfg, const std::string& checkpoint,
                    double pr, std::uint64_t seed);

struct SweepResult {
    std::vector<CellResult> cells;  // grid order: controller, then pr, then seed
    int failed_cells = 0;
};

SweepResult sweep(const ExperimentConfig& cfg);

// Merged artifacts in grid order.
std::vector<MetricsRow> merged_metrics(const SweepResult& r);
std::vector<ConflictRow> merged_conflicts(const SweepResult& r);

// Mean-over-seeds table of the reported episodes, one line per cell group.
std::string summary_table(const SweepResult& r);

// episode_metrics.csv and conflicts.csv under dir (created if needed), plus
// failures.txt when any cell failed.
void write_outputs(const SweepResult& r, const std::string& dir);

}  // namespace intersim
