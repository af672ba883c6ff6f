#pragma once

#include <iosfwd>
#include <vector>

#include "mergesim/config.hpp"
#include "mergesim/engine.hpp"

namespace mergesim {

// One experiment cell: every mode runs on identical per-repetition traces.
struct CellSpec {
  int load = 0;
  double sd_scale = 1.0;
  bool position_finder = false;
};

struct RepResult {
  CellSpec cell;
  int rep = 0;
  std::uint64_t seed = 0;
  std::vector<ComparisonRow> rows;  // one per plan mode
};

// Expands the plan and runs all (cell, repetition) jobs, in parallel when
// plan.threads allows; results come back in deterministic plan order.
std::vector<RepResult> run_cells(const ExperimentPlan& plan,
                                 const EngineConfig& engine,
                                 const WorkloadSpec& workload);

// Long-form CSV: one raw row per (cell, mode, repetition) plus one aggregate
// row per (cell, mode) carrying means and 95% confidence half-widths.
void write_experiment_csv(const ExperimentPlan& plan,
                          const EngineConfig& engine,
                          const std::vector<RepResult>& results,
                          std::ostream& out);

// Single-run summary row and per-task records (cmd_run outputs).
void write_summary_csv(const EngineConfig& config, const MetricsReport& report,
                       std::ostream& out);
void write_task_csv(const MetricsReport& report, std::ostream& out);

struct MeanCi {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 95%, t-quantile below 30 samples
  std::size_t n = 0;
};

MeanCi mean_ci95(const std::vector<double>& samples);

// One-sided 95% t critical value for a paired directional claim.
double t_crit_one_sided_95(std::size_t n);

// Formats a double so equal values always serialize identically.
std::string format_double(double v);

}  // namespace mergesim
