#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mergesim/assessor.hpp"
#include "mergesim/impact.hpp"
#include "mergesim/policy.hpp"
#include "mergesim/position.hpp"
#include "mergesim/similarity_index.hpp"
#include "mergesim/task.hpp"

namespace mergesim {

enum class MergePolicyMode { NoMerge, Conservative, Aggressive, Adaptive };
enum class PositionMode { Maintained, Relaxed };
enum class RelaxedHeuristic { Linear, Logarithmic, Exhaustive };

const char* to_string(MergePolicyMode m);
MergePolicyMode merge_mode_from_string(std::string_view s);
const char* to_string(PositionMode m);
PositionMode position_mode_from_string(std::string_view s);
const char* to_string(RelaxedHeuristic h);
RelaxedHeuristic heuristic_from_string(std::string_view s);
const char* to_string(FcfsMergeAnchor a);
FcfsMergeAnchor fcfs_anchor_from_string(std::string_view s);

struct EngineConfig {
  int machine_count = 8;
  QueuingPolicy policy = QueuingPolicy::Fcfs;
  MergePolicyMode mode = MergePolicyMode::NoMerge;
  PositionMode position_mode = PositionMode::Maintained;
  RelaxedHeuristic heuristic = RelaxedHeuristic::Linear;
  FcfsMergeAnchor fcfs_merge_arrival = FcfsMergeAnchor::Existing;
  SharingFactors rho;
  double beta = 2.0;
  std::uint64_t seed = 1;
  double sd_scale = 1.0;         // multiplies task sigma at submission
  int machine_queue_depth = 0;   // local pending slots per machine
  double osl_window_seconds = 60.0;

  void validate() const;  // throws std::invalid_argument
};

enum class AdmissionOutcome {
  InsertedNoMatch,
  MergedTaskLevel,
  MergedLower,
  InsertedDeclined,
};

struct TaskRecord {
  std::uint64_t id = 0;
  std::int64_t stream_id = 0;
  std::int64_t segment_idx = 0;
  OpType op_type = OpType::ReduceResolution;
  std::string param;
  double arrival = 0.0;
  double deadline = 0.0;
  double dispatch = -1.0;
  double completion = -1.0;  // -1 until the task finishes
  bool late = false;
};

struct MetricsReport {
  std::size_t total_tasks = 0;
  std::size_t late_tasks = 0;
  double dmr = 0.0;
  double makespan = 0.0;
  std::size_t merges_task_level = 0;
  std::size_t merges_data_op = 0;
  std::size_t merges_data_only = 0;
  std::size_t declined_merges = 0;
  std::size_t matches_found = 0;
  std::size_t evaluations = 0;  // impact evaluations consumed
  double mean_osl = 0.0;
  std::vector<std::pair<double, double>> osl_trace;  // (time, raw value)
  std::vector<TaskRecord> records;                   // sorted by id
};

// Deterministic discrete-event core: batch queue under a queuing policy,
// m homogeneous machines, and the admission pipeline
// similarity-index -> merge policy -> impact-evaluator -> position-finder.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  // Advances the clock to the task's arrival and runs the admission
  // pipeline. Tasks must arrive in non-decreasing time order.
  AdmissionOutcome submit(const Task& task);

  // Moves batch-queue heads onto free machines.
  void dispatch_step();

  // Runs every remaining event to completion and builds the report.
  MetricsReport finish();

  SystemSnapshot snapshot() const;
  double now() const { return now_; }
  std::size_t queue_size() const { return queue_.size(); }
  std::uint64_t state_hash() const;
  const EngineConfig& config() const { return config_; }

 private:
  struct Machine {
    MergedTaskPtr current;  // null when idle
    double completion = 0.0;
    double service_start = 0.0;
    std::vector<MergedTaskPtr> pending;
  };

  void advance_to(double t);
  void complete_due(double before_t);
  void start_service(std::size_t machine_idx, MergedTaskPtr compound);
  double machine_availability(const Machine& m, double alpha) const;
  MergedTaskPtr insert_fresh(const Task& task, double alpha);
  void place_compound(const MergedTaskPtr& compound, std::size_t index);
  std::size_t queue_index_of(const MergedTaskPtr& compound) const;

  EngineConfig config_;
  double now_ = 0.0;
  std::vector<MergedTaskPtr> queue_;  // execution order
  std::vector<Machine> machines_;
  SimilarityIndex index_;
  std::unordered_set<std::uint64_t> seen_ids_;
  std::unordered_map<std::uint64_t, TaskRecord> records_;
  std::vector<CompletionRecord> completed_;
  MetricsReport metrics_;
  double last_arrival_ = 0.0;
  bool finished_ = false;
};

// Convenience wrapper: fresh engine, submit the whole trace, finish.
MetricsReport run_trace(const std::vector<Task>& trace,
                        const EngineConfig& config);

struct ComparisonRow {
  MergePolicyMode mode = MergePolicyMode::NoMerge;
  double dmr = 0.0;
  double makespan = 0.0;
  double dmr_reduction = 0.0;       // dmr(NoMerge) - dmr(mode)
  double makespan_saving_pct = 0.0; // 100 * (mk(NoMerge) - mk(mode)) / mk(NoMerge)
  MetricsReport report;
};

// Runs each mode on the identical trace/config/seed and reports paired
// reductions against the NoMerge baseline.
std::vector<ComparisonRow> paired_comparison(
    const std::vector<Task>& trace, const EngineConfig& config,
    const std::vector<MergePolicyMode>& modes);

}  // namespace mergesim
