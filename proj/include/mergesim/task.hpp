#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mergesim {

enum class OpType {
  ReduceResolution,
  AdjustBitRate,
  AdjustFrameRate,
  ChangeCodec,
};

constexpr int kOpTypeCount = 4;

const char* to_string(OpType op);
OpType op_type_from_string(std::string_view s);

// A transcoding operation plus its parameters. Parameters are canonicalized
// (lowercased, sorted) at construction so equal specs produce byte-identical
// key material regardless of how the caller ordered them.
struct OperationSpec {
  OpType op_type = OpType::ReduceResolution;
  std::vector<std::string> params;

  static OperationSpec make(OpType op, std::vector<std::string> params);

  std::string params_joined(char sep = ';') const;
  bool operator==(const OperationSpec&) const = default;
};

// One segment-processing request. Deadlines may precede arrivals: infeasible
// tasks are admitted and executed like any other.
struct Task {
  std::uint64_t id = 0;
  std::int64_t stream_id = 0;
  std::int64_t segment_idx = 0;
  OperationSpec op;
  double arrival = 0.0;
  double deadline = 0.0;
  double exec_mean = 0.0;
  double exec_sd = 0.0;
  std::int64_t viewer_id = 0;

  void validate() const;  // throws std::invalid_argument
};

// Ordered by reuse value: TaskLevel shares everything, DataOnly only the
// segment fetch. Detection always prefers the highest level.
enum class SimilarityLevel {
  DataOnly = 0,
  DataAndOperation = 1,
  TaskLevel = 2,
};

const char* to_string(SimilarityLevel level);

// Fraction of a joiner's mean execution time added to the compound when
// merging below Task level.
struct SharingFactors {
  double data_and_operation = 0.5;
  double data_only = 0.65;

  double factor(SimilarityLevel level) const;
  void validate() const;
};

// A compound task. A plain task is a singleton. Members keep their individual
// deadlines; only the earliest one drives queue ordering.
struct MergedTask {
  std::vector<Task> members;
  std::vector<SimilarityLevel> level_links;  // one per member after the first
  double combined_mean = 0.0;
  double combined_sd = 0.0;
  double earliest_deadline = 0.0;
  double queue_arrival = 0.0;  // FCFS ordering key (governing member)

  std::uint64_t front_id() const { return members.front().id; }
  std::size_t member_count() const { return members.size(); }
};

MergedTask make_singleton(const Task& t);

// (combined_mean, combined_sd) after joining `joiner` to `base` at `level`.
// TaskLevel leaves the cost unchanged; lower levels add rho(level)*mu and
// fold the scaled sd in quadrature.
std::pair<double, double> merged_cost(const MergedTask& base,
                                      const Task& joiner,
                                      SimilarityLevel level,
                                      const SharingFactors& rho);

// Appends the joiner and updates cost, earliest deadline and, when
// `adopt_joiner_arrival` is set, the FCFS ordering key.
void merge_member(MergedTask& base, const Task& joiner, SimilarityLevel level,
                  const SharingFactors& rho, bool adopt_joiner_arrival = false);

// E = mu + alpha*sigma, clamped below at zero. Rejects non-finite inputs.
double estimated_execution_time(double mean, double sd, double alpha);

// U = 1/(deadline - est). Non-positive slack maps to +infinity (maximally
// urgent); callers break ties among infinities by smaller deadline.
double urgency_score(double deadline, double est_exec);

// W = deadline - arrival - est. Negative means the task was infeasible on
// arrival.
double waitable_time(double arrival, double deadline, double est_exec);

// Actual runtime drawn once per compound at dispatch: Normal(mean, sd)
// truncated below at 5% of the mean. Deterministic in (task_id, run_seed).
double sample_runtime(double mean, double sd, std::uint64_t task_id,
                      std::uint64_t run_seed);

}  // namespace mergesim
