#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mergesim/policy.hpp"
#include "mergesim/snapshot.hpp"
#include "mergesim/task.hpp"

namespace mergesim {

struct TaskVerdict {
  std::uint64_t member_id = 0;
  double deadline = 0.0;
  double completion = 0.0;
  bool late = false;
};

// Deadline-miss counts for the two virtual-queue branches. Both branches
// cover the same task population; compound members are judged against their
// individual deadlines in each.
struct ImpactReport {
  int misses_with_merge = 0;
  int misses_without_merge = 0;
  int other_misses_with = 0;     // excluding the merge pair's members
  int other_misses_without = 0;
  bool merged_task_meets_deadline = false;
  double compound_completion = 0.0;
  std::vector<TaskVerdict> with_verdicts;
  std::vector<TaskVerdict> without_verdicts;
};

// The merge being considered: arriving task j against queued compound i.
struct MergeCandidate {
  std::uint64_t existing_id = 0;  // governing id of the queued compound
  Task arriving;
  SimilarityLevel level = SimilarityLevel::DataOnly;
};

// Eq.-2 completion estimate: now + remaining-on-machine + sum of inflated
// prefix estimates + the candidate's own inflated estimate. Each per-task
// term is clamped at zero.
double completion_time(const SystemSnapshot& snapshot, std::size_t machine,
                       const std::vector<std::pair<double, double>>& prefix,
                       std::pair<double, double> candidate, double alpha);

// Simulates policy-driven dispatch of the batch queue onto the virtual
// machine queues twice (compound at `position` vs. separate entries) and
// counts individual-deadline misses in each branch. Purely estimate-based:
// no sampling, no live-state mutation.
ImpactReport evaluate_merge(const SystemSnapshot& snapshot,
                            const MergeCandidate& candidate,
                            std::size_t position, double alpha,
                            QueuingPolicy policy, const SharingFactors& rho);

enum class MergeDecision { Merge, Decline };

// Merge iff it does not increase the miss count; ties merge.
MergeDecision decide(const ImpactReport& report);

// Number of legal insertion positions for the compound (queue length after
// the existing entry is lifted out, plus one).
std::size_t position_count(const SystemSnapshot& snapshot,
                           std::uint64_t existing_id);

// Builds the compound entry for a candidate against the snapshot's queue.
BatchEntry compound_entry(const SystemSnapshot& snapshot,
                          const MergeCandidate& candidate,
                          const SharingFactors& rho,
                          bool adopt_joiner_arrival = false);

}  // namespace mergesim
