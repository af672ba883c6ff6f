#include "mergesim/impact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace mergesim {

namespace {

std::size_t find_entry(const SystemSnapshot& snapshot, std::uint64_t id) {
  for (std::size_t i = 0; i < snapshot.batch.size(); ++i) {
    if (snapshot.batch[i].id == id) return i;
  }
  throw std::invalid_argument("evaluate_merge: existing compound not queued");
}

// Estimated availability of each machine before any batch task is placed:
// now + remaining + inflated estimates of its local pending queue.
std::vector<double> initial_availability(const SystemSnapshot& snapshot,
                                         double alpha) {
  std::vector<double> avail;
  avail.reserve(snapshot.machines.size());
  for (const MachineState& m : snapshot.machines) {
    double a = snapshot.now + m.remaining;
    for (const BatchEntry& p : m.pending) {
      a += estimated_execution_time(p.mean, p.sd, alpha);
    }
    avail.push_back(a);
  }
  return avail;
}

// Dispatches the queue in order onto the machine with the earliest estimated
// availability and records one verdict per member.
std::vector<TaskVerdict> simulate_dispatch(const SystemSnapshot& snapshot,
                                           const std::vector<BatchEntry>& queue,
                                           double alpha) {
  std::vector<double> avail = initial_availability(snapshot, alpha);
  if (avail.empty()) {
    throw std::invalid_argument("snapshot has no machines");
  }
  std::vector<TaskVerdict> verdicts;
  for (const BatchEntry& entry : queue) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < avail.size(); ++m) {
      if (avail[m] < avail[best]) best = m;
    }
    const double done =
        avail[best] + estimated_execution_time(entry.mean, entry.sd, alpha);
    avail[best] = done;
    for (const MemberRef& member : entry.members) {
      verdicts.push_back(
          TaskVerdict{member.id, member.deadline, done, done > member.deadline});
    }
  }
  return verdicts;
}

}  // namespace

BatchEntry compound_entry(const SystemSnapshot& snapshot,
                          const MergeCandidate& candidate,
                          const SharingFactors& rho,
                          bool adopt_joiner_arrival) {
  const BatchEntry& existing = snapshot.batch[find_entry(snapshot, candidate.existing_id)];
  // Rebuild the compound's cost from the entry view.
  MergedTask shadow;
  shadow.combined_mean = existing.mean;
  shadow.combined_sd = existing.sd;
  auto [mean, sd] = merged_cost(shadow, candidate.arriving, candidate.level, rho);

  BatchEntry e = existing;
  e.mean = mean;
  e.sd = sd;
  e.earliest_deadline =
      std::min(existing.earliest_deadline, candidate.arriving.deadline);
  if (adopt_joiner_arrival) e.queue_arrival = candidate.arriving.arrival;
  e.members.push_back(MemberRef{candidate.arriving.id,
                                candidate.arriving.arrival,
                                candidate.arriving.deadline,
                                candidate.arriving.exec_mean,
                                candidate.arriving.exec_sd});
  return e;
}

std::size_t position_count(const SystemSnapshot& snapshot,
                           std::uint64_t existing_id) {
  find_entry(snapshot, existing_id);
  return snapshot.batch.size();  // (n-1 others) + 1 insertion slots
}

double completion_time(const SystemSnapshot& snapshot, std::size_t machine,
                       const std::vector<std::pair<double, double>>& prefix,
                       std::pair<double, double> candidate, double alpha) {
  if (machine >= snapshot.machines.size()) {
    throw std::invalid_argument("completion_time: machine out of range");
  }
  double c = snapshot.now + snapshot.machines[machine].remaining;
  for (const auto& [mean, sd] : prefix) {
    c += estimated_execution_time(mean, sd, alpha);
  }
  c += estimated_execution_time(candidate.first, candidate.second, alpha);
  return c;
}

ImpactReport evaluate_merge(const SystemSnapshot& snapshot,
                            const MergeCandidate& candidate,
                            std::size_t position, double alpha,
                            QueuingPolicy policy, const SharingFactors& rho) {
  const std::size_t existing_idx = find_entry(snapshot, candidate.existing_id);
  const BatchEntry compound = compound_entry(snapshot, candidate, rho);

  // With merge: lift the existing entry out and insert the compound at the
  // requested position.
  std::vector<BatchEntry> with_queue;
  with_queue.reserve(snapshot.batch.size());
  for (std::size_t i = 0; i < snapshot.batch.size(); ++i) {
    if (i != existing_idx) with_queue.push_back(snapshot.batch[i]);
  }
  if (position > with_queue.size()) {
    throw std::out_of_range("evaluate_merge: position out of range");
  }
  with_queue.insert(with_queue.begin() + static_cast<std::ptrdiff_t>(position),
                    compound);

  // Without merge: the arriving task joins the queue where the active policy
  // would put a fresh arrival.
  std::vector<BatchEntry> without_queue = snapshot.batch;
  const BatchEntry fresh = to_entry(make_singleton(candidate.arriving));
  const std::size_t fresh_idx =
      policy_insert_index(without_queue, fresh, policy, alpha);
  without_queue.insert(
      without_queue.begin() + static_cast<std::ptrdiff_t>(fresh_idx), fresh);

  ImpactReport report;
  report.with_verdicts = simulate_dispatch(snapshot, with_queue, alpha);
  report.without_verdicts = simulate_dispatch(snapshot, without_queue, alpha);

  std::unordered_set<std::uint64_t> pair_ids;
  for (const MemberRef& m : compound.members) pair_ids.insert(m.id);

  double compound_done = 0.0;
  for (const TaskVerdict& v : report.with_verdicts) {
    if (v.late) {
      ++report.misses_with_merge;
      if (!pair_ids.count(v.member_id)) ++report.other_misses_with;
    }
    if (pair_ids.count(v.member_id)) compound_done = v.completion;
  }
  for (const TaskVerdict& v : report.without_verdicts) {
    if (v.late) {
      ++report.misses_without_merge;
      if (!pair_ids.count(v.member_id)) ++report.other_misses_without;
    }
  }
  report.compound_completion = compound_done;
  report.merged_task_meets_deadline =
      compound_done <= compound.earliest_deadline;
  return report;
}

MergeDecision decide(const ImpactReport& report) {
  return report.misses_with_merge <= report.misses_without_merge
             ? MergeDecision::Merge
             : MergeDecision::Decline;
}

}  // namespace mergesim
