#include "mergesim/position.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mergesim {

namespace {

std::size_t queue_index_of(const SystemSnapshot& snapshot, std::uint64_t id) {
  for (std::size_t i = 0; i < snapshot.batch.size(); ++i) {
    if (snapshot.batch[i].id == id) return i;
  }
  throw std::invalid_argument("position finder: existing compound not queued");
}

}  // namespace

bool position_appropriate(const ImpactReport& report) {
  return report.merged_task_meets_deadline &&
         report.other_misses_with <= report.other_misses_without;
}

std::size_t position_maintained(const SystemSnapshot& snapshot,
                                QueuingPolicy policy,
                                const MergeCandidate& candidate, double alpha,
                                const SharingFactors& rho,
                                FcfsMergeAnchor anchor) {
  const std::size_t existing_idx = queue_index_of(snapshot, candidate.existing_id);
  if (policy == QueuingPolicy::Fcfs) {
    if (anchor == FcfsMergeAnchor::Existing) return existing_idx;
    return snapshot.batch.size() - 1;  // fresh-arrival spot, existing removed
  }
  // EDF / MaxUrgency: re-insert the compound by its updated key among the
  // remaining entries.
  const BatchEntry compound = compound_entry(
      snapshot, candidate, rho, anchor == FcfsMergeAnchor::Arriving);
  std::vector<BatchEntry> rest;
  rest.reserve(snapshot.batch.size() - 1);
  for (std::size_t i = 0; i < snapshot.batch.size(); ++i) {
    if (i != existing_idx) rest.push_back(snapshot.batch[i]);
  }
  return policy_insert_index(rest, compound, policy, alpha);
}

PositionDecision probe_logarithmic(const SystemSnapshot& snapshot,
                                   const MergeCandidate& candidate,
                                   double alpha, QueuingPolicy policy,
                                   const SharingFactors& rho) {
  PositionDecision decision;
  std::ptrdiff_t lo = 0;
  std::ptrdiff_t hi =
      static_cast<std::ptrdiff_t>(position_count(snapshot, candidate.existing_id)) - 1;
  while (lo <= hi) {
    const std::size_t mid = static_cast<std::size_t>(lo + (hi - lo) / 2);
    const ImpactReport report =
        evaluate_merge(snapshot, candidate, mid, alpha, policy, rho);
    ++decision.probes_used;
    const bool compound_ok = report.merged_task_meets_deadline;
    const bool others_ok =
        report.other_misses_with <= report.other_misses_without;
    if (compound_ok && others_ok) {
      decision.outcome = PositionOutcome::Place;
      decision.index = mid;
      return decision;
    }
    if (!compound_ok && others_ok) {
      hi = static_cast<std::ptrdiff_t>(mid) - 1;  // run earlier
    } else if (compound_ok && !others_ok) {
      lo = static_cast<std::ptrdiff_t>(mid) + 1;  // run later
    } else {
      break;  // hopeless in both directions
    }
  }
  decision.outcome = PositionOutcome::CancelMerge;
  return decision;
}

PositionDecision probe_linear(const SystemSnapshot& snapshot,
                              const MergeCandidate& candidate, double alpha,
                              const SharingFactors& rho) {
  PositionDecision decision;
  const std::size_t existing_idx = queue_index_of(snapshot, candidate.existing_id);
  const BatchEntry compound = compound_entry(snapshot, candidate, rho);
  const double est =
      estimated_execution_time(compound.mean, compound.sd, alpha);

  // Phase 1: accumulate machine availabilities front-to-back; the compound's
  // completion at insertion index p uses the minimum availability after the
  // first p entries. That minimum is non-decreasing, so the walk stops at the
  // first infeasible index.
  std::vector<double> avail;
  avail.reserve(snapshot.machines.size());
  for (const MachineState& m : snapshot.machines) {
    double a = snapshot.now + m.remaining;
    for (const BatchEntry& p : m.pending) {
      a += estimated_execution_time(p.mean, p.sd, alpha);
    }
    avail.push_back(a);
  }
  if (avail.empty()) throw std::invalid_argument("snapshot has no machines");
  bool any_feasible = false;
  std::size_t latest = 0;
  std::size_t p = 0;
  for (std::size_t i = 0;; ++i) {
    const double start = *std::min_element(avail.begin(), avail.end());
    if (start + est <= compound.earliest_deadline) {
      any_feasible = true;
      latest = p;
    } else {
      break;  // starts only grow from here
    }
    if (i >= snapshot.batch.size()) break;
    if (i == existing_idx) continue;  // lifted out; occupies no slot
    auto best = std::min_element(avail.begin(), avail.end());
    *best += estimated_execution_time(snapshot.batch[i].mean,
                                      snapshot.batch[i].sd, alpha);
    ++p;
  }
  if (!any_feasible) {
    decision.outcome = PositionOutcome::CancelMerge;
    return decision;
  }

  // Phase 2: one impact evaluation at the latest feasible index.
  const ImpactReport report =
      evaluate_merge(snapshot, candidate, latest, alpha, QueuingPolicy::Fcfs, rho);
  decision.probes_used = 1;
  if (position_appropriate(report)) {
    decision.outcome = PositionOutcome::Place;
    decision.index = latest;
  } else {
    decision.outcome = PositionOutcome::CancelMerge;
  }
  return decision;
}

PositionDecision probe_exhaustive(const SystemSnapshot& snapshot,
                                  const MergeCandidate& candidate, double alpha,
                                  QueuingPolicy policy,
                                  const SharingFactors& rho) {
  PositionDecision decision;
  const std::size_t positions = position_count(snapshot, candidate.existing_id);
  bool found = false;
  std::size_t best = 0;
  for (std::size_t idx = 0; idx < positions; ++idx) {
    const ImpactReport report =
        evaluate_merge(snapshot, candidate, idx, alpha, policy, rho);
    ++decision.probes_used;
    if (position_appropriate(report)) {
      found = true;
      best = idx;  // keep the latest appropriate index
    }
  }
  if (found) {
    decision.outcome = PositionOutcome::Place;
    decision.index = best;
  } else {
    decision.outcome = PositionOutcome::CancelMerge;
  }
  return decision;
}

}  // namespace mergesim
