#pragma once

#include <cstddef>

#include "mergesim/impact.hpp"

namespace mergesim {

enum class PositionOutcome { Place, CancelMerge };

struct PositionDecision {
  PositionOutcome outcome = PositionOutcome::CancelMerge;
  std::size_t index = 0;   // valid when outcome == Place
  int probes_used = 0;     // impact evaluations consumed
};

enum class FcfsMergeAnchor { Existing, Arriving };

// Placement that respects the active queuing policy: FCFS keeps the existing
// task's spot (or adopts the arrival time, per config), EDF and MaxUrgency
// re-insert by the compound's updated key.
std::size_t position_maintained(const SystemSnapshot& snapshot,
                                QueuingPolicy policy,
                                const MergeCandidate& candidate, double alpha,
                                const SharingFactors& rho,
                                FcfsMergeAnchor anchor = FcfsMergeAnchor::Existing);

// Binary probe over the insertion range: place when a midpoint harms nobody,
// move front when the compound runs late, move back when others do, cancel
// when both happen or the range empties. Single descent, no backtracking.
PositionDecision probe_logarithmic(const SystemSnapshot& snapshot,
                                   const MergeCandidate& candidate,
                                   double alpha, QueuingPolicy policy,
                                   const SharingFactors& rho);

// FCFS-only: phase 1 walks the queue for the latest index where the compound
// still meets its earliest deadline, phase 2 spends the single impact
// evaluation to confirm nobody behind is newly late.
PositionDecision probe_linear(const SystemSnapshot& snapshot,
                              const MergeCandidate& candidate, double alpha,
                              const SharingFactors& rho);

// Evaluates every insertion index; returns the latest appropriate one.
// Test oracle and reference implementation for the heuristics.
PositionDecision probe_exhaustive(const SystemSnapshot& snapshot,
                                  const MergeCandidate& candidate, double alpha,
                                  QueuingPolicy policy,
                                  const SharingFactors& rho);

// An index is appropriate when the compound meets its earliest deadline there
// and no other task becomes late relative to the no-merge branch.
bool position_appropriate(const ImpactReport& report);

}  // namespace mergesim
