#pragma once

#include <cstdint>
#include <vector>

#include "mergesim/snapshot.hpp"

namespace mergesim {

enum class OslWindow { CurrentEstimate, PastObserved };

struct OslReading {
  double value = 0.0;  // raw, unclamped
  OslWindow window = OslWindow::CurrentEstimate;
  std::size_t sample_count = 0;  // N_a
};

// One finished task, as needed by the observed-window reading.
struct CompletionRecord {
  std::uint64_t id = 0;
  double arrival = 0.0;
  double deadline = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double completion = 0.0;
};

// Deadline-miss severity averaged over every task in the system (in service,
// machine-pending and batch-queued): infeasible and on-time tasks contribute
// zero, late ones (C - delta) / W. Estimates use alpha fixed at beta so the
// reading does not depend on the current merge aggressiveness.
OslReading osl(const SystemSnapshot& snapshot, double beta);

// Same formula over observed completions within [now - window, now].
OslReading osl_observed(const std::vector<CompletionRecord>& records,
                        double window_seconds, double now, double beta);

// alpha = beta - 2*beta*OSL, with OSL clamped to [0, 1] first.
double adaptive_alpha(double osl_value, double beta);

// Diagnostics only; never control inputs.
double raw_miss_ratio(const std::vector<CompletionRecord>& records);
double arrival_processing_ratio(std::size_t arrivals, std::size_t completions);

}  // namespace mergesim
