#pragma once

#include <cstdint>
#include <vector>

#include "mergesim/task.hpp"

namespace mergesim {

// Per-member view carried into virtual-queue evaluation and OSL.
struct MemberRef {
  std::uint64_t id = 0;
  double arrival = 0.0;
  double deadline = 0.0;
  double mean = 0.0;  // the member's own standalone cost
  double sd = 0.0;
};

// Evaluation view of one batch-queue compound.
struct BatchEntry {
  std::uint64_t id = 0;  // governing member id; comparator tie-break
  double queue_arrival = 0.0;
  double earliest_deadline = 0.0;
  double mean = 0.0;  // combined cost
  double sd = 0.0;
  std::vector<MemberRef> members;
};

BatchEntry to_entry(const MergedTask& m);

struct MachineState {
  double remaining = 0.0;  // e_r: time left on the in-service task; 0 if idle
  std::vector<MemberRef> in_service;   // members of the in-service compound
  std::vector<BatchEntry> pending;     // local queue (machine_queue_depth > 0)
};

// Immutable copy of the system at an instant; building one never mutates
// live engine state.
struct SystemSnapshot {
  double now = 0.0;
  std::vector<MachineState> machines;
  std::vector<BatchEntry> batch;  // in execution order
};

}  // namespace mergesim
