#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mergesim/task.hpp"

namespace mergesim {

// Mean execution time per (operation, parameter). Only the ratios are
// meaningful; codec changes run about 8x longer than frame-rate changes.
struct ExecProfile {
  struct Entry {
    OpType op;
    std::string param;
    double mean = 0.0;
  };
  std::vector<Entry> entries;

  double mean_for(OpType op, const std::string& param) const;
  static ExecProfile default_profile();
  void validate() const;
};

enum class DeadlineModelKind { Streaming, Slack };

// Streaming: each viewer session's segment k is due at
// session start + startup_delay + k * segment_duration.
// Slack: deadline = arrival + slack_factor * mean.
struct DeadlineModel {
  DeadlineModelKind kind = DeadlineModelKind::Streaming;
  double startup_delay = 6.0;
  double slack_factor = 3.0;

  void validate() const;
};

struct WorkloadSpec {
  int total_tasks = 1000;
  int streams = 32;  // cap on concurrently active viewer sessions
  int min_segments = 5;
  int max_segments = 110;
  double segment_duration = 2.0;
  int group_size = 5;
  int cycles = 15;                   // base+high arrival-rate cycles
  double high_period_seconds = 7.0;  // base period is three times longer
  double share_probability = 0.30;   // chance a group re-requests recent data
  std::array<double, 4> op_weights{1.0, 1.0, 1.0, 1.0};
  ExecProfile profile = ExecProfile::default_profile();
  double sigma_ratio = 0.04;  // sigma = ratio * mean
  DeadlineModel deadline;

  void validate() const;  // throws std::invalid_argument
};

// Deterministic trace synthesis: groups of consecutive segments arrive on a
// bursty base/high cycle; a share of groups re-requests recently seen
// segments under a fresh viewer, creating mergeable pairs.
std::vector<Task> generate(const WorkloadSpec& spec, std::uint64_t seed);

// Rewrites deadlines in place. Streaming groups tasks into (viewer, stream)
// sessions anchored at the session's first arrival.
void assign_deadlines(std::vector<Task>& trace, const DeadlineModel& model,
                      double segment_duration);

// Trace file: UTF-8 CSV, one task per line, '#' comments, header required.
// Columns: id,stream_id,segment_idx,op_type,param,arrival_s,mu_s,sigma_s,
// deadline_s,viewer_id
void save_trace(const std::vector<Task>& trace, std::ostream& out);
void save_trace_file(const std::vector<Task>& trace, const std::string& path);
std::vector<Task> load_trace(std::istream& in);
std::vector<Task> load_trace_file(const std::string& path);

}  // namespace mergesim
