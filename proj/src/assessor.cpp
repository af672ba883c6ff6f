#include "mergesim/assessor.hpp"

#include <algorithm>

#include "mergesim/task.hpp"

namespace mergesim {

namespace {

// Severity contribution of one task: 0 if infeasible or on time.
double contribution(double arrival, double deadline, double est_exec,
                    double completion) {
  const double waitable = waitable_time(arrival, deadline, est_exec);
  if (waitable <= 0.0) return 0.0;
  if (completion <= deadline) return 0.0;
  return (completion - deadline) / waitable;
}

}  // namespace

OslReading osl(const SystemSnapshot& snapshot, double beta) {
  OslReading reading;
  reading.window = OslWindow::CurrentEstimate;
  double sum = 0.0;

  std::vector<double> avail;
  avail.reserve(snapshot.machines.size());
  for (const MachineState& m : snapshot.machines) {
    double a = snapshot.now + m.remaining;
    for (const MemberRef& member : m.in_service) {
      const double est =
          estimated_execution_time(member.mean, member.sd, beta);
      sum += contribution(member.arrival, member.deadline, est,
                          snapshot.now + m.remaining);
      ++reading.sample_count;
    }
    for (const BatchEntry& p : m.pending) {
      const double done = a + estimated_execution_time(p.mean, p.sd, beta);
      for (const MemberRef& member : p.members) {
        const double est =
            estimated_execution_time(member.mean, member.sd, beta);
        sum += contribution(member.arrival, member.deadline, est, done);
        ++reading.sample_count;
      }
      a = done;
    }
    avail.push_back(a);
  }

  if (!snapshot.batch.empty() && !avail.empty()) {
    for (const BatchEntry& entry : snapshot.batch) {
      std::size_t best = 0;
      for (std::size_t m = 1; m < avail.size(); ++m) {
        if (avail[m] < avail[best]) best = m;
      }
      const double done =
          avail[best] + estimated_execution_time(entry.mean, entry.sd, beta);
      avail[best] = done;
      for (const MemberRef& member : entry.members) {
        const double est =
            estimated_execution_time(member.mean, member.sd, beta);
        sum += contribution(member.arrival, member.deadline, est, done);
        ++reading.sample_count;
      }
    }
  }

  reading.value =
      reading.sample_count == 0 ? 0.0 : sum / static_cast<double>(reading.sample_count);
  return reading;
}

OslReading osl_observed(const std::vector<CompletionRecord>& records,
                        double window_seconds, double now, double beta) {
  OslReading reading;
  reading.window = OslWindow::PastObserved;
  double sum = 0.0;
  for (const CompletionRecord& r : records) {
    if (r.completion < now - window_seconds || r.completion > now) continue;
    const double est = estimated_execution_time(r.mean, r.sd, beta);
    sum += contribution(r.arrival, r.deadline, est, r.completion);
    ++reading.sample_count;
  }
  reading.value =
      reading.sample_count == 0 ? 0.0 : sum / static_cast<double>(reading.sample_count);
  return reading;
}

double adaptive_alpha(double osl_value, double beta) {
  const double clamped = std::clamp(osl_value, 0.0, 1.0);
  return beta - 2.0 * beta * clamped;
}

double raw_miss_ratio(const std::vector<CompletionRecord>& records) {
  if (records.empty()) return 0.0;
  std::size_t late = 0;
  for (const CompletionRecord& r : records) {
    if (r.completion > r.deadline) ++late;
  }
  return static_cast<double>(late) / static_cast<double>(records.size());
}

double arrival_processing_ratio(std::size_t arrivals, std::size_t completions) {
  if (completions == 0) return arrivals == 0 ? 0.0 : 1e9;
  return static_cast<double>(arrivals) / static_cast<double>(completions);
}

}  // namespace mergesim
