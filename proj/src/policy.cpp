#include "mergesim/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace mergesim {

const char* to_string(QueuingPolicy p) {
  switch (p) {
    case QueuingPolicy::Fcfs: return "fcfs";
    case QueuingPolicy::Edf: return "edf";
    case QueuingPolicy::MaxUrgency: return "max_urgency";
  }
  throw std::invalid_argument("unknown QueuingPolicy");
}

QueuingPolicy queuing_policy_from_string(std::string_view s) {
  if (s == "fcfs") return QueuingPolicy::Fcfs;
  if (s == "edf") return QueuingPolicy::Edf;
  if (s == "max_urgency" || s == "mu") return QueuingPolicy::MaxUrgency;
  throw std::invalid_argument("unknown queue policy '" + std::string(s) + "'");
}

bool entry_precedes(const BatchEntry& a, const BatchEntry& b,
                    QueuingPolicy policy, double alpha) {
  switch (policy) {
    case QueuingPolicy::Fcfs:
      if (a.queue_arrival != b.queue_arrival) {
        return a.queue_arrival < b.queue_arrival;
      }
      return a.id < b.id;
    case QueuingPolicy::Edf:
      if (a.earliest_deadline != b.earliest_deadline) {
        return a.earliest_deadline < b.earliest_deadline;
      }
      return a.id < b.id;
    case QueuingPolicy::MaxUrgency: {
      const double ua = urgency_score(
          a.earliest_deadline, estimated_execution_time(a.mean, a.sd, alpha));
      const double ub = urgency_score(
          b.earliest_deadline, estimated_execution_time(b.mean, b.sd, alpha));
      const bool inf_a = std::isinf(ua);
      const bool inf_b = std::isinf(ub);
      if (inf_a && inf_b) {
        if (a.earliest_deadline != b.earliest_deadline) {
          return a.earliest_deadline < b.earliest_deadline;
        }
        return a.id < b.id;
      }
      if (ua != ub) return ua > ub;
      return a.id < b.id;
    }
  }
  throw std::invalid_argument("unknown QueuingPolicy");
}

std::size_t policy_insert_index(const std::vector<BatchEntry>& queue,
                                const BatchEntry& entry, QueuingPolicy policy,
                                double alpha) {
  std::size_t idx = 0;
  while (idx < queue.size() && !entry_precedes(entry, queue[idx], policy, alpha)) {
    ++idx;
  }
  return idx;
}

}  // namespace mergesim
