#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mergesim/snapshot.hpp"

namespace mergesim {

enum class QueuingPolicy { Fcfs, Edf, MaxUrgency };

const char* to_string(QueuingPolicy p);
QueuingPolicy queuing_policy_from_string(std::string_view s);

// Total order over batch entries. FCFS by queue arrival, EDF by earliest
// deadline, MaxUrgency by descending urgency (ties among the +inf group by
// smaller deadline). All ties resolve by governing id.
bool entry_precedes(const BatchEntry& a, const BatchEntry& b,
                    QueuingPolicy policy, double alpha);

// Index where a fresh entry would be inserted into an ordered queue.
std::size_t policy_insert_index(const std::vector<BatchEntry>& queue,
                                const BatchEntry& entry, QueuingPolicy policy,
                                double alpha);

}  // namespace mergesim
