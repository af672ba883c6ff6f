#include "mergesim/snapshot.hpp"

namespace mergesim {

BatchEntry to_entry(const MergedTask& m) {
  BatchEntry e;
  e.id = m.front_id();
  e.queue_arrival = m.queue_arrival;
  e.earliest_deadline = m.earliest_deadline;
  e.mean = m.combined_mean;
  e.sd = m.combined_sd;
  e.members.reserve(m.members.size());
  for (const Task& t : m.members) {
    e.members.push_back(
        MemberRef{t.id, t.arrival, t.deadline, t.exec_mean, t.exec_sd});
  }
  return e;
}

}  // namespace mergesim
