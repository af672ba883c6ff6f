#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>

#include "mergesim/task.hpp"

namespace mergesim {

using MergedTaskPtr = std::shared_ptr<MergedTask>;

// Level-specific hash keys for one task. Equality at a higher level implies
// equality at all lower levels by construction.
struct LevelKeys {
  std::uint64_t task_key = 0;     // (stream, segment, op, params)
  std::uint64_t data_op_key = 0;  // (stream, segment, op)
  std::uint64_t data_key = 0;     // (stream, segment)

  std::uint64_t at(SimilarityLevel level) const;
};

LevelKeys make_keys(const Task& t);

// True when `member` matches `probe` under the given level's identity fields.
bool member_matches(const Task& member, const Task& probe,
                    SimilarityLevel level);

// The outcome the engine realized for an arriving task; drives the
// hash-table update protocol.
enum class AdmitOutcome {
  MergedTaskLevel,  // step 1: no table change
  MergedLower,      // step 2: arriving keys point at the compound
  DeclinedMatch,    // step 3: matching entries redirected to the arrival
  NoMatch,          // step 4: all three keys inserted for the arrival
};

struct LookupResult {
  SimilarityLevel level;
  MergedTaskPtr target;
};

// Three hash tables, one per similarity level, mapping level keys to queued
// compounds. Lookup probes at most three buckets and verifies candidates by
// field comparison, so a hash collision degrades to "no match" rather than a
// wrong merge. Single-writer: the engine's event loop owns all mutation.
class SimilarityIndex {
 public:
  // Highest-level match for an arriving (not yet inserted) task.
  std::optional<LookupResult> lookup(const Task& arriving) const;

  // Applies the update protocol. `target` is the compound the arriving task
  // ended up in (steps 2-4); ignored for step 1.
  void on_admit(const Task& arriving, AdmitOutcome outcome,
                const MergedTaskPtr& target);

  // Removes every entry pointing at a compound that left the batch queue.
  void on_dequeue(const MergedTaskPtr& departed);

  std::size_t size(SimilarityLevel level) const;
  bool empty() const;

  std::uint64_t last_lookup_probes() const { return last_probes_; }
  std::uint64_t total_probes() const { return total_probes_; }

 private:
  std::unordered_map<std::uint64_t, MergedTaskPtr> tables_[3];
  mutable std::uint64_t last_probes_ = 0;
  mutable std::uint64_t total_probes_ = 0;
};

}  // namespace mergesim
