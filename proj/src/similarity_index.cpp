#include "mergesim/similarity_index.hpp"

#include <array>
#include <stdexcept>

#include "mergesim/rng.hpp"

namespace mergesim {

namespace {

void hash_int(std::uint64_t& h, std::int64_t v) {
  h = fnv1a(&v, sizeof(v), h);
}

void hash_str(std::uint64_t& h, const std::string& s) {
  h = fnv1a(s.data(), s.size(), h);
  const char sep = '\x1f';
  h = fnv1a(&sep, 1, h);
}

constexpr std::array<SimilarityLevel, 3> kLevelsHighFirst = {
    SimilarityLevel::TaskLevel,
    SimilarityLevel::DataAndOperation,
    SimilarityLevel::DataOnly,
};

}  // namespace

std::uint64_t LevelKeys::at(SimilarityLevel level) const {
  switch (level) {
    case SimilarityLevel::TaskLevel: return task_key;
    case SimilarityLevel::DataAndOperation: return data_op_key;
    case SimilarityLevel::DataOnly: return data_key;
  }
  throw std::invalid_argument("unknown SimilarityLevel");
}

LevelKeys make_keys(const Task& t) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  hash_int(h, t.stream_id);
  hash_int(h, t.segment_idx);
  LevelKeys keys;
  keys.data_key = h;
  hash_int(h, static_cast<std::int64_t>(t.op.op_type));
  keys.data_op_key = h;
  for (const auto& p : t.op.params) hash_str(h, p);
  keys.task_key = h;
  return keys;
}

bool member_matches(const Task& member, const Task& probe,
                    SimilarityLevel level) {
  if (member.stream_id != probe.stream_id ||
      member.segment_idx != probe.segment_idx) {
    return false;
  }
  if (level == SimilarityLevel::DataOnly) return true;
  if (member.op.op_type != probe.op.op_type) return false;
  if (level == SimilarityLevel::DataAndOperation) return true;
  return member.op.params == probe.op.params;
}

std::optional<LookupResult> SimilarityIndex::lookup(
    const Task& arriving) const {
  const LevelKeys keys = make_keys(arriving);
  last_probes_ = 0;
  for (SimilarityLevel level : kLevelsHighFirst) {
    const auto& table = tables_[static_cast<int>(level)];
    ++last_probes_;
    ++total_probes_;
    auto it = table.find(keys.at(level));
    if (it == table.end()) continue;
    for (const Task& member : it->second->members) {
      if (member_matches(member, arriving, level)) {
        return LookupResult{level, it->second};
      }
    }
    // Hash collision: key matched but no member did. Treat as no match at
    // this level and keep probing lower ones.
  }
  return std::nullopt;
}

void SimilarityIndex::on_admit(const Task& arriving, AdmitOutcome outcome,
                               const MergedTaskPtr& target) {
  if (outcome == AdmitOutcome::MergedTaskLevel) return;
  if (!target) {
    throw std::logic_error("on_admit: outcome requires a target compound");
  }
  const LevelKeys keys = make_keys(arriving);
  for (SimilarityLevel level : kLevelsHighFirst) {
    tables_[static_cast<int>(level)].insert_or_assign(keys.at(level), target);
  }
}

void SimilarityIndex::on_dequeue(const MergedTaskPtr& departed) {
  if (!departed) throw std::logic_error("on_dequeue: null compound");
  // Every entry pointing at a compound carries a key derivable from one of
  // its members, so removal never needs a table scan.
  for (const Task& member : departed->members) {
    const LevelKeys keys = make_keys(member);
    for (SimilarityLevel level : kLevelsHighFirst) {
      auto& table = tables_[static_cast<int>(level)];
      auto it = table.find(keys.at(level));
      if (it != table.end() && it->second == departed) table.erase(it);
    }
  }
}

std::size_t SimilarityIndex::size(SimilarityLevel level) const {
  return tables_[static_cast<int>(level)].size();
}

bool SimilarityIndex::empty() const {
  return tables_[0].empty() && tables_[1].empty() && tables_[2].empty();
}

}  // namespace mergesim
