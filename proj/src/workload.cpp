#include "mergesim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mergesim/rng.hpp"

namespace mergesim {

double ExecProfile::mean_for(OpType op, const std::string& param) const {
  for (const Entry& e : entries) {
    if (e.op == op && e.param == param) return e.mean;
  }
  throw std::invalid_argument(std::string("no execution profile for ") +
                              to_string(op) + "/" + param);
}

ExecProfile ExecProfile::default_profile() {
  ExecProfile p;
  p.entries = {
      {OpType::AdjustFrameRate, "30fps", 1.0},
      {OpType::AdjustFrameRate, "24fps", 0.9},
      {OpType::AdjustBitRate, "4m", 1.5},
      {OpType::AdjustBitRate, "2m", 1.35},
      {OpType::ReduceResolution, "720p", 2.0},
      {OpType::ReduceResolution, "480p", 1.8},
      {OpType::ChangeCodec, "h265", 8.0},
      {OpType::ChangeCodec, "vp9", 7.2},
  };
  return p;
}

void ExecProfile::validate() const {
  if (entries.empty()) throw std::invalid_argument("exec profile is empty");
  for (const Entry& e : entries) {
    if (!(e.mean > 0.0)) {
      throw std::invalid_argument("exec profile means must be > 0");
    }
    if (e.param.empty()) {
      throw std::invalid_argument("exec profile param must be non-empty");
    }
  }
}

void DeadlineModel::validate() const {
  if (kind == DeadlineModelKind::Streaming && !(startup_delay > 0.0)) {
    throw std::invalid_argument("startup_delay must be > 0");
  }
  if (kind == DeadlineModelKind::Slack && !(slack_factor > 0.0)) {
    throw std::invalid_argument("slack_factor must be > 0");
  }
}

void WorkloadSpec::validate() const {
  if (total_tasks < 1) throw std::invalid_argument("total_tasks must be >= 1");
  if (streams < 1) throw std::invalid_argument("streams must be >= 1");
  if (min_segments < 1 || max_segments < min_segments) {
    throw std::invalid_argument("segment range invalid");
  }
  if (!(segment_duration > 0.0)) {
    throw std::invalid_argument("segment_duration must be > 0");
  }
  if (group_size < 1) throw std::invalid_argument("group_size must be >= 1");
  if (cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  if (!(high_period_seconds > 0.0)) {
    throw std::invalid_argument("high_period_seconds must be > 0");
  }
  if (share_probability < 0.0 || share_probability > 1.0) {
    throw std::invalid_argument("share_probability must be in [0, 1]");
  }
  double wsum = 0.0;
  for (double w : op_weights) {
    if (w < 0.0) throw std::invalid_argument("op weights must be >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("op weights are all zero");
  if (!(sigma_ratio >= 0.0)) {
    throw std::invalid_argument("sigma_ratio must be >= 0");
  }
  profile.validate();
  deadline.validate();
}

namespace {

struct OpChoice {
  OpType op;
  std::string param;
  double mean;
};

// Weighted deck of (op, param) choices drawn without replacement so the
// marginal mix stays close to the configured weights even on short traces.
class OpDeck {
 public:
  OpDeck(const WorkloadSpec& spec, SplitMix64& rng) : rng_(rng) {
    double wsum = 0.0;
    for (double w : spec.op_weights) wsum += w;
    std::map<OpType, int> per_op_entries;
    for (const auto& e : spec.profile.entries) per_op_entries[e.op]++;
    for (const auto& e : spec.profile.entries) {
      const double w = spec.op_weights[static_cast<int>(e.op)];
      const int copies = std::max(
          w > 0.0 ? 1 : 0,
          static_cast<int>(std::lround(w / wsum * 64.0 /
                                       per_op_entries[e.op])));
      for (int i = 0; i < copies; ++i) {
        deck_.push_back(OpChoice{e.op, e.param, e.mean});
      }
    }
    if (deck_.empty()) throw std::invalid_argument("op deck is empty");
    pos_ = deck_.size();
  }

  OpChoice draw() {
    if (pos_ == deck_.size()) {
      for (std::size_t i = deck_.size() - 1; i > 0; --i) {
        std::swap(deck_[i], deck_[rng_.below(i + 1)]);
      }
      pos_ = 0;
    }
    return deck_[pos_++];
  }

 private:
  SplitMix64& rng_;
  std::vector<OpChoice> deck_;
  std::size_t pos_ = 0;
};

struct Session {
  std::int64_t stream = 0;
  std::int64_t next_seg = 0;
  std::int64_t end_seg = 0;  // exclusive
  std::int64_t offset = 0;   // playback position within this session
  std::int64_t viewer = 0;
  double start_time = 0.0;
  OpChoice op;
};

struct GroupKey {
  std::int64_t stream = 0;
  std::int64_t first_seg = 0;
  int count = 0;
};

}  // namespace

std::vector<Task> generate(const WorkloadSpec& spec, std::uint64_t seed) {
  spec.validate();
  SplitMix64 rng(mix_seed(seed, 0x776f726b6c6f6164ull));
  OpDeck deck(spec, rng);

  const std::int64_t group_count =
      (spec.total_tasks + spec.group_size - 1) / spec.group_size;
  // Group rate chosen so the expected trace span covers `cycles` base+high
  // cycles: each cycle contributes 5*r*T groups (3T at rate r, T at 2r).
  const double t_high = spec.high_period_seconds;
  const double rate_base = static_cast<double>(group_count) /
                           (5.0 * t_high * static_cast<double>(spec.cycles));
  const std::int64_t cycle_us = static_cast<std::int64_t>(4.0 * t_high * 1e6);
  const std::int64_t high_start_us =
      static_cast<std::int64_t>(3.0 * t_high * 1e6);

  std::vector<Task> out;
  out.reserve(static_cast<std::size_t>(spec.total_tasks));
  std::vector<Session> active;
  std::deque<GroupKey> recent;
  std::int64_t now_us = 0;
  std::int64_t next_stream = 0;
  std::int64_t next_viewer = 0;
  std::uint64_t next_id = 1;

  auto emit_group = [&](std::int64_t stream, std::int64_t first_seg, int count,
                        std::int64_t viewer, const OpChoice& op) {
    for (int k = 0; k < count; ++k) {
      if (static_cast<int>(out.size()) >= spec.total_tasks) return;
      Task t;
      t.id = next_id++;
      t.stream_id = stream;
      t.segment_idx = first_seg + k;
      t.op = OperationSpec::make(op.op, {op.param});
      t.arrival = static_cast<double>(now_us) / 1e6;
      t.exec_mean = op.mean;
      t.exec_sd = spec.sigma_ratio * op.mean;
      t.viewer_id = viewer;
      out.push_back(std::move(t));
    }
    recent.push_back(GroupKey{stream, first_seg, count});
    if (recent.size() > 64) recent.pop_front();
  };

  auto new_session = [&]() -> Session {
    Session s;
    s.stream = next_stream++;
    s.next_seg = 0;
    s.end_seg = rng.range(spec.min_segments, spec.max_segments);
    s.offset = 0;
    s.viewer = next_viewer++;
    s.start_time = static_cast<double>(now_us) / 1e6;
    s.op = deck.draw();
    return s;
  };

  const double due_horizon = spec.deadline.startup_delay;

  while (static_cast<int>(out.size()) < spec.total_tasks) {
    // Advance the clock by a uniformly random gap with the period's mean.
    const std::int64_t pos = cycle_us > 0 ? now_us % cycle_us : 0;
    const double rate = pos >= high_start_us ? 2.0 * rate_base : rate_base;
    const std::int64_t mean_gap_us = static_cast<std::int64_t>(1e6 / rate);
    now_us += static_cast<std::int64_t>(
        rng.below(static_cast<std::uint64_t>(2 * mean_gap_us) + 1));
    const double now_s = static_cast<double>(now_us) / 1e6;

    const bool try_share = !recent.empty() && rng.unit() < spec.share_probability;
    if (try_share) {
      const GroupKey& src = recent[rng.below(recent.size())];
      emit_group(src.stream, src.first_seg, src.count, next_viewer++,
                 deck.draw());
      continue;
    }

    // Fresh work: advance the most starved session, or start a new one when
    // none is due yet and the concurrency cap allows it.
    std::size_t starved = active.size();
    double starved_due = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const Session& s = active[i];
      const double due = s.start_time + spec.deadline.startup_delay +
                         static_cast<double>(s.offset) * spec.segment_duration;
      if (starved == active.size() || due < starved_due) {
        starved = i;
        starved_due = due;
      }
    }
    const bool session_due =
        starved < active.size() && starved_due - now_s <= due_horizon;
    const bool may_create = static_cast<int>(active.size()) < spec.streams;

    if (active.empty() || (!session_due && may_create)) {
      active.push_back(new_session());
      starved = active.size() - 1;
    }
    Session& s = active[starved];
    const int count = static_cast<int>(
        std::min<std::int64_t>(spec.group_size, s.end_seg - s.next_seg));
    emit_group(s.stream, s.next_seg, count, s.viewer, s.op);
    s.next_seg += count;
    s.offset += count;
    if (s.next_seg >= s.end_seg) {
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(starved));
    }
  }

  assign_deadlines(out, spec.deadline, spec.segment_duration);
  return out;
}

void assign_deadlines(std::vector<Task>& trace, const DeadlineModel& model,
                      double segment_duration) {
  model.validate();
  if (model.kind == DeadlineModelKind::Slack) {
    for (Task& t : trace) {
      t.deadline = t.arrival + model.slack_factor * t.exec_mean;
    }
    return;
  }
  // Streaming: anchor each (viewer, stream) session at its first arrival and
  // pace deadlines at playback rate in segment order.
  struct SessionAgg {
    double start = 0.0;
    std::vector<Task*> tasks;
  };
  std::map<std::pair<std::int64_t, std::int64_t>, SessionAgg> sessions;
  for (Task& t : trace) {
    auto& agg = sessions[{t.viewer_id, t.stream_id}];
    if (agg.tasks.empty() || t.arrival < agg.start) agg.start = t.arrival;
    agg.tasks.push_back(&t);
  }
  for (auto& [key, agg] : sessions) {
    std::sort(agg.tasks.begin(), agg.tasks.end(), [](const Task* a, const Task* b) {
      return a->segment_idx < b->segment_idx;
    });
    for (std::size_t k = 0; k < agg.tasks.size(); ++k) {
      agg.tasks[k]->deadline = agg.start + model.startup_delay +
                               static_cast<double>(k) * segment_duration;
    }
  }
}

namespace {

constexpr const char* kHeader =
    "id,stream_id,segment_idx,op_type,param,arrival_s,mu_s,sigma_s,deadline_s,"
    "viewer_id";

std::vector<std::string> split_params(const std::string& joined) {
  std::vector<std::string> params;
  std::string cur;
  for (char c : joined) {
    if (c == ';') {
      params.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  params.push_back(cur);
  return params;
}

[[noreturn]] void parse_fail(int line, const std::string& field,
                             const std::string& why) {
  std::ostringstream os;
  os << "trace parse error at line " << line << ", field '" << field
     << "': " << why;
  throw std::runtime_error(os.str());
}

std::string field_label(const char* name, int column) {
  return std::string(name) + " (column " + std::to_string(column) + ")";
}

double parse_double(const std::string& s, int line, const char* field,
                    int column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    parse_fail(line, field_label(field, column), "not a number: '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, int line, const char* field,
                       int column) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    parse_fail(line, field_label(field, column), "not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

void save_trace(const std::vector<Task>& trace, std::ostream& out) {
  out << kHeader << "\n";
  char buf[512];
  for (const Task& t : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%" PRIu64 ",%" PRId64 ",%" PRId64 ",%s,%s,%.17g,%.17g,%.17g,%.17g,%" PRId64 "\n",
                  t.id, t.stream_id, t.segment_idx, to_string(t.op.op_type),
                  t.op.params_joined().c_str(), t.arrival, t.exec_mean,
                  t.exec_sd, t.deadline, t.viewer_id);
    out << buf;
  }
}

void save_trace_file(const std::vector<Task>& trace, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open trace file for write: " + path);
  save_trace(trace, f);
  if (!f.good()) throw std::runtime_error("failed writing trace file: " + path);
}

std::vector<Task> load_trace(std::istream& in) {
  std::vector<Task> trace;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kHeader) {
        parse_fail(line_no, "header", "expected '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 10) {
      parse_fail(line_no, "line", "expected 10 fields, got " +
                                      std::to_string(fields.size()));
    }
    Task t;
    t.id = static_cast<std::uint64_t>(parse_int(fields[0], line_no, "id", 1));
    t.stream_id = parse_int(fields[1], line_no, "stream_id", 2);
    t.segment_idx = parse_int(fields[2], line_no, "segment_idx", 3);
    try {
      t.op = OperationSpec::make(op_type_from_string(fields[3]),
                                 split_params(fields[4]));
    } catch (const std::invalid_argument& e) {
      parse_fail(line_no, "op_type/param (column 4)", e.what());
    }
    t.arrival = parse_double(fields[5], line_no, "arrival_s", 6);
    t.exec_mean = parse_double(fields[6], line_no, "mu_s", 7);
    t.exec_sd = parse_double(fields[7], line_no, "sigma_s", 8);
    t.deadline = parse_double(fields[8], line_no, "deadline_s", 9);
    t.viewer_id = parse_int(fields[9], line_no, "viewer_id", 10);
    try {
      t.validate();
    } catch (const std::invalid_argument& e) {
      parse_fail(line_no, "task", e.what());
    }
    trace.push_back(std::move(t));
  }
  if (!header_seen) {
    throw std::runtime_error("trace parse error: missing header line");
  }
  return trace;
}

std::vector<Task> load_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace file: " + path);
  return load_trace(f);
}

}  // namespace mergesim
