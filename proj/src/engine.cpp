#include "mergesim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mergesim/rng.hpp"

namespace mergesim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(MergePolicyMode m) {
  switch (m) {
    case MergePolicyMode::NoMerge: return "no_merge";
    case MergePolicyMode::Conservative: return "conservative";
    case MergePolicyMode::Aggressive: return "aggressive";
    case MergePolicyMode::Adaptive: return "adaptive";
  }
  throw std::invalid_argument("unknown MergePolicyMode");
}

MergePolicyMode merge_mode_from_string(std::string_view s) {
  if (s == "no_merge" || s == "none") return MergePolicyMode::NoMerge;
  if (s == "conservative") return MergePolicyMode::Conservative;
  if (s == "aggressive") return MergePolicyMode::Aggressive;
  if (s == "adaptive") return MergePolicyMode::Adaptive;
  throw std::invalid_argument("unknown merge mode '" + std::string(s) + "'");
}

const char* to_string(PositionMode m) {
  return m == PositionMode::Maintained ? "maintained" : "relaxed";
}

PositionMode position_mode_from_string(std::string_view s) {
  if (s == "maintained") return PositionMode::Maintained;
  if (s == "relaxed") return PositionMode::Relaxed;
  throw std::invalid_argument("unknown position mode '" + std::string(s) + "'");
}

const char* to_string(RelaxedHeuristic h) {
  switch (h) {
    case RelaxedHeuristic::Linear: return "linear";
    case RelaxedHeuristic::Logarithmic: return "logarithmic";
    case RelaxedHeuristic::Exhaustive: return "exhaustive";
  }
  throw std::invalid_argument("unknown RelaxedHeuristic");
}

RelaxedHeuristic heuristic_from_string(std::string_view s) {
  if (s == "linear") return RelaxedHeuristic::Linear;
  if (s == "logarithmic") return RelaxedHeuristic::Logarithmic;
  if (s == "exhaustive") return RelaxedHeuristic::Exhaustive;
  throw std::invalid_argument("unknown heuristic '" + std::string(s) + "'");
}

const char* to_string(FcfsMergeAnchor a) {
  return a == FcfsMergeAnchor::Existing ? "existing" : "arriving";
}

FcfsMergeAnchor fcfs_anchor_from_string(std::string_view s) {
  if (s == "existing") return FcfsMergeAnchor::Existing;
  if (s == "arriving") return FcfsMergeAnchor::Arriving;
  throw std::invalid_argument("unknown fcfs merge anchor '" + std::string(s) + "'");
}

void EngineConfig::validate() const {
  if (machine_count < 1) throw std::invalid_argument("machine_count must be >= 1");
  if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
  if (sd_scale < 0.0) throw std::invalid_argument("sd_scale must be >= 0");
  if (machine_queue_depth < 0) {
    throw std::invalid_argument("machine_queue_depth must be >= 0");
  }
  if (osl_window_seconds <= 0.0) {
    throw std::invalid_argument("osl_window_seconds must be > 0");
  }
  rho.validate();
  if (position_mode == PositionMode::Relaxed &&
      heuristic == RelaxedHeuristic::Linear && policy != QueuingPolicy::Fcfs) {
    throw std::invalid_argument(
        "linear probing requires the fcfs queue policy");
  }
}

Engine::Engine(EngineConfig config) : config_(config) {
  config_.validate();
  machines_.resize(static_cast<std::size_t>(config_.machine_count));
}

SystemSnapshot Engine::snapshot() const {
  SystemSnapshot s;
  s.now = now_;
  s.machines.reserve(machines_.size());
  for (const Machine& m : machines_) {
    MachineState ms;
    if (m.current) {
      ms.remaining = m.completion - now_;
      for (const Task& t : m.current->members) {
        ms.in_service.push_back(
            MemberRef{t.id, t.arrival, t.deadline, t.exec_mean, t.exec_sd});
      }
    }
    for (const MergedTaskPtr& p : m.pending) ms.pending.push_back(to_entry(*p));
    s.machines.push_back(std::move(ms));
  }
  s.batch.reserve(queue_.size());
  for (const MergedTaskPtr& p : queue_) s.batch.push_back(to_entry(*p));
  return s;
}

std::uint64_t Engine::state_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix_d = [&h](double v) { h = fnv1a(&v, sizeof(v), h); };
  auto mix_u = [&h](std::uint64_t v) { h = fnv1a(&v, sizeof(v), h); };
  mix_d(now_);
  mix_u(queue_.size());
  for (const MergedTaskPtr& p : queue_) {
    mix_u(p->front_id());
    mix_u(p->member_count());
    mix_d(p->combined_mean);
    mix_d(p->combined_sd);
    mix_d(p->earliest_deadline);
  }
  for (const Machine& m : machines_) {
    mix_u(m.current ? m.current->front_id() : 0);
    mix_d(m.current ? m.completion : -1.0);
    mix_u(m.pending.size());
  }
  for (int level = 0; level < 3; ++level) {
    mix_u(index_.size(static_cast<SimilarityLevel>(level)));
  }
  return h;
}

double Engine::machine_availability(const Machine& m, double alpha) const {
  double a = now_ + (m.current ? m.completion - now_ : 0.0);
  for (const MergedTaskPtr& p : m.pending) {
    a += estimated_execution_time(p->combined_mean, p->combined_sd, alpha);
  }
  return a;
}

void Engine::start_service(std::size_t machine_idx, MergedTaskPtr compound) {
  Machine& m = machines_[machine_idx];
  const double actual =
      sample_runtime(compound->combined_mean, compound->combined_sd,
                     compound->front_id(), config_.seed);
  m.current = std::move(compound);
  m.service_start = now_;
  m.completion = now_ + actual;
  for (const Task& t : m.current->members) {
    records_.at(t.id).dispatch = now_;
  }
}

void Engine::dispatch_step() {
  // Fill idle machines first; lowest index wins ties, matching the virtual
  // dispatch rule used by the evaluator.
  for (std::size_t i = 0; i < machines_.size() && !queue_.empty(); ++i) {
    Machine& m = machines_[i];
    if (m.current) continue;
    if (!m.pending.empty()) {
      MergedTaskPtr next = m.pending.front();
      m.pending.erase(m.pending.begin());
      start_service(i, std::move(next));
    } else {
      MergedTaskPtr head = queue_.front();
      queue_.erase(queue_.begin());
      index_.on_dequeue(head);  // leaving the batch queue ends mergeability
      start_service(i, std::move(head));
    }
  }
  if (config_.machine_queue_depth > 0) {
    const double alpha = config_.beta;
    while (!queue_.empty()) {
      std::size_t best = machines_.size();
      double best_avail = kInf;
      for (std::size_t i = 0; i < machines_.size(); ++i) {
        if (static_cast<int>(machines_[i].pending.size()) >=
            config_.machine_queue_depth) {
          continue;
        }
        const double a = machine_availability(machines_[i], alpha);
        if (a < best_avail) {
          best_avail = a;
          best = i;
        }
      }
      if (best == machines_.size()) break;
      MergedTaskPtr head = queue_.front();
      queue_.erase(queue_.begin());
      index_.on_dequeue(head);
      machines_[best].pending.push_back(std::move(head));
    }
  }
}

void Engine::complete_due(double before_t) {
  for (;;) {
    double earliest = kInf;
    for (const Machine& m : machines_) {
      if (m.current && m.completion < earliest) earliest = m.completion;
    }
    if (earliest == kInf) return;
    if (earliest >= before_t) return;

    // All machines completing at this instant, ordered by compound id.
    std::vector<std::size_t> due;
    for (std::size_t i = 0; i < machines_.size(); ++i) {
      if (machines_[i].current && machines_[i].completion == earliest) {
        due.push_back(i);
      }
    }
    std::sort(due.begin(), due.end(), [this](std::size_t a, std::size_t b) {
      return machines_[a].current->front_id() < machines_[b].current->front_id();
    });
    now_ = earliest;
    for (std::size_t i : due) {
      Machine& m = machines_[i];
      MergedTaskPtr done = std::move(m.current);
      m.current = nullptr;
      for (const Task& t2 : done->members) {
        TaskRecord& rec = records_.at(t2.id);
        rec.completion = now_;
        rec.late = now_ > t2.deadline;
        if (rec.late) ++metrics_.late_tasks;
        completed_.push_back(CompletionRecord{t2.id, t2.arrival, t2.deadline,
                                              t2.exec_mean, t2.exec_sd, now_});
      }
      metrics_.makespan = std::max(metrics_.makespan, now_);
    }
    dispatch_step();
  }
}

void Engine::advance_to(double t) {
  complete_due(t);  // arrivals precede equal-time completions
  now_ = std::max(now_, t);
}

namespace {
// Comparison view without the member list; ordering never reads members.
BatchEntry to_entry_light(const MergedTask& m) {
  BatchEntry e;
  e.id = m.front_id();
  e.queue_arrival = m.queue_arrival;
  e.earliest_deadline = m.earliest_deadline;
  e.mean = m.combined_mean;
  e.sd = m.combined_sd;
  return e;
}
}  // namespace

MergedTaskPtr Engine::insert_fresh(const Task& task, double alpha) {
  MergedTaskPtr fresh = std::make_shared<MergedTask>(make_singleton(task));
  const BatchEntry probe = to_entry_light(*fresh);
  std::size_t idx = 0;
  while (idx < queue_.size() &&
         !entry_precedes(probe, to_entry_light(*queue_[idx]), config_.policy,
                         alpha)) {
    ++idx;
  }
  queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(idx), fresh);
  return fresh;
}

void Engine::place_compound(const MergedTaskPtr& compound, std::size_t index) {
  queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(index), compound);
}

std::size_t Engine::queue_index_of(const MergedTaskPtr& compound) const {
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    if (queue_[i] == compound) return i;
  }
  throw std::logic_error("compound not in batch queue");
}

AdmissionOutcome Engine::submit(const Task& task) {
  if (finished_) throw std::logic_error("engine already finished");
  task.validate();
  if (task.arrival < now_) {
    throw std::invalid_argument("task arrives in the past");
  }
  if (!seen_ids_.insert(task.id).second) {
    throw std::invalid_argument("duplicate task id");
  }
  advance_to(task.arrival);

  Task admitted = task;
  admitted.exec_sd = task.exec_sd * config_.sd_scale;
  last_arrival_ = std::max(last_arrival_, task.arrival);

  TaskRecord rec;
  rec.id = admitted.id;
  rec.stream_id = admitted.stream_id;
  rec.segment_idx = admitted.segment_idx;
  rec.op_type = admitted.op.op_type;
  rec.param = admitted.op.params_joined();
  rec.arrival = admitted.arrival;
  rec.deadline = admitted.deadline;
  records_.emplace(admitted.id, std::move(rec));
  ++metrics_.total_tasks;

  const SystemSnapshot snap = snapshot();
  const OslReading reading = osl(snap, config_.beta);
  metrics_.osl_trace.emplace_back(now_, reading.value);

  const double alpha = config_.mode == MergePolicyMode::Adaptive
                           ? adaptive_alpha(reading.value, config_.beta)
                           : config_.beta;

  AdmissionOutcome outcome = AdmissionOutcome::InsertedNoMatch;
  if (config_.mode == MergePolicyMode::NoMerge) {
    insert_fresh(admitted, alpha);
    dispatch_step();
    return outcome;
  }

  const auto match = index_.lookup(admitted);
  if (!match) {
    MergedTaskPtr fresh = insert_fresh(admitted, alpha);
    index_.on_admit(admitted, AdmitOutcome::NoMatch, fresh);
    dispatch_step();
    return outcome;
  }

  ++metrics_.matches_found;
  const SimilarityLevel level = match->level;
  const MergedTaskPtr target = match->target;

  const bool adopt_arrival =
      config_.policy == QueuingPolicy::Fcfs &&
      config_.fcfs_merge_arrival == FcfsMergeAnchor::Arriving;

  MergeCandidate candidate{target->front_id(), admitted, level};

  if (level == SimilarityLevel::TaskLevel) {
    // Zero added cost; always merge. The queue key may still change (EDF /
    // MaxUrgency when the arrival's deadline is earlier).
    const std::size_t cur = queue_index_of(target);
    const std::size_t idx =
        position_maintained(snap, config_.policy, candidate, alpha,
                            config_.rho, config_.fcfs_merge_arrival);
    queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(cur));
    merge_member(*target, admitted, level, config_.rho, adopt_arrival);
    place_compound(target, idx);
    index_.on_admit(admitted, AdmitOutcome::MergedTaskLevel, nullptr);
    ++metrics_.merges_task_level;
    dispatch_step();
    return AdmissionOutcome::MergedTaskLevel;
  }

  bool merge = false;
  std::size_t place_idx = 0;
  if (config_.mode == MergePolicyMode::Aggressive) {
    merge = true;
    place_idx = position_maintained(snap, config_.policy, candidate, alpha,
                                    config_.rho, config_.fcfs_merge_arrival);
  } else if (config_.position_mode == PositionMode::Maintained) {
    place_idx = position_maintained(snap, config_.policy, candidate, alpha,
                                    config_.rho, config_.fcfs_merge_arrival);
    const ImpactReport report = evaluate_merge(snap, candidate, place_idx,
                                               alpha, config_.policy, config_.rho);
    ++metrics_.evaluations;
    merge = decide(report) == MergeDecision::Merge;
  } else {
    PositionDecision decision;
    switch (config_.heuristic) {
      case RelaxedHeuristic::Linear:
        decision = probe_linear(snap, candidate, alpha, config_.rho);
        break;
      case RelaxedHeuristic::Logarithmic:
        decision = probe_logarithmic(snap, candidate, alpha, config_.policy,
                                     config_.rho);
        break;
      case RelaxedHeuristic::Exhaustive:
        decision = probe_exhaustive(snap, candidate, alpha, config_.policy,
                                    config_.rho);
        break;
    }
    metrics_.evaluations += static_cast<std::size_t>(decision.probes_used);
    merge = decision.outcome == PositionOutcome::Place;
    place_idx = decision.index;
  }

  if (merge) {
    const std::size_t cur = queue_index_of(target);
    queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(cur));
    merge_member(*target, admitted, level, config_.rho, adopt_arrival);
    place_compound(target, place_idx);
    index_.on_admit(admitted, AdmitOutcome::MergedLower, target);
    if (level == SimilarityLevel::DataAndOperation) {
      ++metrics_.merges_data_op;
    } else {
      ++metrics_.merges_data_only;
    }
    outcome = AdmissionOutcome::MergedLower;
  } else {
    MergedTaskPtr fresh = insert_fresh(admitted, alpha);
    index_.on_admit(admitted, AdmitOutcome::DeclinedMatch, fresh);
    ++metrics_.declined_merges;
    outcome = AdmissionOutcome::InsertedDeclined;
  }
  dispatch_step();
  return outcome;
}

MetricsReport Engine::finish() {
  if (finished_) throw std::logic_error("engine already finished");
  finished_ = true;
  dispatch_step();
  complete_due(kInf);
  if (!queue_.empty()) {
    throw std::logic_error("batch queue not drained");
  }

  metrics_.dmr = metrics_.total_tasks == 0
                     ? 0.0
                     : static_cast<double>(metrics_.late_tasks) /
                           static_cast<double>(metrics_.total_tasks);
  double osl_sum = 0.0;
  for (const auto& [t, v] : metrics_.osl_trace) osl_sum += v;
  metrics_.mean_osl = metrics_.osl_trace.empty()
                          ? 0.0
                          : osl_sum / static_cast<double>(metrics_.osl_trace.size());

  metrics_.records.reserve(records_.size());
  for (const auto& [id, rec] : records_) metrics_.records.push_back(rec);
  std::sort(metrics_.records.begin(), metrics_.records.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.id < b.id; });
  for (const TaskRecord& rec : metrics_.records) {
    if (rec.completion < 0.0) {
      throw std::logic_error("task lost: no completion recorded");
    }
  }
  return metrics_;
}

MetricsReport run_trace(const std::vector<Task>& trace,
                        const EngineConfig& config) {
  Engine engine(config);
  double prev = -kInf;
  for (const Task& t : trace) {
    if (t.arrival < prev) {
      throw std::invalid_argument("trace not sorted by arrival time");
    }
    prev = t.arrival;
    engine.submit(t);
  }
  return engine.finish();
}

std::vector<ComparisonRow> paired_comparison(
    const std::vector<Task>& trace, const EngineConfig& config,
    const std::vector<MergePolicyMode>& modes) {
  EngineConfig base_cfg = config;
  base_cfg.mode = MergePolicyMode::NoMerge;
  const MetricsReport base = run_trace(trace, base_cfg);

  std::vector<ComparisonRow> rows;
  rows.reserve(modes.size());
  for (MergePolicyMode mode : modes) {
    ComparisonRow row;
    row.mode = mode;
    if (mode == MergePolicyMode::NoMerge) {
      row.report = base;
    } else {
      EngineConfig cfg = config;
      cfg.mode = mode;
      row.report = run_trace(trace, cfg);
    }
    row.dmr = row.report.dmr;
    row.makespan = row.report.makespan;
    row.dmr_reduction = base.dmr - row.dmr;
    row.makespan_saving_pct =
        base.makespan > 0.0
            ? 100.0 * (base.makespan - row.makespan) / base.makespan
            : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mergesim
