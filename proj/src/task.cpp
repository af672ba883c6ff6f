#include "mergesim/task.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mergesim/rng.hpp"

namespace mergesim {

const char* to_string(OpType op) {
  switch (op) {
    case OpType::ReduceResolution: return "reduce_resolution";
    case OpType::AdjustBitRate: return "adjust_bit_rate";
    case OpType::AdjustFrameRate: return "adjust_frame_rate";
    case OpType::ChangeCodec: return "change_codec";
  }
  throw std::invalid_argument("unknown OpType");
}

OpType op_type_from_string(std::string_view s) {
  if (s == "reduce_resolution") return OpType::ReduceResolution;
  if (s == "adjust_bit_rate") return OpType::AdjustBitRate;
  if (s == "adjust_frame_rate") return OpType::AdjustFrameRate;
  if (s == "change_codec") return OpType::ChangeCodec;
  throw std::invalid_argument("unknown op_type '" + std::string(s) + "'");
}

const char* to_string(SimilarityLevel level) {
  switch (level) {
    case SimilarityLevel::DataOnly: return "data_only";
    case SimilarityLevel::DataAndOperation: return "data_and_operation";
    case SimilarityLevel::TaskLevel: return "task_level";
  }
  throw std::invalid_argument("unknown SimilarityLevel");
}

OperationSpec OperationSpec::make(OpType op, std::vector<std::string> params) {
  if (params.empty()) {
    throw std::invalid_argument("OperationSpec requires at least one parameter");
  }
  for (auto& p : params) {
    std::transform(p.begin(), p.end(), p.begin(),
                   [](unsigned char c) { return std::tolower(c); });
  }
  std::sort(params.begin(), params.end());
  OperationSpec spec;
  spec.op_type = op;
  spec.params = std::move(params);
  return spec;
}

std::string OperationSpec::params_joined(char sep) const {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += params[i];
  }
  return out;
}

void Task::validate() const {
  if (!std::isfinite(arrival) || !std::isfinite(deadline) ||
      !std::isfinite(exec_mean) || !std::isfinite(exec_sd)) {
    throw std::invalid_argument("task fields must be finite");
  }
  if (exec_mean <= 0.0) throw std::invalid_argument("exec_mean must be > 0");
  if (exec_sd < 0.0) throw std::invalid_argument("exec_sd must be >= 0");
  if (op.params.empty()) throw std::invalid_argument("operation has no params");
}

double SharingFactors::factor(SimilarityLevel level) const {
  switch (level) {
    case SimilarityLevel::TaskLevel: return 0.0;
    case SimilarityLevel::DataAndOperation: return data_and_operation;
    case SimilarityLevel::DataOnly: return data_only;
  }
  throw std::invalid_argument("unknown SimilarityLevel");
}

void SharingFactors::validate() const {
  if (!(data_and_operation >= 0.0 && data_and_operation <= 1.0) ||
      !(data_only >= 0.0 && data_only <= 1.0)) {
    throw std::invalid_argument("sharing factors must lie in [0, 1]");
  }
}

MergedTask make_singleton(const Task& t) {
  MergedTask m;
  m.members.push_back(t);
  m.combined_mean = t.exec_mean;
  m.combined_sd = t.exec_sd;
  m.earliest_deadline = t.deadline;
  m.queue_arrival = t.arrival;
  return m;
}

std::pair<double, double> merged_cost(const MergedTask& base,
                                      const Task& joiner,
                                      SimilarityLevel level,
                                      const SharingFactors& rho) {
  switch (level) {
    case SimilarityLevel::TaskLevel:
      return {base.combined_mean, base.combined_sd};
    case SimilarityLevel::DataAndOperation:
    case SimilarityLevel::DataOnly: {
      const double r = rho.factor(level);
      const double mean = base.combined_mean + r * joiner.exec_mean;
      const double sd = std::sqrt(base.combined_sd * base.combined_sd +
                                  (r * joiner.exec_sd) * (r * joiner.exec_sd));
      return {mean, sd};
    }
  }
  throw std::invalid_argument("unknown SimilarityLevel");
}

void merge_member(MergedTask& base, const Task& joiner, SimilarityLevel level,
                  const SharingFactors& rho, bool adopt_joiner_arrival) {
  auto [mean, sd] = merged_cost(base, joiner, level, rho);
  base.members.push_back(joiner);
  base.level_links.push_back(level);
  base.combined_mean = mean;
  base.combined_sd = sd;
  base.earliest_deadline = std::min(base.earliest_deadline, joiner.deadline);
  if (adopt_joiner_arrival) base.queue_arrival = joiner.arrival;
}

double estimated_execution_time(double mean, double sd, double alpha) {
  if (!std::isfinite(mean) || !std::isfinite(sd) || !std::isfinite(alpha)) {
    throw std::invalid_argument("estimated_execution_time: non-finite input");
  }
  return std::max(0.0, mean + alpha * sd);
}

double urgency_score(double deadline, double est_exec) {
  const double slack = deadline - est_exec;
  if (slack <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / slack;
}

double waitable_time(double arrival, double deadline, double est_exec) {
  return deadline - arrival - est_exec;
}

double sample_runtime(double mean, double sd, std::uint64_t task_id,
                      std::uint64_t run_seed) {
  if (sd <= 0.0) return std::max(mean, 0.05 * mean);
  SplitMix64 rng(mix_seed(task_id, run_seed));
  const double draw = rng.normal(mean, sd);
  return std::max(draw, 0.05 * mean);
}

}  // namespace mergesim
