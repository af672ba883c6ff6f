#include "mergesim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mergesim {

void ExperimentPlan::validate() const {
  if (loads.empty()) throw std::invalid_argument("experiment loads are empty");
  for (int l : loads) {
    if (l < 1) throw std::invalid_argument("loads must be >= 1");
  }
  if (modes.empty()) throw std::invalid_argument("experiment modes are empty");
  if (sd_scales.empty()) throw std::invalid_argument("sd_scales are empty");
  for (double s : sd_scales) {
    if (s < 0.0) throw std::invalid_argument("sd_scales must be >= 0");
  }
  if (position_finder.empty()) {
    throw std::invalid_argument("position_finder options are empty");
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

void SimConfig::validate() const {
  engine.validate();
  workload.validate();
  plan.validate();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("key '" + key + "': expected number, got '" +
                                v + "'");
  }
  return out;
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("key '" + key + "': expected integer, got '" +
                                v + "'");
  }
  return out;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("key '" + key + "': expected on/off, got '" + v +
                              "'");
}

OpType op_for_key(const std::string& suffix, const std::string& key) {
  try {
    return op_type_from_string(suffix);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("key '" + key + "': unknown operation '" +
                                suffix + "'");
  }
}

void apply_engine(EngineConfig& e, const std::string& key,
                  const std::string& value) {
  if (key == "machines" || key == "machine_count") {
    e.machine_count = static_cast<int>(to_int(value, key));
  } else if (key == "queue_policy") {
    e.policy = queuing_policy_from_string(value);
  } else if (key == "merge_mode") {
    e.mode = merge_mode_from_string(value);
  } else if (key == "position_mode") {
    e.position_mode = position_mode_from_string(value);
  } else if (key == "relaxed_heuristic") {
    e.heuristic = heuristic_from_string(value);
  } else if (key == "fcfs_merge_arrival") {
    e.fcfs_merge_arrival = fcfs_anchor_from_string(value);
  } else if (key == "rho_data_operation") {
    e.rho.data_and_operation = to_double(value, key);
  } else if (key == "rho_data_only") {
    e.rho.data_only = to_double(value, key);
  } else if (key == "beta") {
    e.beta = to_double(value, key);
  } else if (key == "seed") {
    e.seed = static_cast<std::uint64_t>(to_int(value, key));
  } else if (key == "sd_scale") {
    e.sd_scale = to_double(value, key);
  } else if (key == "machine_queue_depth") {
    e.machine_queue_depth = static_cast<int>(to_int(value, key));
  } else if (key == "osl_window_seconds") {
    e.osl_window_seconds = to_double(value, key);
  } else {
    throw std::invalid_argument("unknown [engine] key '" + key + "'");
  }
}

void apply_workload(WorkloadSpec& w, const std::string& key,
                    const std::string& value) {
  if (key == "total_tasks") {
    w.total_tasks = static_cast<int>(to_int(value, key));
  } else if (key == "streams") {
    w.streams = static_cast<int>(to_int(value, key));
  } else if (key == "min_segments") {
    w.min_segments = static_cast<int>(to_int(value, key));
  } else if (key == "max_segments") {
    w.max_segments = static_cast<int>(to_int(value, key));
  } else if (key == "segment_duration") {
    w.segment_duration = to_double(value, key);
  } else if (key == "group_size") {
    w.group_size = static_cast<int>(to_int(value, key));
  } else if (key == "cycles") {
    w.cycles = static_cast<int>(to_int(value, key));
  } else if (key == "high_period_seconds") {
    w.high_period_seconds = to_double(value, key);
  } else if (key == "share_probability") {
    w.share_probability = to_double(value, key);
  } else if (key == "sigma_ratio") {
    w.sigma_ratio = to_double(value, key);
  } else if (key == "deadline_model") {
    if (value == "streaming") {
      w.deadline.kind = DeadlineModelKind::Streaming;
    } else if (value == "slack") {
      w.deadline.kind = DeadlineModelKind::Slack;
    } else {
      throw std::invalid_argument("key 'deadline_model': expected streaming|slack");
    }
  } else if (key == "startup_delay") {
    w.deadline.startup_delay = to_double(value, key);
  } else if (key == "slack_factor") {
    w.deadline.slack_factor = to_double(value, key);
  } else if (key.rfind("weight_", 0) == 0) {
    const OpType op = op_for_key(key.substr(7), key);
    w.op_weights[static_cast<int>(op)] = to_double(value, key);
  } else if (key.rfind("mu_", 0) == 0) {
    // mu_<op_type>/<param> = seconds
    const std::string rest = key.substr(3);
    const std::size_t slash = rest.find('/');
    if (slash == std::string::npos) {
      throw std::invalid_argument("key '" + key +
                                  "': expected mu_<op_type>/<param>");
    }
    const OpType op = op_for_key(rest.substr(0, slash), key);
    const std::string param = rest.substr(slash + 1);
    const double mean = to_double(value, key);
    for (auto& e : w.profile.entries) {
      if (e.op == op && e.param == param) {
        e.mean = mean;
        return;
      }
    }
    w.profile.entries.push_back(ExecProfile::Entry{op, param, mean});
  } else {
    throw std::invalid_argument("unknown [workload] key '" + key + "'");
  }
}

void apply_experiment(ExperimentPlan& p, const std::string& key,
                      const std::string& value) {
  if (key == "loads") {
    p.loads.clear();
    for (const auto& v : split_list(value)) {
      p.loads.push_back(static_cast<int>(to_int(v, key)));
    }
  } else if (key == "modes") {
    p.modes.clear();
    for (const auto& v : split_list(value)) {
      p.modes.push_back(merge_mode_from_string(v));
    }
  } else if (key == "sd_scales") {
    p.sd_scales.clear();
    for (const auto& v : split_list(value)) {
      p.sd_scales.push_back(to_double(v, key));
    }
  } else if (key == "position_finder") {
    p.position_finder.clear();
    for (const auto& v : split_list(value)) {
      if (v == "both") {
        p.position_finder = {false, true};
      } else {
        p.position_finder.push_back(to_bool(v, key));
      }
    }
  } else if (key == "reps" || key == "repetitions") {
    p.repetitions = static_cast<int>(to_int(value, key));
  } else if (key == "base_seed") {
    p.base_seed = static_cast<std::uint64_t>(to_int(value, key));
  } else if (key == "threads") {
    p.threads = static_cast<int>(to_int(value, key));
  } else {
    throw std::invalid_argument("unknown [experiment] key '" + key + "'");
  }
}

}  // namespace

void apply_config_value(SimConfig& cfg, const std::string& section,
                        const std::string& key, const std::string& value) {
  if (section == "engine") {
    apply_engine(cfg.engine, key, value);
  } else if (section == "workload") {
    apply_workload(cfg.workload, key, value);
  } else if (section == "experiment") {
    apply_experiment(cfg.plan, key, value);
  } else {
    throw std::invalid_argument("unknown section [" + section + "]");
  }
}

SimConfig parse_config(std::istream& in, const std::string& origin) {
  SimConfig cfg;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw std::invalid_argument("unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        if (section != "engine" && section != "workload" &&
            section != "experiment") {
          throw std::invalid_argument("unknown section [" + section + "]");
        }
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("expected key = value");
      }
      if (section.empty()) {
        throw std::invalid_argument("key outside of any [section]");
      }
      apply_config_value(cfg, section, trim(line.substr(0, eq)),
                         trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      std::ostringstream os;
      os << origin << ":" << line_no << ": " << e.what();
      throw std::invalid_argument(os.str());
    }
  }
  return cfg;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(f, path);
}

std::string describe_config(const SimConfig& cfg) {
  std::ostringstream os;
  os << "[engine]\n";
  os << "machines = " << cfg.engine.machine_count << "\n";
  os << "queue_policy = " << to_string(cfg.engine.policy) << "\n";
  os << "merge_mode = " << to_string(cfg.engine.mode) << "\n";
  os << "position_mode = " << to_string(cfg.engine.position_mode) << "\n";
  os << "relaxed_heuristic = " << to_string(cfg.engine.heuristic) << "\n";
  os << "fcfs_merge_arrival = " << to_string(cfg.engine.fcfs_merge_arrival)
     << "\n";
  os << "rho_data_operation = " << cfg.engine.rho.data_and_operation << "\n";
  os << "rho_data_only = " << cfg.engine.rho.data_only << "\n";
  os << "beta = " << cfg.engine.beta << "\n";
  os << "seed = " << cfg.engine.seed << "\n";
  os << "sd_scale = " << cfg.engine.sd_scale << "\n";
  os << "machine_queue_depth = " << cfg.engine.machine_queue_depth << "\n";
  os << "osl_window_seconds = " << cfg.engine.osl_window_seconds << "\n";
  os << "\n[workload]\n";
  os << "total_tasks = " << cfg.workload.total_tasks << "\n";
  os << "streams = " << cfg.workload.streams << "\n";
  os << "min_segments = " << cfg.workload.min_segments << "\n";
  os << "max_segments = " << cfg.workload.max_segments << "\n";
  os << "segment_duration = " << cfg.workload.segment_duration << "\n";
  os << "group_size = " << cfg.workload.group_size << "\n";
  os << "cycles = " << cfg.workload.cycles << "\n";
  os << "high_period_seconds = " << cfg.workload.high_period_seconds << "\n";
  os << "share_probability = " << cfg.workload.share_probability << "\n";
  os << "sigma_ratio = " << cfg.workload.sigma_ratio << "\n";
  os << "deadline_model = "
     << (cfg.workload.deadline.kind == DeadlineModelKind::Streaming
             ? "streaming"
             : "slack")
     << "\n";
  os << "startup_delay = " << cfg.workload.deadline.startup_delay << "\n";
  os << "slack_factor = " << cfg.workload.deadline.slack_factor << "\n";
  for (int i = 0; i < kOpTypeCount; ++i) {
    os << "weight_" << to_string(static_cast<OpType>(i)) << " = "
       << cfg.workload.op_weights[i] << "\n";
  }
  for (const auto& e : cfg.workload.profile.entries) {
    os << "mu_" << to_string(e.op) << "/" << e.param << " = " << e.mean << "\n";
  }
  os << "\n[experiment]\n";
  os << "loads =";
  for (std::size_t i = 0; i < cfg.plan.loads.size(); ++i) {
    os << (i ? "," : " ") << cfg.plan.loads[i];
  }
  os << "\nmodes =";
  for (std::size_t i = 0; i < cfg.plan.modes.size(); ++i) {
    os << (i ? "," : " ") << to_string(cfg.plan.modes[i]);
  }
  os << "\nsd_scales =";
  for (std::size_t i = 0; i < cfg.plan.sd_scales.size(); ++i) {
    os << (i ? "," : " ") << cfg.plan.sd_scales[i];
  }
  os << "\nposition_finder =";
  for (std::size_t i = 0; i < cfg.plan.position_finder.size(); ++i) {
    os << (i ? "," : " ") << (cfg.plan.position_finder[i] ? "on" : "off");
  }
  os << "\nreps = " << cfg.plan.repetitions << "\n";
  os << "base_seed = " << cfg.plan.base_seed << "\n";
  os << "threads = " << cfg.plan.threads << "\n";
  return os.str();
}

}  // namespace mergesim
