#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mergesim/engine.hpp"
#include "mergesim/workload.hpp"

namespace mergesim {

struct ExperimentPlan {
  std::vector<int> loads{1000, 1500, 2000, 2500};
  std::vector<MergePolicyMode> modes{
      MergePolicyMode::NoMerge, MergePolicyMode::Conservative,
      MergePolicyMode::Aggressive, MergePolicyMode::Adaptive};
  std::vector<double> sd_scales{1.0};
  std::vector<bool> position_finder{false};
  int repetitions = 30;
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// Everything a run needs; config files address each field by
// "[section] key = value".
struct SimConfig {
  EngineConfig engine;
  WorkloadSpec workload;
  ExperimentPlan plan;

  void validate() const;
};

// Flat key-value format with [engine] / [workload] / [experiment] sections
// and '#' comments. Unknown sections or keys are errors; later keys override
// earlier ones.
SimConfig parse_config(std::istream& in, const std::string& origin = "<config>");
SimConfig parse_config_file(const std::string& path);

// Applies one "section.key = value" assignment. Throws std::invalid_argument
// with a self-describing message on unknown keys or bad values.
void apply_config_value(SimConfig& cfg, const std::string& section,
                        const std::string& key, const std::string& value);

// Canonical listing of the effective configuration (validate-config output).
std::string describe_config(const SimConfig& cfg);

}  // namespace mergesim
