#include "mergesim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "mergesim/workload.hpp"

namespace mergesim {

namespace {

// Two-sided 97.5% / one-sided 95% Student t critical values, df = 1..30.
constexpr double kT975[30] = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
constexpr double kT95[30] = {
    6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
    1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
    1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};

double t_crit_two_sided_95(std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t df = n - 1;
  if (n >= 30) return 1.96;  // normal approximation
  return kT975[df - 1];
}

}  // namespace

double t_crit_one_sided_95(std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t df = n - 1;
  if (df > 30) return 1.645;
  return kT95[df - 1];
}

MeanCi mean_ci95(const std::vector<double>& samples) {
  MeanCi out;
  out.n = samples.size();
  if (samples.empty()) return out;
  double sum = 0.0;
  for (double v : samples) sum += v;
  out.mean = sum / static_cast<double>(samples.size());
  if (samples.size() < 2) return out;
  double ss = 0.0;
  for (double v : samples) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  out.ci_half_width = t_crit_two_sided_95(samples.size()) * sd /
                      std::sqrt(static_cast<double>(samples.size()));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<RepResult> run_cells(const ExperimentPlan& plan,
                                 const EngineConfig& engine,
                                 const WorkloadSpec& workload) {
  plan.validate();
  engine.validate();
  workload.validate();

  std::vector<CellSpec> cells;
  for (int load : plan.loads) {
    for (double sd : plan.sd_scales) {
      for (bool pf : plan.position_finder) {
        cells.push_back(CellSpec{load, sd, pf});
      }
    }
  }

  struct Job {
    std::size_t out_idx;
    CellSpec cell;
    int rep;
  };
  std::vector<Job> jobs;
  jobs.reserve(cells.size() * static_cast<std::size_t>(plan.repetitions));
  std::vector<RepResult> results(cells.size() *
                                 static_cast<std::size_t>(plan.repetitions));
  std::size_t idx = 0;
  for (const CellSpec& cell : cells) {
    for (int rep = 0; rep < plan.repetitions; ++rep) {
      jobs.push_back(Job{idx++, cell, rep});
    }
  }

  auto run_job = [&](const Job& job) {
    const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(job.rep);
    WorkloadSpec wl = workload;
    wl.total_tasks = job.cell.load;
    const std::vector<Task> trace = generate(wl, seed);

    EngineConfig cfg = engine;
    cfg.seed = seed;
    cfg.sd_scale = job.cell.sd_scale;
    cfg.position_mode =
        job.cell.position_finder ? PositionMode::Relaxed : PositionMode::Maintained;

    RepResult& out = results[job.out_idx];
    out.cell = job.cell;
    out.rep = job.rep;
    out.seed = seed;
    out.rows = paired_comparison(trace, cfg, plan.modes);
  };

  unsigned workers = plan.threads > 0
                         ? static_cast<unsigned>(plan.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  if (workers <= 1) {
    for (const Job& job : jobs) run_job(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          run_job(jobs[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  return results;
}

namespace {

constexpr const char* kExperimentHeader =
    "row,load,mode,queue_policy,position_finder,heuristic,sd_scale,rep,seed,"
    "dmr,makespan_s,dmr_reduction,makespan_saving_pct,merged_task_level,"
    "merged_data_op,merged_data_only,evaluations,mean_osl,dmr_ci,makespan_ci,"
    "dmr_reduction_ci,makespan_saving_ci";

}  // namespace

void write_experiment_csv(const ExperimentPlan& plan,
                          const EngineConfig& engine,
                          const std::vector<RepResult>& results,
                          std::ostream& out) {
  const char* policy = to_string(engine.policy);
  const char* heuristic = to_string(engine.heuristic);
  out << kExperimentHeader << "\n";
  // Raw rows in plan order.
  for (const RepResult& r : results) {
    for (const ComparisonRow& row : r.rows) {
      out << "raw," << r.cell.load << "," << to_string(row.mode) << ","
          << policy << "," << (r.cell.position_finder ? "on" : "off") << ","
          << heuristic << "," << format_double(r.cell.sd_scale) << ","
          << r.rep << "," << r.seed << "," << format_double(row.dmr) << ","
          << format_double(row.makespan) << ","
          << format_double(row.dmr_reduction) << ","
          << format_double(row.makespan_saving_pct) << ","
          << row.report.merges_task_level << "," << row.report.merges_data_op
          << "," << row.report.merges_data_only << ","
          << row.report.evaluations << ","
          << format_double(row.report.mean_osl) << ",,,,\n";
    }
  }
  // Aggregate rows per (cell, mode).
  const std::size_t reps = static_cast<std::size_t>(plan.repetitions);
  for (std::size_t cell_start = 0; cell_start < results.size();
       cell_start += reps) {
    const CellSpec& cell = results[cell_start].cell;
    for (std::size_t mode_idx = 0; mode_idx < plan.modes.size(); ++mode_idx) {
      std::vector<double> dmr, mk, dred, msave;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const ComparisonRow& row = results[cell_start + rep].rows[mode_idx];
        dmr.push_back(row.dmr);
        mk.push_back(row.makespan);
        dred.push_back(row.dmr_reduction);
        msave.push_back(row.makespan_saving_pct);
      }
      const MeanCi a = mean_ci95(dmr), b = mean_ci95(mk), c = mean_ci95(dred),
                   d = mean_ci95(msave);
      out << "aggregate," << cell.load << ","
          << to_string(plan.modes[mode_idx]) << "," << policy << ","
          << (cell.position_finder ? "on" : "off") << "," << heuristic << ","
          << format_double(cell.sd_scale) << "," << reps << ",,"
          << format_double(a.mean) << "," << format_double(b.mean) << ","
          << format_double(c.mean) << "," << format_double(d.mean)
          << ",,,,,," << format_double(a.ci_half_width) << ","
          << format_double(b.ci_half_width) << ","
          << format_double(c.ci_half_width) << ","
          << format_double(d.ci_half_width) << "\n";
    }
  }
}

void write_summary_csv(const EngineConfig& config, const MetricsReport& report,
                       std::ostream& out) {
  out << "mode,queue_policy,position_finder,heuristic,sd_scale,seed,tasks,"
         "dmr,makespan_s,merged_task_level,merged_data_op,merged_data_only,"
         "declined_merges,evaluations,mean_osl\n";
  out << to_string(config.mode) << "," << to_string(config.policy) << ","
      << (config.position_mode == PositionMode::Relaxed ? "on" : "off") << ","
      << to_string(config.heuristic) << "," << format_double(config.sd_scale)
      << "," << config.seed << "," << report.total_tasks << ","
      << format_double(report.dmr) << "," << format_double(report.makespan)
      << "," << report.merges_task_level << "," << report.merges_data_op
      << "," << report.merges_data_only << "," << report.declined_merges
      << "," << report.evaluations << "," << format_double(report.mean_osl)
      << "\n";
}

void write_task_csv(const MetricsReport& report, std::ostream& out) {
  out << "id,stream_id,segment_idx,op_type,param,arrival_s,deadline_s,"
         "dispatch_s,completion_s,late\n";
  for (const TaskRecord& r : report.records) {
    out << r.id << "," << r.stream_id << "," << r.segment_idx << ","
        << to_string(r.op_type) << "," << r.param << ","
        << format_double(r.arrival) << "," << format_double(r.deadline) << ","
        << format_double(r.dispatch) << "," << format_double(r.completion)
        << "," << (r.late ? 1 : 0) << "\n";
  }
}

}  // namespace mergesim
