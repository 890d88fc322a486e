#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dronecvrp/core_model.hpp"
#include "dronecvrp/scenario.hpp"

namespace dronecvrp {

struct ExperimentConfig {
  std::vector<int> n_values{10, 15, 20};
  int runs_per_n = 30;
  ScenarioConfig base = default_scenario(10, 2023);  // seed = base seed; type mix rescaled per n
  std::set<Method> methods{Method::exact, Method::gnn};
  double exact_time_limit = 60.0;
};

// Default runs per n: 30 up to n = 20, 10 above.
int default_runs_for(int n);

struct RunRecord {
  int n = 0;
  int run = 0;
  Method method = Method::gnn;
  std::optional<double> total_cost;  // present iff the solver produced a solution
  double wall_time = 0.0;            // seconds, around the solve call only
  std::string status;                // optimal | feasible_timeout | node_limit | infeasible | feasible | error
  std::uint64_t seed = 0;
  std::uint64_t instance_hash = 0;

  bool same_outcome(const RunRecord& other) const;  // everything except wall time
};

// Solves every (n, run) instance with each requested method. `jobs` > 1
// spreads cells over worker threads; the result is ordered by
// (n, run, method) regardless.
std::vector<RunRecord> run_comparison(const ExperimentConfig& config, int jobs = 1);

// Empirical CDF: one step per distinct sample value with fraction k / N.
std::vector<std::pair<double, double>> compute_cdf(std::vector<double> samples);

// Costs of the (n, run) cells where exact reached optimality and gnn
// produced a solution, in matching order.
struct PairedCosts {
  std::vector<double> exact;
  std::vector<double> gnn;
};
PairedCosts paired_costs(const std::vector<RunRecord>& records, std::optional<int> n = std::nullopt);

// Value of a step CDF from compute_cdf at `value` (0 left of the first step).
double cdf_at(const std::vector<std::pair<double, double>>& cdf, double value);

enum class ReportFormat { table_text, csv, svg_plots };

inline constexpr const char* kCsvHeader = "n,run,method,cost_s,wall_time_s,status,seed";

std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& text);

// Writes results.csv, report.txt and runtime_vs_n.svg, cost_cdf.svg,
// cost_vs_n.svg into `outdir` according to `formats`; returns the paths.
std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& records,
                                               const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& outdir);

}  // namespace dronecvrp
