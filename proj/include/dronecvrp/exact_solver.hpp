#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dronecvrp/core_model.hpp"

namespace dronecvrp {

struct SolveConfig {
  enum class Branching { best_first, depth_first };

  double time_limit = 60.0;    // seconds
  double gap_tolerance = 0.0;  // relative
  long node_limit = 8'000'000;  // stored search states
  Branching branching = Branching::best_first;
  bool warm_start = true;  // seed the incumbent with the GNN heuristic
};

enum class SolveStatus { optimal, feasible_timeout, infeasible, node_limit };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& text);

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  // Absent for infeasible; may also be absent on a limit hit when no
  // complete solution was reached.
  std::optional<Solution> incumbent;
  double lower_bound = 0.0;
  long nodes_explored = 0;
  double wall_time = 0.0;
};

// Sequential route construction state. Routes are built one at a time from
// the depot; `node` is the asset where the open route currently stands, or
// 0 between routes.
struct PartialState {
  std::uint64_t visited = 0;  // bit (a - 1) set once asset a is served
  int node = 0;
  int routes_started = 0;
  double load = 0.0;  // on the open route
  double cost = 0.0;  // accumulated C over committed arcs
};

// Admissible completion bound: cost so far plus the larger of an
// incoming-arc and an outgoing-arc relaxation, each forcing the exact number
// of depot departures and returns that remain. Infinity when the state
// cannot be completed (too few assets for the routes left, or not enough
// capacity for the remaining demand).
class CompletionBound {
 public:
  CompletionBound(const Instance& instance, const CostMatrix& costs);

  double lower_bound(const PartialState& state) const;

 private:
  int n_;
  int m_;
  double capacity_;
  std::vector<double> demand_;
  std::vector<double> cost_;  // flat (n+1)^2
  double c(int i, int j) const { return cost_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
};

// Best-first branch and bound over partial routes. Routes are generated in
// order of their lowest asset id; states with the same (served set,
// position, route count) are pruned by dominance on (cost, load, lowest id
// of the open route).
SolveResult solve_exact(const Instance& instance, const SolveConfig& config = {});

}  // namespace dronecvrp
