#include "dronecvrp/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace dronecvrp {

SolveResult solve_bruteforce(const Instance& instance, int max_n) {
  const auto start = std::chrono::steady_clock::now();
  const int n = instance.size();
  const int m = instance.m;
  if (n > max_n)
    throw InvalidInput(fmt::format("brute force refuses n = {} assets (limit {})", n, max_n));
  if (n == 0) throw InvalidInput("instance has no assets");
  if (m < 1) throw InvalidInput("drone count m must be >= 1");

  const auto costs = build_cost_matrix(instance);
  const auto demands = instance.node_demands();

  SolveResult result;
  result.status = SolveStatus::infeasible;
  result.lower_bound = std::numeric_limits<double>::infinity();

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> best_routes;

  if (m <= n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    // cut[k] = 1 means a route ends after perm[k]; exactly m - 1 cuts over n - 1 gaps.
    std::vector<int> cut(std::max(n - 1, 0), 0);
    do {
      std::fill(cut.begin(), cut.end(), 0);
      std::fill(cut.end() - (m - 1), cut.end(), 1);
      do {
        ++result.nodes_explored;
        std::vector<std::vector<int>> routes(1);
        for (int k = 0; k < n; ++k) {
          routes.back().push_back(perm[k]);
          if (k < n - 1 && cut[k]) routes.emplace_back();
        }
        double total = 0.0;
        bool fits = true;
        for (const auto& r : routes) {
          if (route_load(demands, r) > instance.capacity + kCostTolerance) {
            fits = false;
            break;
          }
          total += route_duration(costs, r);
        }
        if (!fits) continue;
        std::sort(routes.begin(), routes.end());
        if (total < best_cost || (total == best_cost && routes < best_routes)) {
          best_cost = total;
          best_routes = std::move(routes);
        }
      } while (std::next_permutation(cut.begin(), cut.end()));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  if (!best_routes.empty()) {
    Solution sol;
    sol.method = Method::brute;
    for (auto& r : best_routes) {
      sol.routes.push_back(make_route(costs, demands, static_cast<int>(sol.routes.size()), r));
      sol.total_cost += sol.routes.back().duration;
    }
    const auto eval = evaluate_solution(instance, costs, sol);
    if (!eval.feasible()) throw std::logic_error("brute-force optimum failed its own evaluation");
    result.status = SolveStatus::optimal;
    result.lower_bound = sol.total_cost;
    result.incumbent = std::move(sol);
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace dronecvrp
