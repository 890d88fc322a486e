#include "dronecvrp/gnn_heuristic.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/core.h>

namespace dronecvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Depth-first branch and bound over the non-median assets, largest demand
// first, trying medians in order of increasing cost.
class AssignmentSearch {
 public:
  AssignmentSearch(const CostMatrix& costs, const std::vector<double>& demands, double capacity,
                   const std::vector<int>& medians, long node_limit)
      : costs_(costs), demands_(demands), capacity_(capacity), medians_(medians), node_limit_(node_limit) {}

  // Returns the best cost found (kInf if none) and fills `owner` (node -> median).
  double run(const std::vector<int>& free_assets, std::vector<int>& owner) {
    order_ = free_assets;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return demands_[a] > demands_[b]; });
    prefs_.clear();
    min_cost_suffix_.assign(order_.size() + 1, 0.0);
    demand_suffix_.assign(order_.size() + 1, 0.0);
    for (int j : order_) {
      std::vector<int> p(medians_.size());
      std::iota(p.begin(), p.end(), 0);
      std::stable_sort(p.begin(), p.end(),
                       [&](int a, int b) { return costs_.cost(medians_[a], j) < costs_.cost(medians_[b], j); });
      prefs_.push_back(std::move(p));
    }
    for (int k = static_cast<int>(order_.size()) - 1; k >= 0; --k) {
      const int j = order_[k];
      min_cost_suffix_[k] = min_cost_suffix_[k + 1] + costs_.cost(medians_[prefs_[k][0]], j);
      demand_suffix_[k] = demand_suffix_[k + 1] + demands_[j];
    }
    loads_.assign(medians_.size(), 0.0);
    for (std::size_t k = 0; k < medians_.size(); ++k) loads_[k] = demands_[medians_[k]];
    current_.assign(order_.size(), -1);
    best_ = kInf;
    best_choice_.clear();
    nodes_ = 0;
    dfs(0, 0.0);

    if (best_ < kInf) {
      for (std::size_t k = 0; k < order_.size(); ++k) owner[order_[k]] = medians_[best_choice_[k]];
    }
    return best_;
  }

 private:
  void dfs(std::size_t depth, double cost) {
    if (nodes_++ > node_limit_) return;
    if (cost + min_cost_suffix_[depth] >= best_) return;
    if (depth == order_.size()) {
      best_ = cost;
      best_choice_ = current_;
      return;
    }
    double spare = 0.0;
    for (double l : loads_) spare += capacity_ - l;
    if (demand_suffix_[depth] > spare + kCostTolerance) return;

    const int j = order_[depth];
    for (int k : prefs_[depth]) {
      if (loads_[k] + demands_[j] > capacity_ + kCostTolerance) continue;
      loads_[k] += demands_[j];
      current_[depth] = k;
      dfs(depth + 1, cost + costs_.cost(medians_[k], j));
      loads_[k] -= demands_[j];
    }
  }

  const CostMatrix& costs_;
  const std::vector<double>& demands_;
  double capacity_;
  const std::vector<int>& medians_;
  long node_limit_;

  std::vector<int> order_;
  std::vector<std::vector<int>> prefs_;
  std::vector<double> min_cost_suffix_;
  std::vector<double> demand_suffix_;
  std::vector<double> loads_;
  std::vector<int> current_;
  std::vector<int> best_choice_;
  double best_ = kInf;
  long nodes_ = 0;
};

// Uncapacitated assignment cost: a lower bound on the capacitated one.
double relaxed_cost(const CostMatrix& costs, int n, const std::vector<int>& medians) {
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    double best = kInf;
    for (int i : medians) best = std::min(best, costs.cost(i, j));
    total += best;
  }
  return total;
}

double clustering_cost(const Instance& instance, const CostMatrix& costs, const std::vector<int>& medians,
                       long node_limit, Clustering& out) {
  if (!assign_to_medians(instance, costs, medians, node_limit, out)) return kInf;
  return out.objective;
}

}  // namespace

std::vector<int> Clustering::members(int median) const {
  std::vector<int> out;
  for (const auto& [asset, owner] : assignment)
    if (owner == median) out.push_back(asset);
  return out;
}

bool assign_to_medians(const Instance& instance, const CostMatrix& costs, const std::vector<int>& medians,
                       long node_limit, Clustering& out) {
  const int n = instance.size();
  const auto demands = instance.node_demands();
  std::vector<int> sorted_medians = medians;
  std::sort(sorted_medians.begin(), sorted_medians.end());
  std::vector<char> is_median(n + 1, 0);
  for (int i : sorted_medians) {
    if (i < 1 || i > n || is_median[i]) throw InvalidInput(fmt::format("invalid median {}", i));
    is_median[i] = 1;
    if (demands[i] > instance.capacity + kCostTolerance) return false;
  }

  std::vector<int> owner(n + 1, 0);
  std::vector<int> free_assets;
  for (int j = 1; j <= n; ++j) {
    if (is_median[j]) owner[j] = j;
    else free_assets.push_back(j);
  }

  // Nearest open median first; it is optimal whenever it fits.
  std::vector<double> loads(n + 1, 0.0);
  for (int i : sorted_medians) loads[i] = demands[i];
  for (int j : free_assets) {
    int best = sorted_medians.front();
    for (int i : sorted_medians)
      if (costs.cost(i, j) < costs.cost(best, j)) best = i;
    owner[j] = best;
    loads[best] += demands[j];
  }
  const bool fits = std::all_of(sorted_medians.begin(), sorted_medians.end(),
                                [&](int i) { return loads[i] <= instance.capacity + kCostTolerance; });
  if (!fits) {
    AssignmentSearch search(costs, demands, instance.capacity, sorted_medians, node_limit);
    if (search.run(free_assets, owner) == kInf) return false;
  }

  out = Clustering{};
  out.K = static_cast<int>(sorted_medians.size());
  out.medians = sorted_medians;
  for (int i : sorted_medians) out.cluster_demand[i] = 0.0;
  for (int j = 1; j <= n; ++j) {
    out.assignment[j] = owner[j];
    out.cluster_demand[owner[j]] += demands[j];
    out.objective += costs.cost(owner[j], j);
  }
  return true;
}

Clustering cluster_assets(const Instance& instance, const CostMatrix& costs, int K, const ClusteringOptions& options) {
  const int n = instance.size();
  if (K < 1 || K > n) throw InvalidInput(fmt::format("cluster count K = {} must lie in [1, n = {}]", K, n));

  Clustering best;
  double best_cost = kInf;

  if (n <= options.exact_threshold) {
    // Lexicographic K-subsets; skip any subset whose relaxed cost cannot win.
    std::vector<int> pick(K);
    std::iota(pick.begin(), pick.end(), 1);
    while (true) {
      if (relaxed_cost(costs, n, pick) < best_cost) {
        Clustering candidate;
        const double c = clustering_cost(instance, costs, pick, options.assignment_node_limit, candidate);
        if (c < best_cost) {
          best_cost = c;
          best = std::move(candidate);
        }
      }
      int k = K - 1;
      while (k >= 0 && pick[k] == n - K + k + 1) --k;
      if (k < 0) break;
      ++pick[k];
      for (int t = k + 1; t < K; ++t) pick[t] = pick[t - 1] + 1;
    }
  } else {
    // Farthest-point seeding from the 1-median.
    std::vector<int> medians;
    {
      int first = 1;
      double first_total = kInf;
      for (int i = 1; i <= n; ++i) {
        double total = 0.0;
        for (int j = 1; j <= n; ++j) total += costs.travel(i, j);
        if (total < first_total) {
          first_total = total;
          first = i;
        }
      }
      medians.push_back(first);
      while (static_cast<int>(medians.size()) < K) {
        int far = -1;
        double far_dist = -1.0;
        for (int j = 1; j <= n; ++j) {
          if (std::find(medians.begin(), medians.end(), j) != medians.end()) continue;
          double d = kInf;
          for (int i : medians) d = std::min(d, costs.travel(i, j));
          if (d > far_dist) {
            far_dist = d;
            far = j;
          }
        }
        medians.push_back(far);
      }
      std::sort(medians.begin(), medians.end());
    }
    best_cost = clustering_cost(instance, costs, medians, options.assignment_node_limit, best);

    // Best-improvement single swaps until none improves.
    while (true) {
      double move_cost = best_cost;
      Clustering move;
      bool improved = false;
      for (int p = 0; p < K; ++p) {
        for (int c = 1; c <= n; ++c) {
          if (std::binary_search(medians.begin(), medians.end(), c)) continue;
          std::vector<int> trial = medians;
          trial[p] = c;
          std::sort(trial.begin(), trial.end());
          if (relaxed_cost(costs, n, trial) >= move_cost) continue;
          Clustering candidate;
          const double cost = clustering_cost(instance, costs, trial, options.assignment_node_limit, candidate);
          if (cost < move_cost - kCostTolerance) {
            move_cost = cost;
            move = std::move(candidate);
            improved = true;
          }
        }
      }
      if (!improved) break;
      best_cost = move_cost;
      best = std::move(move);
      medians = best.medians;
    }
  }

  if (best_cost == kInf)
    throw InfeasibleProblem(fmt::format(
        "no capacity-feasible clustering of {} assets into {} clusters with capacity {}; "
        "increase the drone count or capacity",
        n, K, instance.capacity));
  return best;
}

Route route_cluster(const Instance& instance, const CostMatrix& costs, const std::vector<int>& cluster, int median,
                    int drone_id) {
  if (cluster.empty()) throw InvalidInput("cannot route an empty cluster");
  if (std::find(cluster.begin(), cluster.end(), median) == cluster.end())
    throw InvalidInput(fmt::format("median {} is not a member of its cluster", median));

  std::vector<int> pending = cluster;
  std::sort(pending.begin(), pending.end());
  pending.erase(std::find(pending.begin(), pending.end(), median));

  std::vector<int> stops{median};
  int at = median;
  while (!pending.empty()) {
    auto next = pending.begin();
    for (auto it = pending.begin(); it != pending.end(); ++it)
      if (costs.cost(at, *it) < costs.cost(at, *next)) next = it;
    at = *next;
    stops.push_back(at);
    pending.erase(next);
  }
  return make_route(costs, instance.node_demands(), drone_id, std::move(stops));
}

Solution solve_gnn(const Instance& instance, const ClusteringOptions& options) {
  for (const auto& v : validate_instance(instance)) {
    if (v.kind == ViolationKind::capacity_exceeded || v.kind == ViolationKind::total_demand_exceeded)
      throw InfeasibleProblem(v.detail);
    throw InvalidInput(v.detail);
  }
  if (instance.m > instance.size())
    throw InvalidInput(fmt::format("m = {} exceeds n = {}; every drone needs at least one asset", instance.m,
                                   instance.size()));

  const auto costs = build_cost_matrix(instance);
  const auto clustering = cluster_assets(instance, costs, instance.m, options);

  Solution sol;
  sol.method = Method::gnn;
  for (int median : clustering.medians) {
    sol.routes.push_back(route_cluster(instance, costs, clustering.members(median), median,
                                       static_cast<int>(sol.routes.size())));
    sol.total_cost += sol.routes.back().duration;
  }
  return sol;
}

}  // namespace dronecvrp
