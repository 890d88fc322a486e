#include "dronecvrp/exact_solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <fmt/core.h>

#include "dronecvrp/gnn_heuristic.hpp"
#include "dronecvrp/mip_model.hpp"

namespace dronecvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxAssets = 63;

// Sum of the `count` smallest entries of values[0..size), infinity when
// fewer than `count` finite entries exist.
double sum_smallest(std::array<double, kMaxAssets + 1>& values, int size, int count) {
  if (count == 0) return 0.0;
  if (count > size) return kInf;
  std::nth_element(values.begin(), values.begin() + (count - 1), values.begin() + size);
  double total = 0.0;
  for (int k = 0; k < count; ++k) total += values[k];
  return total;
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_timeout: return "feasible_timeout";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::node_limit: return "node_limit";
  }
  return "infeasible";
}

SolveStatus solve_status_from_string(const std::string& text) {
  if (text == "optimal") return SolveStatus::optimal;
  if (text == "feasible_timeout") return SolveStatus::feasible_timeout;
  if (text == "infeasible") return SolveStatus::infeasible;
  if (text == "node_limit") return SolveStatus::node_limit;
  throw InvalidInput(fmt::format("unknown solve status '{}'", text));
}

CompletionBound::CompletionBound(const Instance& instance, const CostMatrix& costs)
    : n_(instance.size()), m_(instance.m), capacity_(instance.capacity), demand_(instance.node_demands()) {
  if (n_ > kMaxAssets) throw InvalidInput(fmt::format("exact search supports at most {} assets", kMaxAssets));
  cost_.resize(static_cast<std::size_t>(n_ + 1) * (n_ + 1));
  for (int i = 0; i <= n_; ++i)
    for (int j = 0; j <= n_; ++j) cost_[static_cast<std::size_t>(i) * (n_ + 1) + j] = costs.cost(i, j);
}

double CompletionBound::lower_bound(const PartialState& s) const {
  const std::uint64_t all = n_ == 64 ? ~0ULL : ((1ULL << n_) - 1);
  const std::uint64_t unvisited = all & ~s.visited;
  const int left = std::popcount(unvisited);
  const bool open = s.node != 0;
  const int new_routes = m_ - s.routes_started;
  const int closes = new_routes + (open ? 1 : 0);

  if (n_ == 0) return s.cost;
  if (new_routes < 0 || left < new_routes) return kInf;
  if (left == 0) {
    if (new_routes > 0) return kInf;
    return open ? s.cost + c(s.node, 0) : s.cost;
  }
  if (!open && new_routes == 0) return kInf;

  double remaining_demand = 0.0;
  for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) remaining_demand += demand_[std::countr_zero(bits) + 1];
  const double room = (open ? capacity_ - s.load : 0.0) + new_routes * capacity_;
  if (remaining_demand > room + kCostTolerance) return kInf;

  std::array<double, kMaxAssets + 1> diffs{};

  // Incoming arcs: every unvisited asset gets one predecessor, exactly
  // `new_routes` of them from the depot; plus `closes` distinct returns.
  double incoming = 0.0;
  {
    int forced = 0, free = 0;
    for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) {
      const int j = std::countr_zero(bits) + 1;
      double best = open ? c(s.node, j) : kInf;
      for (std::uint64_t other = unvisited & ~(1ULL << (j - 1)); other; other &= other - 1)
        best = std::min(best, c(std::countr_zero(other) + 1, j));
      const double from_depot = new_routes > 0 ? c(0, j) : kInf;
      if (best == kInf) {
        if (from_depot == kInf) return kInf;
        incoming += from_depot;
        ++forced;
      } else {
        incoming += best;
        diffs[free++] = from_depot - best;
      }
    }
    if (forced > new_routes) return kInf;
    if (new_routes - forced > 0) {
      const double extra = sum_smallest(diffs, free, new_routes - forced);
      if (extra == kInf) return kInf;
      incoming += extra;
    }
    int count = 0;
    for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) diffs[count++] = c(std::countr_zero(bits) + 1, 0);
    if (open) diffs[count++] = c(s.node, 0);
    incoming += sum_smallest(diffs, count, closes);
  }

  // Outgoing arcs: the open position and every unvisited asset get one
  // successor, exactly `closes` of them the depot; plus `new_routes`
  // distinct departures.
  double outgoing = 0.0;
  {
    int forced = 0, free = 0;
    auto visit = [&](int i) {
      double best = kInf;
      for (std::uint64_t other = unvisited & ~(i > 0 ? (1ULL << (i - 1)) : 0ULL); other; other &= other - 1)
        best = std::min(best, c(i, std::countr_zero(other) + 1));
      const double home = c(i, 0);
      if (best == kInf) {
        outgoing += home;
        ++forced;
      } else {
        outgoing += best;
        diffs[free++] = home - best;
      }
    };
    if (open) visit(s.node);
    for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) visit(std::countr_zero(bits) + 1);
    if (forced > closes) return kInf;
    if (closes - forced > 0) {
      const double extra = sum_smallest(diffs, free, closes - forced);
      if (extra == kInf) return kInf;
      outgoing += extra;
    }
    int count = 0;
    for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) diffs[count++] = c(0, std::countr_zero(bits) + 1);
    outgoing += sum_smallest(diffs, count, new_routes);
  }

  return s.cost + std::max(incoming, outgoing);
}

namespace {

struct SearchNode {
  std::uint64_t visited;
  double cost;
  double bound;
  double load;
  std::int32_t parent;
  std::int32_t next_same_key;
  std::int16_t node;
  std::int16_t routes;
  std::int16_t route_min;  // lowest asset id on the open route, 0 between routes
  std::int16_t depth;
  bool dead;
};

struct Key {
  std::uint64_t visited;
  std::int32_t node;
  std::int32_t routes;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::uint64_t h = k.visited * 0x9e3779b97f4a7c15ULL;
    h ^= (static_cast<std::uint64_t>(k.node) << 8 | static_cast<std::uint64_t>(k.routes)) + 0x632be59bd9b4e019ULL +
         (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct QueueEntry {
  double bound;
  std::int32_t depth;
  std::int64_t order;
  std::int32_t index;
};

class Search {
 public:
  Search(const Instance& instance, const CostMatrix& costs, const SolveConfig& config)
      : instance_(instance),
        costs_(costs),
        config_(config),
        bound_(instance, costs),
        n_(instance.size()),
        m_(instance.m),
        demands_(instance.node_demands()) {}

  SolveResult run(std::optional<Solution> warm, std::chrono::steady_clock::time_point start) {
    start_ = start;
    SolveResult result;
    if (warm) {
      incumbent_ = std::move(warm);
      incumbent_cost_ = incumbent_->total_cost;
    }

    PartialState root;
    const double root_bound = bound_.lower_bound(root);
    best_bound_ = root_bound;
    if (root_bound < kInf) {
      nodes_.push_back({0, 0.0, root_bound, 0.0, -1, -1, 0, 0, 0, 0, false});
      table_.emplace(Key{0, 0, 0}, 0);
      push(0);
    }

    bool limit_hit = false;
    SolveStatus limit_status = SolveStatus::feasible_timeout;
    while (!queue_.empty()) {
      std::pop_heap(queue_.begin(), queue_.end(), compare_);
      const QueueEntry top = queue_.back();
      queue_.pop_back();
      SearchNode& node = nodes_[top.index];
      if (node.dead) continue;
      if (config_.branching == SolveConfig::Branching::best_first) {
        best_bound_ = std::max(best_bound_, node.bound);
        if (node.bound >= prune_threshold()) {
          queue_.clear();
          break;
        }
      } else if (node.bound >= prune_threshold()) {
        continue;
      }
      if ((expanded_ & 255) == 0 && elapsed() > config_.time_limit) {
        limit_hit = true;
        limit_status = SolveStatus::feasible_timeout;
        queue_.push_back(top);
        break;
      }
      if (static_cast<long>(nodes_.size()) >= config_.node_limit) {
        limit_hit = true;
        limit_status = SolveStatus::node_limit;
        queue_.push_back(top);
        break;
      }
      node.dead = true;  // expanded; dominance checks still see it through the table
      ++expanded_;
      expand(top.index);
    }

    result.nodes_explored = expanded_;
    if (limit_hit) {
      result.status = limit_status;
      double frontier = incumbent_cost_;
      for (const auto& e : queue_)
        if (!nodes_[e.index].dead) frontier = std::min(frontier, e.bound);
      if (config_.branching == SolveConfig::Branching::best_first) frontier = std::max(frontier, best_bound_);
      result.lower_bound = std::min(frontier, incumbent_cost_);
    } else if (incumbent_) {
      result.status = SolveStatus::optimal;
      result.lower_bound = config_.gap_tolerance > 0.0
                               ? std::min(std::max(best_bound_, incumbent_cost_ - gap_allowance()), incumbent_cost_)
                               : incumbent_cost_;
    } else {
      result.status = SolveStatus::infeasible;
      result.lower_bound = kInf;
    }
    result.incumbent = incumbent_;
    return result;
  }

 private:
  double gap_allowance() const {
    if (incumbent_cost_ == kInf) return 0.0;
    return std::max(kCostTolerance, config_.gap_tolerance * incumbent_cost_);
  }
  double prune_threshold() const { return incumbent_cost_ == kInf ? kInf : incumbent_cost_ - gap_allowance(); }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void push(std::int32_t index) {
    const auto& nd = nodes_[index];
    queue_.push_back({nd.bound, nd.depth, order_++, index});
    std::push_heap(queue_.begin(), queue_.end(), compare_);
  }

  void expand(std::int32_t index) {
    const SearchNode parent = nodes_[index];
    const std::uint64_t all = (1ULL << n_) - 1;
    const std::uint64_t unvisited = all & ~parent.visited;

    if (parent.node != 0) {
      for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) {
        const int j = std::countr_zero(bits) + 1;
        const double load = parent.load + demands_[j];
        if (load > instance_.capacity + kCostTolerance) continue;
        consider(index, parent, parent.visited | (1ULL << (j - 1)), j, parent.routes, load,
                 parent.cost + costs_.cost(parent.node, j), std::min<int>(parent.route_min, j));
      }
      // Routes are ordered by their lowest asset: a route may close only
      // once it holds an asset lower than everything still unserved.
      const int lowest_left = unvisited ? std::countr_zero(unvisited) + 1 : n_ + 1;
      if (parent.route_min < lowest_left)
        consider(index, parent, parent.visited, 0, parent.routes, 0.0, parent.cost + costs_.cost(parent.node, 0), 0);
    } else if (parent.routes < m_) {
      for (std::uint64_t bits = unvisited; bits; bits &= bits - 1) {
        const int j = std::countr_zero(bits) + 1;
        consider(index, parent, parent.visited | (1ULL << (j - 1)), j, parent.routes + 1, demands_[j],
                 parent.cost + costs_.cost(0, j), j);
      }
    }
  }

  void consider(std::int32_t parent_index, const SearchNode& parent, std::uint64_t visited, int node, int routes,
                double load, double cost, int route_min) {
    const std::uint64_t all = (1ULL << n_) - 1;
    if (visited == all && node == 0) {
      if (routes == m_ && cost < incumbent_cost_) record_incumbent(parent_index, cost);
      return;
    }
    PartialState state{visited, node, routes, load, cost};
    const double bound = std::max(parent.bound, bound_.lower_bound(state));
    if (bound >= prune_threshold()) return;

    const Key key{visited, node, routes};
    auto [slot, inserted] = table_.try_emplace(key, -1);
    for (std::int32_t at = slot->second; at >= 0; at = nodes_[at].next_same_key) {
      const auto& other = nodes_[at];
      if (other.cost <= cost && other.load <= load && other.route_min <= route_min) return;
    }
    for (std::int32_t at = slot->second; at >= 0; at = nodes_[at].next_same_key) {
      auto& other = nodes_[at];
      if (cost <= other.cost && load <= other.load && route_min <= other.route_min) other.dead = true;
    }
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({visited, cost, bound, load, parent_index, slot->second, static_cast<std::int16_t>(node),
                      static_cast<std::int16_t>(routes), static_cast<std::int16_t>(route_min),
                      static_cast<std::int16_t>(parent.depth + 1), false});
    slot->second = index;
    push(index);
  }

  void record_incumbent(std::int32_t last, double cost) {
    std::vector<int> walk;
    for (std::int32_t at = last; at >= 0; at = nodes_[at].parent) walk.push_back(nodes_[at].node);
    std::reverse(walk.begin(), walk.end());

    Solution sol;
    sol.method = Method::exact;
    std::vector<int> stops;
    for (int v : walk) {
      if (v == 0) {
        if (!stops.empty()) {
          sol.routes.push_back(make_route(costs_, demands_, static_cast<int>(sol.routes.size()), std::move(stops)));
          stops.clear();
        }
      } else {
        stops.push_back(v);
      }
    }
    if (!stops.empty())
      sol.routes.push_back(make_route(costs_, demands_, static_cast<int>(sol.routes.size()), std::move(stops)));
    for (const auto& r : sol.routes) sol.total_cost += r.duration;
    (void)cost;
    incumbent_cost_ = sol.total_cost;
    incumbent_ = std::move(sol);
  }

  struct Compare {
    SolveConfig::Branching branching;
    // std heap is a max-heap: return true when a should come out after b.
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
      if (branching == SolveConfig::Branching::depth_first) {
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.order < b.order;
      }
      if (a.bound != b.bound) return a.bound > b.bound;
      if (a.depth != b.depth) return a.depth > b.depth;
      return a.order > b.order;
    }
  };

  const Instance& instance_;
  const CostMatrix& costs_;
  const SolveConfig& config_;
  CompletionBound bound_;
  int n_;
  int m_;
  std::vector<double> demands_;

  std::vector<SearchNode> nodes_;
  std::unordered_map<Key, std::int32_t, KeyHash> table_;
  std::vector<QueueEntry> queue_;
  Compare compare_{config_.branching};
  std::int64_t order_ = 0;
  long expanded_ = 0;
  double best_bound_ = 0.0;
  std::optional<Solution> incumbent_;
  double incumbent_cost_ = kInf;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SolveResult solve_exact(const Instance& instance, const SolveConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(config.time_limit > 0.0)) throw InvalidInput("time limit must be positive");
  if (config.gap_tolerance < 0.0) throw InvalidInput("gap tolerance must be >= 0");

  SolveResult infeasible;
  for (const auto& v : validate_instance(instance)) {
    if (v.kind == ViolationKind::capacity_exceeded || v.kind == ViolationKind::total_demand_exceeded) {
      infeasible.status = SolveStatus::infeasible;
      infeasible.lower_bound = kInf;
      infeasible.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return infeasible;
    }
    throw InvalidInput(v.detail);
  }
  if (instance.size() == 0) throw InvalidInput("instance has no assets");
  if (instance.m > instance.size())
    throw InvalidInput(fmt::format("m = {} exceeds n = {}; every drone needs at least one asset", instance.m,
                                   instance.size()));
  if (instance.size() > kMaxAssets)
    throw InvalidInput(fmt::format("exact search supports at most {} assets", kMaxAssets));

  const auto costs = build_cost_matrix(instance);
  std::optional<Solution> warm;
  if (config.warm_start) {
    try {
      warm = solve_gnn(instance);
      warm->method = Method::exact;
    } catch (const InfeasibleProblem&) {
      // the search may still find a packing the clustering missed
    }
  }

  Search search(instance, costs, config);
  SolveResult result = search.run(std::move(warm), start);

  if (result.incumbent) {
    // The MTZ model is the feasibility contract for every incumbent.
    const auto program = build_cvrp_model(instance, costs);
    const auto residuals = verify_assignment(program, encode_solution(instance, *result.incumbent));
    if (!residuals.empty())
      throw std::logic_error(fmt::format("exact incumbent violates {}", residuals.front().tag));
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace dronecvrp
