#include "dronecvrp/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/core.h>

namespace dronecvrp {

namespace {

bool close_enough(double a, double b) {
  return std::abs(a - b) <= std::max(kCostTolerance, kCostTolerance * std::max(std::abs(a), std::abs(b)));
}

}  // namespace

const AssetType& Instance::type(int type_id) const {
  for (const auto& t : catalog) {
    if (t.id == type_id) return t;
  }
  throw InvalidInput(fmt::format("asset type {} is not in the catalog", type_id));
}

std::vector<double> Instance::node_demands() const {
  std::vector<double> out(assets.size() + 1, 0.0);
  for (std::size_t k = 0; k < assets.size(); ++k) out[k + 1] = type(assets[k].type_id).demand;
  return out;
}

std::vector<double> Instance::node_service_times() const {
  std::vector<double> out(assets.size() + 1, 0.0);
  for (std::size_t k = 0; k < assets.size(); ++k) out[k + 1] = type(assets[k].type_id).service_time;
  return out;
}

CostMatrix::CostMatrix(int nodes, std::vector<double> travel, std::vector<double> cost)
    : nodes_(nodes), travel_(std::move(travel)), cost_(std::move(cost)) {
  const auto expected = static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes);
  if (nodes < 1 || travel_.size() != expected || cost_.size() != expected)
    throw InvalidInput("cost matrix dimensions do not match node count");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::gnn: return "gnn";
    case Method::brute: return "brute";
    case Method::external: return "external";
  }
  return "external";
}

Method method_from_string(const std::string& text) {
  if (text == "exact") return Method::exact;
  if (text == "gnn") return Method::gnn;
  if (text == "brute") return Method::brute;
  if (text == "external") return Method::external;
  throw InvalidInput(fmt::format("unknown method '{}'", text));
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::unvisited_asset: return "unvisited_asset";
    case ViolationKind::duplicate_visit: return "duplicate_visit";
    case ViolationKind::capacity_exceeded: return "capacity_exceeded";
    case ViolationKind::wrong_route_count: return "wrong_route_count";
    case ViolationKind::bad_arithmetic: return "bad_arithmetic";
    case ViolationKind::endurance_exceeded_warning: return "endurance_exceeded_warning";
    case ViolationKind::out_of_bounds: return "out_of_bounds";
    case ViolationKind::bad_parameter: return "bad_parameter";
    case ViolationKind::unknown_type: return "unknown_type";
    case ViolationKind::total_demand_exceeded: return "total_demand_exceeded";
  }
  return "unknown";
}

bool Evaluation::feasible() const {
  return std::all_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.is_warning(); });
}

CostMatrix build_cost_matrix(const Instance& instance) {
  if (!(instance.speed > 0.0)) throw InvalidInput("drone speed V must be positive");
  const int nodes = instance.size() + 1;
  std::vector<double> xs(nodes), ys(nodes);
  xs[0] = instance.depot_x;
  ys[0] = instance.depot_y;
  for (int k = 0; k < instance.size(); ++k) {
    xs[k + 1] = instance.assets[k].x;
    ys[k + 1] = instance.assets[k].y;
  }
  const auto service = instance.node_service_times();

  std::vector<double> travel(static_cast<std::size_t>(nodes) * nodes, 0.0);
  std::vector<double> cost(travel.size(), 0.0);
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      const double t = std::hypot(xs[i] - xs[j], ys[i] - ys[j]) / instance.speed;
      travel[static_cast<std::size_t>(i) * nodes + j] = t;
      travel[static_cast<std::size_t>(j) * nodes + i] = t;
    }
  }
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      const auto at = static_cast<std::size_t>(i) * nodes + j;
      cost[at] = travel[at] + service[j];
    }
  }
  return CostMatrix(nodes, std::move(travel), std::move(cost));
}

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, std::string detail, double magnitude) {
    out.push_back({kind, std::move(detail), magnitude});
  };

  if (instance.m < 1) report(ViolationKind::bad_parameter, "drone count m must be >= 1", instance.m);
  if (!(instance.capacity > 0.0))
    report(ViolationKind::bad_parameter, "capacity Q must be > 0", instance.capacity);
  if (!(instance.speed > 0.0)) report(ViolationKind::bad_parameter, "speed V must be > 0", instance.speed);
  if (!(instance.endurance > 0.0))
    report(ViolationKind::bad_parameter, "endurance must be > 0", instance.endurance);
  if (!(instance.area_width > 0.0) || !(instance.area_height > 0.0))
    report(ViolationKind::bad_parameter, "area dimensions must be > 0", 0.0);

  std::set<std::string> names;
  std::set<int> type_ids;
  for (const auto& t : instance.catalog) {
    if (!names.insert(t.name).second)
      report(ViolationKind::bad_parameter, fmt::format("duplicate asset type name '{}'", t.name), 0.0);
    if (!type_ids.insert(t.id).second)
      report(ViolationKind::bad_parameter, fmt::format("duplicate asset type id {}", t.id), t.id);
    if (!(t.service_time >= 0.0))
      report(ViolationKind::bad_parameter, fmt::format("type '{}' has negative service time", t.name),
             t.service_time);
    if (!(t.demand > 0.0))
      report(ViolationKind::bad_parameter, fmt::format("type '{}' has non-positive demand", t.name), t.demand);
  }

  auto in_bounds = [](double v, double hi) { return v >= 0.0 && v <= hi; };
  if (!in_bounds(instance.depot_x, instance.area_width) || !in_bounds(instance.depot_y, instance.area_height))
    report(ViolationKind::out_of_bounds, "depot lies outside the area", 0.0);

  double total_demand = 0.0;
  for (std::size_t k = 0; k < instance.assets.size(); ++k) {
    const auto& a = instance.assets[k];
    if (a.id != static_cast<int>(k) + 1)
      report(ViolationKind::bad_parameter, fmt::format("asset at position {} has id {}", k + 1, a.id), a.id);
    if (!in_bounds(a.x, instance.area_width) || !in_bounds(a.y, instance.area_height))
      report(ViolationKind::out_of_bounds, fmt::format("asset {} at ({}, {}) is outside the area", a.id, a.x, a.y),
             0.0);
    if (!type_ids.contains(a.type_id)) {
      report(ViolationKind::unknown_type, fmt::format("asset {} has unknown type {}", a.id, a.type_id), a.type_id);
      continue;
    }
    const double q = instance.type(a.type_id).demand;
    total_demand += q;
    if (q > instance.capacity)
      report(ViolationKind::capacity_exceeded,
             fmt::format("asset {} demand {} exceeds drone capacity {}", a.id, q, instance.capacity),
             q - instance.capacity);
  }
  const double fleet_capacity = instance.m * instance.capacity;
  if (instance.m >= 1 && total_demand > fleet_capacity + kCostTolerance)
    report(ViolationKind::total_demand_exceeded,
           fmt::format("total demand {} exceeds fleet capacity {}", total_demand, fleet_capacity),
           total_demand - fleet_capacity);
  return out;
}

double route_duration(const CostMatrix& costs, const std::vector<int>& stops) {
  if (stops.empty()) return 0.0;
  double d = 0.0;
  int prev = 0;
  for (int s : stops) {
    d += costs.cost(prev, s);
    prev = s;
  }
  return d + costs.cost(prev, 0);
}

double route_load(const std::vector<double>& demands, const std::vector<int>& stops) {
  double load = 0.0;
  for (int s : stops) load += demands[s];
  return load;
}

Route make_route(const CostMatrix& costs, const std::vector<double>& demands, int drone_id,
                 std::vector<int> stops) {
  Route r;
  r.drone_id = drone_id;
  r.load = route_load(demands, stops);
  r.duration = route_duration(costs, stops);
  r.stops = std::move(stops);
  return r;
}

Evaluation evaluate_solution(const Instance& instance, const Solution& solution) {
  return evaluate_solution(instance, build_cost_matrix(instance), solution);
}

Evaluation evaluate_solution(const Instance& instance, const CostMatrix& costs, const Solution& solution) {
  const int n = instance.size();
  for (const auto& r : solution.routes) {
    for (int s : r.stops) {
      if (s < 1 || s > n) throw InvalidInput(fmt::format("route {} names unknown asset {}", r.drone_id, s));
    }
  }

  Evaluation eval;
  auto report = [&](ViolationKind kind, std::string detail, double magnitude) {
    eval.violations.push_back({kind, std::move(detail), magnitude});
  };

  const auto demands = instance.node_demands();
  std::vector<int> visits(n + 1, 0);
  int non_empty = 0;
  for (const auto& r : solution.routes) {
    if (!r.stops.empty()) ++non_empty;
    for (int s : r.stops) ++visits[s];
    const double load = route_load(demands, r.stops);
    const double duration = route_duration(costs, r.stops);
    eval.total_cost += duration;
    if (load > instance.capacity + kCostTolerance)
      report(ViolationKind::capacity_exceeded,
             fmt::format("route {} load {} exceeds capacity {}", r.drone_id, load, instance.capacity),
             load - instance.capacity);
    if (!close_enough(load, r.load))
      report(ViolationKind::bad_arithmetic,
             fmt::format("route {} reports load {} but carries {}", r.drone_id, r.load, load), r.load - load);
    if (!close_enough(duration, r.duration))
      report(ViolationKind::bad_arithmetic,
             fmt::format("route {} reports duration {} but takes {}", r.drone_id, r.duration, duration),
             r.duration - duration);
    if (duration > instance.endurance + kCostTolerance)
      report(ViolationKind::endurance_exceeded_warning,
             fmt::format("route {} lasts {} s, beyond endurance {} s", r.drone_id, duration, instance.endurance),
             duration - instance.endurance);
  }

  for (int a = 1; a <= n; ++a) {
    if (visits[a] == 0) report(ViolationKind::unvisited_asset, fmt::format("asset {} is not visited", a), a);
    if (visits[a] > 1)
      report(ViolationKind::duplicate_visit, fmt::format("asset {} is visited {} times", a, visits[a]), a);
  }

  const int expected_non_empty = std::min(n, instance.m);
  if (static_cast<int>(solution.routes.size()) != instance.m || non_empty != expected_non_empty)
    report(ViolationKind::wrong_route_count,
           fmt::format("{} routes ({} non-empty) for {} drones", solution.routes.size(), non_empty, instance.m),
           static_cast<double>(solution.routes.size()) - instance.m);

  if (!close_enough(eval.total_cost, solution.total_cost))
    report(ViolationKind::bad_arithmetic,
           fmt::format("solution reports total {} but routes sum to {}", solution.total_cost, eval.total_cost),
           solution.total_cost - eval.total_cost);
  return eval;
}

}  // namespace dronecvrp
