#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dronecvrp {

// Absolute tolerance used for every floating-point cost comparison.
inline constexpr double kCostTolerance = 1e-9;

// Thrown when an input breaks an operation precondition (bad ids, m > n, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a problem has no feasible answer under the requested parameters.
class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AssetType {
  int id = 0;
  std::string name;
  double demand = 0.0;        // liters
  double service_time = 0.0;  // seconds

  bool operator==(const AssetType&) const = default;
};

struct Asset {
  int id = 0;  // 1..n, node 0 is the depot
  int type_id = 0;
  double x = 0.0;  // meters
  double y = 0.0;

  bool operator==(const Asset&) const = default;
};

// Generator identity stored alongside instances produced by scenario_gen.
struct Provenance {
  std::string prng;
  std::uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

struct Instance {
  double area_width = 1000.0;
  double area_height = 1000.0;
  double depot_x = 0.0;
  double depot_y = 0.0;
  std::vector<AssetType> catalog;
  std::vector<Asset> assets;
  int m = 1;                 // drones
  double capacity = 5.5;     // Q, liters
  double speed = 20.0;       // V, m/s
  double endurance = 780.0;  // seconds, advisory only
  std::optional<Provenance> provenance;

  int size() const { return static_cast<int>(assets.size()); }

  // Catalog entry for a type id; throws InvalidInput when it does not resolve.
  const AssetType& type(int type_id) const;

  // Per-node quantities over depot + assets; node 0 has zero demand and
  // zero service time.
  std::vector<double> node_demands() const;
  std::vector<double> node_service_times() const;

  bool operator==(const Instance&) const = default;
};

// Pairwise travel and maintenance cost over nodes {0 (depot), 1..n}.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int nodes, std::vector<double> travel, std::vector<double> cost);

  int nodes() const { return nodes_; }
  double travel(int i, int j) const { return travel_[index(i, j)]; }
  double cost(int i, int j) const { return cost_[index(i, j)]; }

  bool operator==(const CostMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nodes_) +
           static_cast<std::size_t>(j);
  }

  int nodes_ = 0;
  std::vector<double> travel_;
  std::vector<double> cost_;
};

struct Route {
  int drone_id = 0;
  std::vector<int> stops;  // asset ids, depot excluded
  double load = 0.0;
  double duration = 0.0;

  bool operator==(const Route&) const = default;
};

enum class Method { exact, gnn, brute, external };

std::string to_string(Method method);
Method method_from_string(const std::string& text);

struct Solution {
  std::vector<Route> routes;
  double total_cost = 0.0;
  Method method = Method::external;

  bool operator==(const Solution&) const = default;
};

enum class ViolationKind {
  unvisited_asset,
  duplicate_visit,
  capacity_exceeded,
  wrong_route_count,
  bad_arithmetic,
  endurance_exceeded_warning,
  // Instance-level checks reported by validate_instance.
  out_of_bounds,
  bad_parameter,
  unknown_type,
  total_demand_exceeded,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
  double magnitude = 0.0;

  bool is_warning() const { return kind == ViolationKind::endurance_exceeded_warning; }
};

struct Evaluation {
  double total_cost = 0.0;
  std::vector<Violation> violations;

  // True when no violation other than warnings was found.
  bool feasible() const;
};

// travel(i,j) = |p_i - p_j| / V, cost(i,j) = travel(i,j) + service(j).
CostMatrix build_cost_matrix(const Instance& instance);

std::vector<Violation> validate_instance(const Instance& instance);

// Route duration over depot -> stops -> depot; stops must be valid node ids.
double route_duration(const CostMatrix& costs, const std::vector<int>& stops);
double route_load(const std::vector<double>& demands, const std::vector<int>& stops);

// Builds a Route with load and duration filled in from the instance data.
Route make_route(const CostMatrix& costs, const std::vector<double>& demands, int drone_id,
                 std::vector<int> stops);

// Recomputes the cost of `solution` from scratch and lists every broken
// invariant. Throws InvalidInput when a stop does not name an asset.
Evaluation evaluate_solution(const Instance& instance, const Solution& solution);
Evaluation evaluate_solution(const Instance& instance, const CostMatrix& costs,
                             const Solution& solution);

}  // namespace dronecvrp
