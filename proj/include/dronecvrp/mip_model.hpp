#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dronecvrp/core_model.hpp"

namespace dronecvrp {

// Two-index CVRP model: binary arc variables x_ij (i != j, nodes 0..n) and
// continuous load variables u_i in [q_i, Q] for assets 1..n.
//
// Variable numbering: arc variables first, in row-major (i, j) order with
// the diagonal skipped, then u_1..u_n.
struct LinearConstraint {
  enum class Relation { eq, le };

  std::vector<std::pair<int, double>> coefficients;  // sorted by variable index
  Relation relation = Relation::eq;
  double rhs = 0.0;
  std::string tag;  // visit_in[j], visit_out[i], depot_out, depot_in, mtz[i][j]

  double lhs(const std::vector<double>& values) const;
};

struct ModelOptions {
  // Extension: depot rows become "<= m" so that m > n is admissible and
  // drones may stay idle. Off by default.
  bool allow_idle_drones = false;
};

class IntegerProgram {
 public:
  IntegerProgram(int n, int m, double capacity, std::vector<double> demands,
                 std::vector<double> objective, std::vector<LinearConstraint> constraints);

  int n() const { return n_; }
  int m() const { return m_; }
  double capacity() const { return capacity_; }

  int num_arc_vars() const { return (n_ + 1) * n_; }
  int num_load_vars() const { return n_; }
  int num_vars() const { return num_arc_vars() + num_load_vars(); }

  int arc_var(int i, int j) const;
  std::pair<int, int> arc_of(int var) const;
  int load_var(int i) const { return num_arc_vars() + i - 1; }
  std::string var_name(int var) const;

  // Bounds of u_i: [q_i, Q].
  double load_lower(int i) const { return demands_[i]; }
  double load_upper() const { return capacity_; }

  const std::vector<double>& objective() const { return objective_; }  // per arc variable
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

 private:
  int n_;
  int m_;
  double capacity_;
  std::vector<double> demands_;  // node-indexed, demands_[0] = 0
  std::vector<double> objective_;
  std::vector<LinearConstraint> constraints_;
};

// Dense assignment over the program's variable set.
struct Assignment {
  std::vector<std::uint8_t> arc_values;  // indexed by arc variable
  std::vector<double> load_values;       // u_1..u_n at positions 0..n-1

  bool operator==(const Assignment&) const = default;
};

struct ConstraintResidual {
  std::string tag;
  double residual;  // lhs - rhs, nonzero for eq rows, positive for le rows
};

IntegerProgram build_cvrp_model(const Instance& instance, const CostMatrix& costs,
                                const ModelOptions& options = {});

// Every violated row, bound, or binary domain with its signed residual.
// Throws InvalidInput on a domain mismatch.
std::vector<ConstraintResidual> verify_assignment(const IntegerProgram& program,
                                                  const Assignment& assignment);

double objective_value(const IntegerProgram& program, const Assignment& assignment);

// Arc values from the routes, u_i = cumulative demand delivered up to and
// including i along its route.
Assignment encode_solution(const Instance& instance, const Solution& solution);

// Follows arcs out of the depot. Throws InfeasibleProblem naming the first
// violated tag when the assignment is not feasible for the instance's model.
Solution decode_assignment(const Instance& instance, const Assignment& assignment);

// CPLEX LP text. Row names are the tags with brackets rewritten as
// underscores (mtz[1][2] -> mtz_1_2).
std::string export_lp(const IntegerProgram& program);
std::string lp_row_name(const std::string& tag);

// Reader for the subset of the LP format written by export_lp.
struct LpModel {
  struct Row {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    std::string sense;  // "=", "<=", ">="
    double rhs = 0.0;
  };
  struct Bound {
    std::string var;
    double lower = 0.0;
    double upper = 0.0;
  };
  std::vector<std::pair<std::string, double>> objective;
  std::vector<Row> rows;
  std::vector<Bound> bounds;
  std::vector<std::string> binaries;
};

LpModel parse_lp(const std::string& text);

}  // namespace dronecvrp
