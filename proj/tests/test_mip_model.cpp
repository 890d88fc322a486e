#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "doctest.h"
#include "dronecvrp/mip_model.hpp"
#include "dronecvrp/oracle.hpp"
#include "test_support.hpp"

using namespace dronecvrp;
using dronecvrp::testing::make_instance;
using dronecvrp::testing::random_instance;
using dronecvrp::testing::uniform_catalog;

namespace {

bool has_tag_prefix(const std::vector<ConstraintResidual>& rs, const std::string& prefix) {
  return std::any_of(rs.begin(), rs.end(), [&](const ConstraintResidual& r) { return r.tag.rfind(prefix, 0) == 0; });
}

Instance line_of_three(int m) {
  return make_instance(0, 0, {{100, 0, 0}, {200, 0, 0}, {300, 0, 0}}, uniform_catalog(1.0, 10.0), m);
}

}  // namespace

TEST_CASE("model dimensions for n = 3, m = 1") {
  const auto inst = line_of_three(1);
  const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
  CHECK(p.num_arc_vars() == 12);
  CHECK(p.num_load_vars() == 3);
  int degree = 0, mtz = 0;
  for (const auto& row : p.constraints()) {
    if (row.tag.rfind("mtz", 0) == 0) ++mtz;
    else ++degree;
  }
  CHECK(degree == 8);
  CHECK(mtz == 6);
}

TEST_CASE("variable numbering round-trips") {
  const auto inst = random_instance(3, 5, 2);
  const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
  std::set<int> seen;
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= 5; ++j) {
      if (i == j) continue;
      const int v = p.arc_var(i, j);
      CHECK(p.arc_of(v) == std::pair{i, j});
      CHECK(p.var_name(v) == "x_" + std::to_string(i) + "_" + std::to_string(j));
      seen.insert(v);
    }
  CHECK(seen.size() == 30);
  CHECK(*seen.rbegin() == 29);
  CHECK(p.var_name(p.load_var(4)) == "u_4");
}

TEST_CASE("objective coefficients are the cost matrix") {
  const auto inst = random_instance(8, 6, 2);
  const auto c = build_cost_matrix(inst);
  const auto p = build_cvrp_model(inst, c);
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j)
      if (i != j) CHECK(p.objective()[p.arc_var(i, j)] == c.cost(i, j));
}

TEST_CASE("all-zero assignment violates every visit row by -1") {
  const auto inst = line_of_three(1);
  const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
  Assignment a{std::vector<std::uint8_t>(12, 0), std::vector<double>(3, 1.0)};
  const auto rs = verify_assignment(p, a);
  int visit_rows = 0;
  for (const auto& r : rs) {
    if (r.tag.rfind("visit_", 0) == 0) {
      CHECK(r.residual == -1.0);
      ++visit_rows;
    }
  }
  CHECK(visit_rows == 6);
  CHECK(has_tag_prefix(rs, "depot_out"));
  CHECK(has_tag_prefix(rs, "depot_in"));
}

TEST_CASE("MTZ cuts a depot-free 2-cycle") {
  const auto inst = make_instance(0, 0, {{100, 0, 0}, {200, 0, 0}, {300, 0, 0}}, uniform_catalog(), 1);
  const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
  // 0 -> 1 -> 0 and the detached cycle 2 <-> 3; degree rows all hold.
  Assignment a{std::vector<std::uint8_t>(12, 0), {1.0, 1.0, 2.0}};
  a.arc_values[p.arc_var(0, 1)] = 1;
  a.arc_values[p.arc_var(1, 0)] = 1;
  a.arc_values[p.arc_var(2, 3)] = 1;
  a.arc_values[p.arc_var(3, 2)] = 1;
  const auto rs = verify_assignment(p, a);
  REQUIRE_FALSE(rs.empty());
  for (const auto& r : rs) CHECK(r.tag.rfind("mtz", 0) == 0);
  CHECK_THROWS_AS(decode_assignment(inst, a), InfeasibleProblem);
}

TEST_CASE("decode_assignment") {
  SUBCASE("single route 0-1-2-3-0") {
    const auto inst = line_of_three(1);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    Assignment a{std::vector<std::uint8_t>(12, 0), {1.0, 2.0, 3.0}};
    a.arc_values[p.arc_var(0, 1)] = 1;
    a.arc_values[p.arc_var(1, 2)] = 1;
    a.arc_values[p.arc_var(2, 3)] = 1;
    a.arc_values[p.arc_var(3, 0)] = 1;
    REQUIRE(verify_assignment(p, a).empty());
    const auto s = decode_assignment(inst, a);
    REQUIRE(s.routes.size() == 1);
    CHECK(s.routes[0].stops == std::vector<int>{1, 2, 3});
    // 5 + 5 + 5 s of flight out, 15 s back, 10 s service at each stop
    CHECK(s.total_cost == doctest::Approx(60.0));
    CHECK(objective_value(p, a) == doctest::Approx(60.0));
  }
  SUBCASE("two routes") {
    const auto inst = line_of_three(2);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    Assignment a{std::vector<std::uint8_t>(12, 0), {1.0, 1.0, 2.0}};
    a.arc_values[p.arc_var(0, 1)] = 1;
    a.arc_values[p.arc_var(1, 0)] = 1;
    a.arc_values[p.arc_var(0, 2)] = 1;
    a.arc_values[p.arc_var(2, 3)] = 1;
    a.arc_values[p.arc_var(3, 0)] = 1;
    const auto s = decode_assignment(inst, a);
    REQUIRE(s.routes.size() == 2);
    CHECK(s.routes[0].stops == std::vector<int>{1});
    CHECK(s.routes[1].stops == std::vector<int>{2, 3});
  }
  SUBCASE("non-binary arc value") {
    const auto inst = line_of_three(1);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    Assignment a{std::vector<std::uint8_t>(12, 0), {1.0, 2.0, 3.0}};
    a.arc_values[p.arc_var(0, 1)] = 2;
    CHECK(has_tag_prefix(verify_assignment(p, a), "binary[0][1]"));
  }
  SUBCASE("domain mismatch") {
    const auto inst = line_of_three(1);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    Assignment a{std::vector<std::uint8_t>(11, 0), {1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(verify_assignment(p, a), InvalidInput);
  }
}

TEST_CASE("encode then decode preserves feasible solutions") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = random_instance(seed, 7, 1 + static_cast<int>(seed % 3));
    const auto best = solve_bruteforce(inst);
    REQUIRE(best.incumbent);
    const auto costs = build_cost_matrix(inst);
    const auto p = build_cvrp_model(inst, costs);
    const auto a = encode_solution(inst, *best.incumbent);
    CHECK(verify_assignment(p, a).empty());
    CHECK(objective_value(p, a) == doctest::Approx(best.incumbent->total_cost).epsilon(1e-12));
    const auto back = decode_assignment(inst, a);
    std::vector<std::vector<int>> expected, got;
    for (const auto& r : best.incumbent->routes) expected.push_back(r.stops);
    for (const auto& r : back.routes) got.push_back(r.stops);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    CHECK(expected == got);
    CHECK(encode_solution(inst, back) == a);
  }
}

TEST_CASE("exhaustive arc enumeration reproduces the brute-force optimum") {
  // Every successor function on 6 assets with at most one asset predecessor
  // per asset; the depot leaves towards every asset without one. The model
  // must accept exactly the subtour-free ones with m routes within capacity.
  const int n = 6;
  const auto inst = make_instance(0, 0,
                                  {{120, 40, 0}, {300, 520, 0}, {610, 90, 0}, {450, 880, 0}, {900, 300, 0}, {50, 700, 0}},
                                  uniform_catalog(1.0, 15.0), 2, 3.0);
  const auto costs = build_cost_matrix(inst);
  const auto p = build_cvrp_model(inst, costs);
  const auto demands = inst.node_demands();

  double best = std::numeric_limits<double>::infinity();
  long accepted = 0;
  std::vector<int> succ(n + 1, 0);
  std::vector<int> digits(n, 0);
  while (true) {
    bool ok = true;
    for (int i = 1; i <= n; ++i) {
      const int s = digits[i - 1];
      if (s == i) ok = false;
      succ[i] = s;
    }
    std::vector<int> preds(n + 1, 0);
    for (int i = 1; i <= n && ok; ++i)
      if (succ[i] != 0 && ++preds[succ[i]] > 1) ok = false;
    if (ok) {
      Assignment a{std::vector<std::uint8_t>(p.num_arc_vars(), 0), std::vector<double>(n, 0.0)};
      int routes = 0;
      bool within_capacity = true;
      std::vector<bool> reached(n + 1, false);
      for (int i = 1; i <= n; ++i) {
        a.arc_values[p.arc_var(i, succ[i])] = 1;
        if (preds[i] == 0) {
          a.arc_values[p.arc_var(0, i)] = 1;
          ++routes;
          double load = 0.0;
          for (int at = i; at != 0; at = succ[at]) {
            load += demands[at];
            a.load_values[at - 1] = load;
            reached[at] = true;
          }
          if (load > inst.capacity + 1e-9) within_capacity = false;
        }
      }
      bool subtour = false;
      for (int i = 1; i <= n; ++i)
        if (!reached[i]) {
          subtour = true;
          a.load_values[i - 1] = demands[i];
        }
      const bool expect_clean = !subtour && routes == inst.m && within_capacity;
      const auto rs = verify_assignment(p, a);
      if (expect_clean) {
        REQUIRE(rs.empty());
        ++accepted;
        best = std::min(best, objective_value(p, a));
      } else if (!subtour) {
        REQUIRE_FALSE(rs.empty());
      } else {
        // Subtours survive every degree row only through the MTZ rows.
        REQUIRE(has_tag_prefix(rs, "mtz"));
      }
    }
    int k = 0;
    while (k < n && ++digits[k] > n) digits[k++] = 0;
    if (k == n) break;
  }
  // 6 assets into 2 ordered routes of exactly 3: C(6,3) * 3! * 3! / 2 = 360
  CHECK(accepted == 360);
  const auto oracle = solve_bruteforce(inst);
  REQUIRE(oracle.incumbent);
  CHECK(best == doctest::Approx(oracle.incumbent->total_cost).epsilon(1e-12));
}

TEST_CASE("idle drones are opt-in") {
  const auto inst = make_instance(0, 0, {{10, 0, 0}, {20, 0, 0}}, uniform_catalog(), 3);
  const auto costs = build_cost_matrix(inst);
  CHECK_THROWS_AS(build_cvrp_model(inst, costs), InvalidInput);
  const auto p = build_cvrp_model(inst, costs, ModelOptions{true});
  for (const auto& row : p.constraints())
    if (row.tag == "depot_out" || row.tag == "depot_in") CHECK(row.relation == LinearConstraint::Relation::le);
}

TEST_CASE("LP export") {
  SUBCASE("n = 1, m = 1") {
    const auto inst = make_instance(0, 0, {{400, 0, 0}}, uniform_catalog(), 1);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    const auto lp = parse_lp(export_lp(p));
    CHECK(lp.binaries == std::vector<std::string>{"x_0_1", "x_1_0"});
    REQUIRE(lp.bounds.size() == 1);
    CHECK(lp.bounds[0].var == "u_1");
    CHECK(lp.bounds[0].lower == 1.0);
    CHECK(lp.bounds[0].upper == 5.5);
  }
  SUBCASE("rows and objective survive a round trip") {
    const auto inst = random_instance(77, 5, 2);
    const auto p = build_cvrp_model(inst, build_cost_matrix(inst));
    const auto text = export_lp(p);
    const auto lp = parse_lp(text);
    REQUIRE(lp.rows.size() == p.constraints().size());
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
      const auto& row = p.constraints()[r];
      CHECK(lp.rows[r].name == lp_row_name(row.tag));
      CHECK(lp.rows[r].sense == (row.relation == LinearConstraint::Relation::eq ? "=" : "<="));
      CHECK(lp.rows[r].rhs == row.rhs);
      std::map<std::string, double> expected, got;
      for (const auto& [var, coef] : row.coefficients) expected[p.var_name(var)] += coef;
      for (const auto& [name, coef] : lp.rows[r].terms) got[name] += coef;
      CHECK(expected == got);
    }
    std::map<std::string, double> obj;
    for (const auto& [name, coef] : lp.objective) obj[name] = coef;
    for (int v = 0; v < p.num_arc_vars(); ++v) CHECK(obj.at(p.var_name(v)) == p.objective()[v]);
    CHECK(lp_row_name("mtz[1][2]") == "mtz_1_2");
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
  }
}
