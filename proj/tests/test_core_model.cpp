#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "dronecvrp/core_model.hpp"
#include "dronecvrp/oracle.hpp"
#include "test_support.hpp"

using namespace dronecvrp;
using dronecvrp::testing::make_instance;
using dronecvrp::testing::random_instance;
using dronecvrp::testing::uniform_catalog;

namespace {

bool has_kind(const std::vector<Violation>& vs, ViolationKind kind) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == kind; });
}

}  // namespace

TEST_CASE("cost matrix: co-located asset costs only its service time") {
  const auto inst = make_instance(0, 0, {{0, 0, 0}}, {{0, "t", 1.0, 30.0}}, 1);
  const auto c = build_cost_matrix(inst);
  CHECK(c.travel(0, 1) == 0.0);
  CHECK(c.cost(0, 1) == 30.0);
}

TEST_CASE("cost matrix: 400 m at 20 m/s is 20 s") {
  const auto inst = make_instance(0, 0, {{400, 0, 0}}, {{0, "t", 1.0, 0.0}}, 1);
  const auto c = build_cost_matrix(inst);
  CHECK(c.travel(0, 1) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(c.cost(0, 1) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(c.cost(1, 0) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("cost matrix: structural identities on random instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_instance(seed, 12, 3);
    const auto c = build_cost_matrix(inst);
    const auto service = inst.node_service_times();
    REQUIRE(c.nodes() == 13);
    for (int i = 0; i < c.nodes(); ++i) {
      CHECK(c.travel(i, i) == 0.0);
      for (int j = 0; j < c.nodes(); ++j) {
        CHECK(c.travel(i, j) == c.travel(j, i));
        CHECK(c.cost(i, j) >= 0.0);
        CHECK(c.cost(i, j) == c.travel(i, j) + service[j]);
        for (int k = 0; k < c.nodes(); ++k) {
          // service term is column-constant
          CHECK(c.cost(i, j) - c.cost(k, j) == doctest::Approx(c.travel(i, j) - c.travel(k, j)).epsilon(1e-12));
          CHECK(c.travel(i, j) <= c.travel(i, k) + c.travel(k, j) + 1e-9);
        }
      }
    }
    CHECK(build_cost_matrix(inst) == c);
  }
}

TEST_CASE("cost matrix: asymmetric exactly when service times differ") {
  const auto inst = make_instance(0, 0, {{100, 0, 0}, {200, 0, 1}, {300, 0, 0}},
                                  {{0, "a", 1.0, 60.0}, {1, "b", 1.0, 90.0}}, 1);
  const auto c = build_cost_matrix(inst);
  CHECK(c.cost(1, 2) != c.cost(2, 1));
  CHECK(c.cost(1, 3) == c.cost(3, 1));
}

TEST_CASE("cost matrix: permuting assets permutes rows and columns") {
  const auto inst = random_instance(99, 7, 2);
  std::vector<int> perm{4, 2, 7, 1, 3, 6, 5};  // new asset k+1 is old asset perm[k]
  Instance shuffled = inst;
  for (int k = 0; k < 7; ++k) {
    shuffled.assets[k] = inst.assets[perm[k] - 1];
    shuffled.assets[k].id = k + 1;
  }
  const auto a = build_cost_matrix(inst);
  const auto b = build_cost_matrix(shuffled);
  auto old_of = [&](int node) { return node == 0 ? 0 : perm[node - 1]; };
  for (int i = 0; i <= 7; ++i)
    for (int j = 0; j <= 7; ++j) CHECK(b.cost(i, j) == a.cost(old_of(i), old_of(j)));
}

TEST_CASE("cost matrix: rejects non-positive speed") {
  auto inst = make_instance(0, 0, {{1, 1, 0}}, uniform_catalog(), 1);
  inst.speed = 0.0;
  CHECK_THROWS_AS(build_cost_matrix(inst), InvalidInput);
}

TEST_CASE("validate_instance") {
  SUBCASE("generated instance is clean") { CHECK(validate_instance(random_instance(42, 10, 5)).empty()); }
  SUBCASE("single demand above capacity") {
    const auto inst = make_instance(0, 0, {{10, 10, 0}}, {{0, "big", 5.6, 0.0}}, 1, 5.5);
    CHECK(has_kind(validate_instance(inst), ViolationKind::capacity_exceeded));
  }
  SUBCASE("total demand beyond the fleet") {
    std::vector<testing::Placement> ps;
    for (int k = 0; k < 10; ++k) ps.push_back({10.0 * k, 5.0, 0});
    const auto inst = make_instance(0, 0, ps, uniform_catalog(1.0), 2, 4.0);
    const auto vs = validate_instance(inst);
    REQUIRE(has_kind(vs, ViolationKind::total_demand_exceeded));
    CHECK_FALSE(has_kind(vs, ViolationKind::capacity_exceeded));
  }
  SUBCASE("coordinates outside the area") {
    const auto inst = make_instance(0, 0, {{1200, 10, 0}}, uniform_catalog(), 1);
    CHECK(has_kind(validate_instance(inst), ViolationKind::out_of_bounds));
  }
  SUBCASE("unknown type and bad parameters") {
    auto inst = make_instance(0, 0, {{10, 10, 3}}, uniform_catalog(), 0);
    inst.speed = -1;
    const auto vs = validate_instance(inst);
    CHECK(has_kind(vs, ViolationKind::unknown_type));
    CHECK(has_kind(vs, ViolationKind::bad_parameter));
  }
}

TEST_CASE("evaluate_solution") {
  const auto inst = make_instance(0, 0, {{100, 0, 0}}, {{0, "t", 1.0, 30.0}}, 1);
  const auto costs = build_cost_matrix(inst);
  const auto demands = inst.node_demands();

  SUBCASE("single asset tour") {
    Solution s;
    s.routes.push_back(make_route(costs, demands, 0, {1}));
    s.total_cost = s.routes[0].duration;
    const auto e = evaluate_solution(inst, s);
    CHECK(e.violations.empty());
    CHECK(e.total_cost == doctest::Approx(5.0 + 30.0 + 5.0));
    CHECK(e.total_cost == doctest::Approx(costs.cost(0, 1) + costs.travel(1, 0)));
  }
  SUBCASE("omitted and duplicated assets") {
    const auto four = make_instance(0, 0, {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}}, uniform_catalog(), 2);
    const auto c4 = build_cost_matrix(four);
    const auto d4 = four.node_demands();
    Solution s;
    s.routes.push_back(make_route(c4, d4, 0, {1, 2}));
    s.routes.push_back(make_route(c4, d4, 1, {4, 1}));
    s.total_cost = s.routes[0].duration + s.routes[1].duration;
    const auto e = evaluate_solution(four, s);
    CHECK(std::any_of(e.violations.begin(), e.violations.end(), [](const Violation& v) {
      return v.kind == ViolationKind::unvisited_asset && v.magnitude == 3;
    }));
    CHECK(has_kind(e.violations, ViolationKind::duplicate_visit));
  }
  SUBCASE("capacity, route count, and arithmetic") {
    const auto three = make_instance(0, 0, {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}}, uniform_catalog(2.0), 2, 5.0);
    const auto c3 = build_cost_matrix(three);
    const auto d3 = three.node_demands();
    Solution s;
    s.routes.push_back(make_route(c3, d3, 0, {1, 2, 3}));
    s.total_cost = s.routes[0].duration + 1.0;
    const auto e = evaluate_solution(three, s);
    CHECK(has_kind(e.violations, ViolationKind::capacity_exceeded));
    CHECK(has_kind(e.violations, ViolationKind::wrong_route_count));
    CHECK(has_kind(e.violations, ViolationKind::bad_arithmetic));
    CHECK_FALSE(e.feasible());
  }
  SUBCASE("endurance breach is only a warning") {
    auto far = make_instance(0, 0, {{1000, 1000, 0}}, uniform_catalog(), 1);
    far.endurance = 10.0;
    const auto cf = build_cost_matrix(far);
    Solution s;
    s.routes.push_back(make_route(cf, far.node_demands(), 0, {1}));
    s.total_cost = s.routes[0].duration;
    const auto e = evaluate_solution(far, s);
    REQUIRE(e.violations.size() == 1);
    CHECK(e.violations[0].kind == ViolationKind::endurance_exceeded_warning);
    CHECK(e.feasible());
  }
  SUBCASE("unknown asset id is a hard error") {
    Solution s;
    s.routes.push_back(Route{0, {7}, 0.0, 0.0});
    CHECK_THROWS_AS(evaluate_solution(inst, s), InvalidInput);
  }
  SUBCASE("more drones than assets: empty routes allowed") {
    auto two = make_instance(0, 0, {{10, 0, 0}}, uniform_catalog(), 3);
    const auto c = build_cost_matrix(two);
    Solution s;
    s.routes.push_back(make_route(c, two.node_demands(), 0, {1}));
    s.routes.push_back(Route{1, {}, 0.0, 0.0});
    s.routes.push_back(Route{2, {}, 0.0, 0.0});
    s.total_cost = s.routes[0].duration;
    CHECK(evaluate_solution(two, s).violations.empty());
  }
}

TEST_CASE("evaluate_solution agrees with the brute-force optimum") {
  const auto inst = random_instance(2024, 6, 2);
  const auto result = solve_bruteforce(inst);
  REQUIRE(result.incumbent);
  const auto e = evaluate_solution(inst, *result.incumbent);
  CHECK(e.feasible());
  CHECK(e.total_cost == doctest::Approx(result.incumbent->total_cost).epsilon(1e-12));
}
