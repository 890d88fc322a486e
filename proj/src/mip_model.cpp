#include "dronecvrp/mip_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

namespace dronecvrp {

double LinearConstraint::lhs(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& [var, coef] : coefficients) total += coef * values[var];
  return total;
}

IntegerProgram::IntegerProgram(int n, int m, double capacity, std::vector<double> demands,
                               std::vector<double> objective, std::vector<LinearConstraint> constraints)
    : n_(n),
      m_(m),
      capacity_(capacity),
      demands_(std::move(demands)),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)) {}

int IntegerProgram::arc_var(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i > n_ || j > n_)
    throw InvalidInput(fmt::format("no arc variable for ({}, {})", i, j));
  return i * n_ + (j < i ? j : j - 1);
}

std::pair<int, int> IntegerProgram::arc_of(int var) const {
  const int i = var / n_;
  const int k = var % n_;
  return {i, k < i ? k : k + 1};
}

std::string IntegerProgram::var_name(int var) const {
  if (var < num_arc_vars()) {
    const auto [i, j] = arc_of(var);
    return fmt::format("x_{}_{}", i, j);
  }
  return fmt::format("u_{}", var - num_arc_vars() + 1);
}

IntegerProgram build_cvrp_model(const Instance& instance, const CostMatrix& costs,
                                const ModelOptions& options) {
  const int n = instance.size();
  const int m = instance.m;
  if (n == 0) throw InvalidInput("cannot build a routing model without assets");
  if (m < 1) throw InvalidInput("drone count m must be >= 1");
  if (m > n && !options.allow_idle_drones)
    throw InvalidInput(fmt::format(
        "m = {} drones exceeds n = {} assets; the model forces every drone to leave the depot "
        "(use m <= n or allow idle drones)",
        m, n));
  if (costs.nodes() != n + 1) throw InvalidInput("cost matrix does not match the instance");

  const auto demands = instance.node_demands();
  const double Q = instance.capacity;

  // Index helper that mirrors IntegerProgram::arc_var before the program exists.
  auto arc = [n](int i, int j) { return i * n + (j < i ? j : j - 1); };
  const int num_arcs = (n + 1) * n;
  auto load = [num_arcs](int i) { return num_arcs + i - 1; };

  std::vector<double> objective(num_arcs);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) objective[arc(i, j)] = costs.cost(i, j);

  std::vector<LinearConstraint> rows;
  auto sorted = [](LinearConstraint c) {
    std::sort(c.coefficients.begin(), c.coefficients.end());
    return c;
  };

  for (int j = 1; j <= n; ++j) {
    LinearConstraint c{{}, LinearConstraint::Relation::eq, 1.0, fmt::format("visit_in[{}]", j)};
    for (int i = 0; i <= n; ++i)
      if (i != j) c.coefficients.emplace_back(arc(i, j), 1.0);
    rows.push_back(sorted(std::move(c)));
  }
  for (int i = 1; i <= n; ++i) {
    LinearConstraint c{{}, LinearConstraint::Relation::eq, 1.0, fmt::format("visit_out[{}]", i)};
    for (int j = 0; j <= n; ++j)
      if (i != j) c.coefficients.emplace_back(arc(i, j), 1.0);
    rows.push_back(sorted(std::move(c)));
  }
  const auto depot_relation = options.allow_idle_drones ? LinearConstraint::Relation::le
                                                        : LinearConstraint::Relation::eq;
  {
    LinearConstraint in{{}, depot_relation, static_cast<double>(m), "depot_in"};
    LinearConstraint out{{}, depot_relation, static_cast<double>(m), "depot_out"};
    for (int k = 1; k <= n; ++k) {
      in.coefficients.emplace_back(arc(k, 0), 1.0);
      out.coefficients.emplace_back(arc(0, k), 1.0);
    }
    rows.push_back(sorted(std::move(in)));
    rows.push_back(sorted(std::move(out)));
  }
  // x_ij = 1 forces u_j >= u_i + q_j.
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      LinearConstraint c{{{load(i), 1.0}, {load(j), -1.0}, {arc(i, j), Q}},
                         LinearConstraint::Relation::le,
                         Q - demands[j],
                         fmt::format("mtz[{}][{}]", i, j)};
      rows.push_back(sorted(std::move(c)));
    }
  }
  return IntegerProgram(n, m, Q, demands, std::move(objective), std::move(rows));
}

namespace {

std::vector<double> dense_values(const IntegerProgram& program, const Assignment& assignment) {
  if (static_cast<int>(assignment.arc_values.size()) != program.num_arc_vars() ||
      static_cast<int>(assignment.load_values.size()) != program.num_load_vars())
    throw InvalidInput(fmt::format("assignment has {} arc and {} load values, model expects {} and {}",
                                   assignment.arc_values.size(), assignment.load_values.size(),
                                   program.num_arc_vars(), program.num_load_vars()));
  std::vector<double> values;
  values.reserve(program.num_vars());
  for (auto v : assignment.arc_values) values.push_back(static_cast<double>(v));
  values.insert(values.end(), assignment.load_values.begin(), assignment.load_values.end());
  return values;
}

}  // namespace

std::vector<ConstraintResidual> verify_assignment(const IntegerProgram& program, const Assignment& assignment) {
  const auto values = dense_values(program, assignment);
  std::vector<ConstraintResidual> out;

  for (const auto& row : program.constraints()) {
    const double residual = row.lhs(values) - row.rhs;
    const bool violated = row.relation == LinearConstraint::Relation::eq ? std::abs(residual) > kCostTolerance
                                                                          : residual > kCostTolerance;
    if (violated) out.push_back({row.tag, residual});
  }
  for (int var = 0; var < program.num_arc_vars(); ++var) {
    const auto v = assignment.arc_values[var];
    if (v > 1) {
      const auto [i, j] = program.arc_of(var);
      out.push_back({fmt::format("binary[{}][{}]", i, j), static_cast<double>(v) - 1.0});
    }
  }
  for (int i = 1; i <= program.n(); ++i) {
    const double u = assignment.load_values[i - 1];
    if (u < program.load_lower(i) - kCostTolerance)
      out.push_back({fmt::format("bounds[{}]", i), u - program.load_lower(i)});
    else if (u > program.load_upper() + kCostTolerance)
      out.push_back({fmt::format("bounds[{}]", i), u - program.load_upper()});
  }
  return out;
}

double objective_value(const IntegerProgram& program, const Assignment& assignment) {
  const auto values = dense_values(program, assignment);
  double total = 0.0;
  for (int var = 0; var < program.num_arc_vars(); ++var) total += program.objective()[var] * values[var];
  return total;
}

Assignment encode_solution(const Instance& instance, const Solution& solution) {
  const int n = instance.size();
  auto arc = [n](int i, int j) { return i * n + (j < i ? j : j - 1); };
  const auto demands = instance.node_demands();

  Assignment a;
  a.arc_values.assign(static_cast<std::size_t>(n + 1) * n, 0);
  a.load_values.assign(n, 0.0);
  for (const auto& route : solution.routes) {
    if (route.stops.empty()) continue;
    int prev = 0;
    double delivered = 0.0;
    for (int s : route.stops) {
      if (s < 1 || s > n) throw InvalidInput(fmt::format("route names unknown asset {}", s));
      if (s == prev) throw InvalidInput(fmt::format("route repeats asset {} consecutively", s));
      a.arc_values[arc(prev, s)] = 1;
      delivered += demands[s];
      a.load_values[s - 1] = delivered;
      prev = s;
    }
    a.arc_values[arc(prev, 0)] = 1;
  }
  return a;
}

Solution decode_assignment(const Instance& instance, const Assignment& assignment) {
  const auto costs = build_cost_matrix(instance);
  const auto program = build_cvrp_model(instance, costs);
  const auto violations = verify_assignment(program, assignment);
  if (!violations.empty())
    throw InfeasibleProblem(fmt::format("assignment violates {} (residual {})", violations.front().tag,
                                        violations.front().residual));

  const int n = instance.size();
  const auto demands = instance.node_demands();
  Solution sol;
  sol.method = Method::external;
  for (int first = 1; first <= n; ++first) {
    if (assignment.arc_values[program.arc_var(0, first)] == 0) continue;
    std::vector<int> stops;
    int at = first;
    while (at != 0) {
      stops.push_back(at);
      if (static_cast<int>(stops.size()) > n) throw InfeasibleProblem("arc structure does not return to the depot");
      int next = -1;
      for (int j = 0; j <= n; ++j) {
        if (j != at && assignment.arc_values[program.arc_var(at, j)] == 1) {
          next = j;
          break;
        }
      }
      at = next;
    }
    sol.routes.push_back(make_route(costs, demands, static_cast<int>(sol.routes.size()), std::move(stops)));
  }
  for (const auto& r : sol.routes) sol.total_cost += r.duration;
  return sol;
}

std::string lp_row_name(const std::string& tag) {
  std::string out;
  for (char c : tag) {
    if (c == '[') out.push_back('_');
    else if (c != ']') out.push_back(c);
  }
  return out;
}

namespace {

void append_terms(std::string& out, const std::vector<std::pair<std::string, double>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [name, coef] : terms) {
    if (on_line == 6) {
      out += "\n   ";
      on_line = 0;
    }
    if (first) out += fmt::format(" {}{:.17g} {}", coef < 0 ? "- " : "", std::abs(coef), name);
    else out += fmt::format(" {} {:.17g} {}", coef < 0 ? "-" : "+", std::abs(coef), name);
    first = false;
    ++on_line;
  }
}

}  // namespace

std::string export_lp(const IntegerProgram& program) {
  std::string out = fmt::format("\\ CVRP model: {} assets, {} drones, capacity {:.17g}\n", program.n(),
                                program.m(), program.capacity());
  out += "Minimize\n obj:";
  std::vector<std::pair<std::string, double>> terms;
  for (int var = 0; var < program.num_arc_vars(); ++var) terms.emplace_back(program.var_name(var), program.objective()[var]);
  append_terms(out, terms);
  out += "\nSubject To\n";
  for (const auto& row : program.constraints()) {
    terms.clear();
    for (const auto& [var, coef] : row.coefficients) terms.emplace_back(program.var_name(var), coef);
    out += fmt::format(" {}:", lp_row_name(row.tag));
    append_terms(out, terms);
    out += fmt::format(" {} {:.17g}\n", row.relation == LinearConstraint::Relation::eq ? "=" : "<=", row.rhs);
  }
  out += "Bounds\n";
  for (int i = 1; i <= program.n(); ++i)
    out += fmt::format(" {:.17g} <= u_{} <= {:.17g}\n", program.load_lower(i), i, program.load_upper());
  out += "Binaries\n";
  for (int var = 0; var < program.num_arc_vars(); ++var) {
    out += ' ';
    out += program.var_name(var);
    if (var % 10 == 9 || var + 1 == program.num_arc_vars()) out += '\n';
  }
  out += "End\n";
  return out;
}

namespace {

bool parse_number(const std::string& token, double& value) {
  if (token.empty()) return false;
  const char c = token[0];
  if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')) return false;
  std::size_t used = 0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size();
}

bool is_sense(const std::string& t) { return t == "=" || t == "<=" || t == ">=" || t == "<" || t == ">" || t == "=<" || t == "=>"; }

std::string normalize_sense(const std::string& t) {
  if (t == "<" || t == "=<") return "<=";
  if (t == ">" || t == "=>") return ">=";
  return t;
}

// Parses "[sign] [coef] var ..." until a sense token or the end.
std::vector<std::pair<std::string, double>> parse_terms(const std::vector<std::string>& tokens, std::size_t& at) {
  std::vector<std::pair<std::string, double>> terms;
  while (at < tokens.size() && !is_sense(tokens[at])) {
    double sign = 1.0;
    if (tokens[at] == "+" || tokens[at] == "-") {
      sign = tokens[at] == "-" ? -1.0 : 1.0;
      ++at;
    }
    if (at >= tokens.size()) throw InvalidInput("LP term ends after a sign");
    double coef = 1.0;
    if (parse_number(tokens[at], coef)) ++at;
    if (at >= tokens.size() || is_sense(tokens[at])) throw InvalidInput("LP coefficient without a variable");
    terms.emplace_back(tokens[at], sign * coef);
    ++at;
  }
  return terms;
}

}  // namespace

LpModel parse_lp(const std::string& text) {
  enum class Section { none, objective, constraints, bounds, binaries, end };
  std::vector<std::string> objective_tokens, constraint_tokens;
  LpModel model;
  Section section = Section::none;

  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto cut = line.find('\\'); cut != std::string::npos) line.resize(cut);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;

    std::string lowered = line;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    lowered.erase(0, lowered.find_first_not_of(" \t"));
    lowered.erase(lowered.find_last_not_of(" \t\r") + 1);
    if (lowered == "minimize" || lowered == "minimum" || lowered == "min") {
      section = Section::objective;
      continue;
    }
    if (lowered == "subject to" || lowered == "st" || lowered == "s.t.") {
      section = Section::constraints;
      continue;
    }
    if (lowered == "bounds") {
      section = Section::bounds;
      continue;
    }
    if (lowered == "binaries" || lowered == "binary") {
      section = Section::binaries;
      continue;
    }
    if (lowered == "end") {
      section = Section::end;
      continue;
    }

    switch (section) {
      case Section::objective:
        objective_tokens.insert(objective_tokens.end(), tokens.begin(), tokens.end());
        break;
      case Section::constraints:
        constraint_tokens.insert(constraint_tokens.end(), tokens.begin(), tokens.end());
        break;
      case Section::bounds: {
        // lower <= var <= upper
        if (tokens.size() != 5 || tokens[1] != "<=" || tokens[3] != "<=")
          throw InvalidInput(fmt::format("unsupported LP bound line '{}'", line));
        LpModel::Bound b;
        b.var = tokens[2];
        if (!parse_number(tokens[0], b.lower) || !parse_number(tokens[4], b.upper))
          throw InvalidInput(fmt::format("bad LP bound line '{}'", line));
        model.bounds.push_back(b);
        break;
      }
      case Section::binaries:
        model.binaries.insert(model.binaries.end(), tokens.begin(), tokens.end());
        break;
      case Section::none:
      case Section::end:
        throw InvalidInput(fmt::format("LP content outside a section: '{}'", line));
    }
  }

  std::size_t at = 0;
  if (!objective_tokens.empty() && objective_tokens[0].back() == ':') at = 1;
  model.objective = parse_terms(objective_tokens, at);

  at = 0;
  while (at < constraint_tokens.size()) {
    LpModel::Row row;
    if (constraint_tokens[at].back() == ':') {
      row.name = constraint_tokens[at].substr(0, constraint_tokens[at].size() - 1);
      ++at;
    }
    row.terms = parse_terms(constraint_tokens, at);
    if (at + 1 >= constraint_tokens.size()) throw InvalidInput(fmt::format("LP row '{}' has no right-hand side", row.name));
    row.sense = normalize_sense(constraint_tokens[at++]);
    if (!parse_number(constraint_tokens[at++], row.rhs))
      throw InvalidInput(fmt::format("LP row '{}' has a non-numeric right-hand side", row.name));
    model.rows.push_back(std::move(row));
  }
  return model;
}

}  // namespace dronecvrp
