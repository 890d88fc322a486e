#include <fmt/core.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <iostream>
#include <json.hpp>
#include <map>
#include <thread>

#include "dronecvrp/bench_harness.hpp"
#include "dronecvrp/exact_solver.hpp"
#include "dronecvrp/gnn_heuristic.hpp"
#include "dronecvrp/io_formats.hpp"
#include "dronecvrp/mip_model.hpp"
#include "dronecvrp/oracle.hpp"
#include "dronecvrp/scenario.hpp"

using namespace dronecvrp;
using json = nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInfeasible = 3, kTimeout = 4, kIo = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

std::pair<double, double> parse_pair(const std::string& text, char sep, const std::string& what) {
  const auto at = text.find(sep);
  try {
    if (at == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const double a = std::stod(text.substr(0, at), &used);
    const auto rest = text.substr(at + 1);
    std::size_t used_b = 0;
    const double b = std::stod(rest, &used_b);
    if (used != at || used_b != rest.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::exception&) {
    throw UsageError(fmt::format("{} must look like A{}B, got '{}'", what, sep, text));
  }
}

DepotPlacement parse_depot(const std::string& text) {
  if (text == "corner") return {};
  if (text == "center") return {DepotPlacement::Kind::center, 0.0, 0.0};
  const auto [x, y] = parse_pair(text, ',', "--depot");
  return {DepotPlacement::Kind::explicit_point, x, y};
}

// type=count pairs over the default catalog.
std::vector<std::pair<AssetType, int>> parse_counts(const std::vector<std::string>& items) {
  auto catalog = default_catalog();
  std::vector<std::pair<AssetType, int>> out;
  for (const auto& t : catalog) out.emplace_back(t, 0);
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--counts entry '{}' is not type=count", item));
    const auto name = item.substr(0, eq);
    const auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first.name == name; });
    if (it == out.end()) throw UsageError(fmt::format("unknown asset type '{}'", name));
    try {
      std::size_t used = 0;
      it->second = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--counts entry '{}' has a bad count", item));
    }
    if (it->second < 0) throw UsageError(fmt::format("--counts entry '{}' is negative", item));
  }
  return out;
}

void print_violations(const std::vector<Violation>& violations) {
  for (const auto& v : violations) std::cerr << fmt::format("  {}: {}\n", to_string(v.kind), v.detail);
}

// ----- generate -----

struct GenerateArgs {
  std::uint64_t seed = 0;
  std::optional<int> n;
  std::vector<std::string> counts;
  std::string area = "1000x1000";
  std::string depot = "corner";
  int m = 5;
  double capacity = 5.5;
  double speed = 20.0;
  double endurance = 780.0;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  ScenarioConfig config;
  config.seed = args.seed;
  if (!args.counts.empty()) config.counts_per_type = parse_counts(args.counts);
  else config = default_scenario(args.n.value_or(10), args.seed);
  const auto [w, h] = parse_pair(args.area, 'x', "--area");
  config.area_width = w;
  config.area_height = h;
  config.depot = parse_depot(args.depot);
  config.m = args.m;
  config.capacity = args.capacity;
  config.speed = args.speed;
  config.endurance = args.endurance;

  const auto instance = generate_instance(config);
  const auto violations = validate_instance(instance);
  const bool hard = std::any_of(violations.begin(), violations.end(), [](const Violation& v) { return !v.is_warning(); });
  if (hard) {
    std::cerr << "generated instance is invalid:\n";
    print_violations(violations);
    return kUsage;
  }
  if (instance.m > instance.size())
    throw UsageError(fmt::format("m = {} drones for n = {} assets; the model requires m <= n", instance.m, instance.size()));
  emit(args.out, write_instance(instance));
  std::cerr << fmt::format("generated n = {} assets, m = {}, seed = {}: valid\n", instance.size(), instance.m, args.seed);
  return kOk;
}

// ----- solve -----

struct SolveArgs {
  std::string in;
  std::string method = "exact";
  double time_limit = 60.0;
  double gap = 0.0;
  std::string out;
  std::string lp;
};

int run_solve(const SolveArgs& args) {
  const auto instance = parse_instance(read_file(args.in));
  if (!args.lp.empty()) {
    const auto program = build_cvrp_model(instance, build_cost_matrix(instance));
    write_file(args.lp, export_lp(program));
  }

  const Method method = method_from_string(args.method);
  const auto start = std::chrono::steady_clock::now();
  std::optional<Solution> solution;
  SolveMetadata meta;
  int code = kOk;
  switch (method) {
    case Method::gnn:
      solution = solve_gnn(instance);
      meta.status = "feasible";
      break;
    case Method::exact:
    case Method::brute: {
      SolveResult result;
      if (method == Method::exact) {
        SolveConfig config;
        config.time_limit = args.time_limit;
        config.gap_tolerance = args.gap;
        result = solve_exact(instance, config);
      } else {
        result = solve_bruteforce(instance);
      }
      solution = result.incumbent;
      meta.status = to_string(result.status);
      meta.nodes = result.nodes_explored;
      meta.lower_bound = result.lower_bound;
      if (result.status == SolveStatus::infeasible) code = kInfeasible;
      else if (result.status != SolveStatus::optimal) code = kTimeout;
      break;
    }
    case Method::external:
      throw UsageError("method must be exact, gnn or brute");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  meta.wall_time = wall;

  if (!solution) {
    std::cerr << fmt::format("status {} wall_time {:.3f}s\n", meta.status.value_or("none"), wall);
    return code == kOk ? kInfeasible : code;
  }
  emit(args.out, write_solution(*solution, instance, meta));
  std::cerr << fmt::format("status {} cost {:.6f} wall_time {:.3f}s\n", *meta.status, solution->total_cost, wall);
  return code;
}

// ----- evaluate -----

int run_evaluate(const std::string& instance_path, const std::string& solution_path) {
  const auto instance = parse_instance(read_file(instance_path));
  const auto doc = parse_solution(read_file(solution_path));
  const auto e = evaluate_solution(instance, doc.solution);
  std::cout << fmt::format("cost {:.6f} violations {}\n", e.total_cost, e.violations.size());
  for (const auto& v : e.violations) std::cout << fmt::format("  {}: {}\n", to_string(v.kind), v.detail);
  return e.feasible() ? kOk : kInfeasible;
}

// ----- bench -----

ScenarioConfig scenario_from_json(const json& j, ScenarioConfig base) {
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("m")) base.m = j.at("m").get<int>();
  if (j.contains("capacity")) base.capacity = j.at("capacity").get<double>();
  if (j.contains("speed")) base.speed = j.at("speed").get<double>();
  if (j.contains("endurance")) base.endurance = j.at("endurance").get<double>();
  if (j.contains("area_width")) base.area_width = j.at("area_width").get<double>();
  if (j.contains("area_height")) base.area_height = j.at("area_height").get<double>();
  if (j.contains("depot")) {
    const auto& d = j.at("depot");
    if (d.is_string()) base.depot = parse_depot(d.get<std::string>());
    else base.depot = {DepotPlacement::Kind::explicit_point, d.at(0).get<double>(), d.at(1).get<double>()};
  }
  if (j.contains("catalog")) {
    base.counts_per_type.clear();
    int id = 0;
    for (const auto& t : j.at("catalog"))
      base.counts_per_type.emplace_back(
          AssetType{id++, t.at("name").get<std::string>(), t.at("demand").get<double>(), t.at("service_time").get<double>()},
          0);
  }
  return base;
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig config;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_values") config.n_values = value.get<std::vector<int>>();
    else if (key == "runs_per_n") config.runs_per_n = value.get<int>();
    else if (key == "exact_time_limit") config.exact_time_limit = value.get<double>();
    else if (key == "methods") {
      config.methods.clear();
      for (const auto& m : value) config.methods.insert(method_from_string(m.get<std::string>()));
    } else if (key == "base") config.base = scenario_from_json(value, config.base);
    else throw UsageError(fmt::format("unknown bench config key '{}'", key));
  }
  return config;
}

struct BenchArgs {
  std::string config;
  std::vector<int> n_values;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<int> m;
  std::vector<std::string> methods;
  std::optional<double> time_limit;
  std::vector<std::string> formats{"csv", "svg", "table"};
  std::string outdir = "bench_out";
  int jobs = 0;
};

int run_bench(const BenchArgs& args) {
  ExperimentConfig config;
  if (!args.config.empty()) {
    try {
      config = experiment_from_json(json::parse(read_file(args.config)));
    } catch (const json::exception& e) {
      throw ParseError(args.config, 0, e.what());
    }
  }
  if (!args.n_values.empty()) config.n_values = args.n_values;
  if (args.runs) config.runs_per_n = *args.runs;
  if (args.seed) config.base.seed = *args.seed;
  if (args.m) config.base.m = *args.m;
  if (args.time_limit) config.exact_time_limit = *args.time_limit;
  if (!args.methods.empty()) {
    config.methods.clear();
    for (const auto& m : args.methods) config.methods.insert(method_from_string(m));
  }

  std::set<ReportFormat> formats;
  for (const auto& f : args.formats) {
    if (f == "csv") formats.insert(ReportFormat::csv);
    else if (f == "svg") formats.insert(ReportFormat::svg_plots);
    else if (f == "table") formats.insert(ReportFormat::table_text);
    else throw UsageError(fmt::format("unknown report format '{}'", f));
  }

  const int jobs = args.jobs > 0 ? args.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto records = run_comparison(config, jobs);
  const auto paths = emit_report(records, formats, args.outdir);

  std::map<std::pair<std::string, std::string>, int> summary;
  for (const auto& r : records) ++summary[{to_string(r.method), r.status}];
  for (const auto& [key, count] : summary) std::cout << fmt::format("{:>6} {:<17} {}\n", key.first, key.second, count);
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
  return kOk;
}

// ----- convert -----

struct ConvertArgs {
  std::string from = "cvrplib";
  std::string in;
  std::string out;
  std::optional<int> vehicles;
  std::optional<int> truncate;
};

int run_convert(const ConvertArgs& args) {
  if (args.from != "cvrplib") throw UsageError(fmt::format("unsupported source format '{}'", args.from));
  auto instance = parse_cvrplib(read_file(args.in), CvrplibOptions{args.vehicles});
  if (args.truncate) instance = truncate_assets(instance, *args.truncate);
  emit(args.out, write_instance(instance));
  std::cerr << fmt::format("converted n = {} assets, m = {}\n", instance.size(), instance.m);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drone-assisted asset maintenance routing"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random instance");
  generate->add_option("--seed", gen.seed, "PRNG seed")->required();
  auto* n_opt = generate->add_option("--n", gen.n, "Total assets split evenly over the default types (default 10)");
  generate->add_option("--counts", gen.counts, "Per-type counts, e.g. bench=3 ambulance=2")->excludes(n_opt);
  generate->add_option("--area", gen.area, "Area WxH in meters")->capture_default_str();
  generate->add_option("--depot", gen.depot, "corner, center or X,Y")->capture_default_str();
  generate->add_option("--m", gen.m, "Number of drones")->capture_default_str();
  generate->add_option("--Q,--capacity", gen.capacity, "Drone capacity in liters")->capture_default_str();
  generate->add_option("--V,--speed", gen.speed, "Drone speed in m/s")->capture_default_str();
  generate->add_option("--endurance", gen.endurance, "Advisory flight endurance in seconds")->capture_default_str();
  generate->add_option("--out", gen.out, "Output file (default stdout)");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--in", sol.in, "Instance file")->required();
  solve->add_option("--method", sol.method, "exact, gnn or brute")
      ->check(CLI::IsMember({"exact", "gnn", "brute"}))
      ->capture_default_str();
  solve->add_option("--time-limit", sol.time_limit, "Exact solver time limit in seconds")->capture_default_str();
  solve->add_option("--gap", sol.gap, "Relative optimality gap for the exact solver")->capture_default_str();
  solve->add_option("--out", sol.out, "Solution file (default stdout)");
  solve->add_option("--lp", sol.lp, "Also write the integer program in LP format");

  std::string eval_instance, eval_solution;
  auto* evaluate = app.add_subcommand("evaluate", "Check a solution against an instance");
  evaluate->add_option("--in", eval_instance, "Instance file")->required();
  evaluate->add_option("--solution", eval_solution, "Solution file")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and write reports");
  bench->add_option("--config", bench_args.config, "JSON experiment configuration");
  bench->add_option("--n", bench_args.n_values, "Asset counts")->delimiter(',');
  bench->add_option("--runs", bench_args.runs, "Runs per asset count");
  bench->add_option("--seed", bench_args.seed, "Base seed");
  bench->add_option("--m", bench_args.m, "Number of drones");
  bench->add_option("--methods", bench_args.methods, "Methods to compare")->delimiter(',');
  bench->add_option("--time-limit", bench_args.time_limit, "Exact solver time limit per run");
  bench->add_option("--formats", bench_args.formats, "csv, svg, table")->delimiter(',');
  bench->add_option("--outdir", bench_args.outdir, "Report directory")->capture_default_str();
  bench->add_option("--jobs", bench_args.jobs, "Worker threads (default: hardware concurrency)");

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Convert a benchmark file to the native format");
  convert->add_option("--from", conv.from, "Source format")->check(CLI::IsMember({"cvrplib"}))->capture_default_str();
  convert->add_option("--in", conv.in, "Input file")->required();
  convert->add_option("--out", conv.out, "Output file (default stdout)");
  convert->add_option("--vehicles", conv.vehicles, "Override the vehicle count");
  convert->add_option("--truncate", conv.truncate, "Keep only the first N customers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*solve) return run_solve(sol);
    if (*evaluate) return run_evaluate(eval_instance, eval_solution);
    if (*bench) return run_bench(bench_args);
    if (*convert) return run_convert(conv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleProblem& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
