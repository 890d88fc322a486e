#include "dronecvrp/bench_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/core.h>

#include "dronecvrp/exact_solver.hpp"
#include "dronecvrp/gnn_heuristic.hpp"
#include "dronecvrp/io_formats.hpp"
#include "dronecvrp/oracle.hpp"

namespace dronecvrp {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

RunRecord solve_cell(const Instance& instance, Method method, double exact_time_limit) {
  RunRecord rec;
  rec.method = method;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::exact: {
        SolveConfig config;
        config.time_limit = exact_time_limit;
        const auto result = solve_exact(instance, config);
        rec.status = to_string(result.status);
        if (result.incumbent) rec.total_cost = result.incumbent->total_cost;
        break;
      }
      case Method::brute: {
        const auto result = solve_bruteforce(instance);
        rec.status = to_string(result.status);
        if (result.incumbent) rec.total_cost = result.incumbent->total_cost;
        break;
      }
      case Method::gnn: {
        const auto sol = solve_gnn(instance);
        rec.status = "feasible";
        rec.total_cost = sol.total_cost;
        break;
      }
      case Method::external:
        rec.status = "error";
        break;
    }
  } catch (const InfeasibleProblem&) {
    rec.status = "infeasible";
    rec.total_cost.reset();
  } catch (const std::exception&) {
    rec.status = "error";
    rec.total_cost.reset();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

bool is_reference(const RunRecord& r) {
  return (r.method == Method::exact || r.method == Method::brute) && r.status == "optimal" && r.total_cost;
}

}  // namespace

int default_runs_for(int n) { return n <= 20 ? 30 : 10; }

bool RunRecord::same_outcome(const RunRecord& other) const {
  return n == other.n && run == other.run && method == other.method && total_cost == other.total_cost &&
         status == other.status && seed == other.seed && instance_hash == other.instance_hash;
}

std::vector<RunRecord> run_comparison(const ExperimentConfig& config, int jobs) {
  if (config.runs_per_n < 1) throw InvalidInput("runs_per_n must be >= 1");
  if (config.n_values.empty()) throw InvalidInput("no n values to sweep");
  if (config.methods.empty()) throw InvalidInput("no methods selected");
  for (int n : config.n_values)
    if (n < 1) throw InvalidInput(fmt::format("n = {} is not a valid asset count", n));

  struct Cell {
    int n;
    int run;
  };
  std::vector<Cell> cells;
  for (int n : config.n_values)
    for (int run = 0; run < config.runs_per_n; ++run) cells.push_back({n, run});

  std::vector<std::vector<RunRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      const auto [n, run] = cells[k];
      ScenarioConfig scenario = with_total_assets(config.base, n);
      scenario.seed = derive_seed(config.base.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(run));
      const Instance instance = generate_instance(scenario);
      const auto hash = instance_fingerprint(instance);
      for (Method method : config.methods) {
        RunRecord rec = solve_cell(instance, method, config.exact_time_limit);
        rec.n = n;
        rec.run = run;
        rec.seed = scenario.seed;
        rec.instance_hash = hash;
        results[k].push_back(std::move(rec));
      }
    }
  };

  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<RunRecord> out;
  for (auto& cell : results)
    for (auto& rec : cell) out.push_back(std::move(rec));
  std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.n, a.run, a.method) < std::tie(b.n, b.run, b.method);
  });
  return out;
}

std::vector<std::pair<double, double>> compute_cdf(std::vector<double> samples) {
  if (samples.empty()) throw InvalidInput("CDF of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double total = static_cast<double>(samples.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k + 1 < samples.size() && samples[k + 1] == samples[k]) continue;
    out.emplace_back(samples[k], static_cast<double>(k + 1) / total);
  }
  return out;
}

double cdf_at(const std::vector<std::pair<double, double>>& cdf, double value) {
  double fraction = 0.0;
  for (const auto& [x, f] : cdf) {
    if (x > value) break;
    fraction = f;
  }
  return fraction;
}

PairedCosts paired_costs(const std::vector<RunRecord>& records, std::optional<int> n) {
  std::map<std::pair<int, int>, std::pair<std::optional<double>, std::optional<double>>> cells;
  for (const auto& r : records) {
    if (n && r.n != *n) continue;
    auto& cell = cells[{r.n, r.run}];
    if (is_reference(r) && (!cell.first || r.method == Method::exact)) cell.first = r.total_cost;
    if (r.method == Method::gnn && r.total_cost) cell.second = r.total_cost;
  }
  PairedCosts out;
  for (const auto& [key, cell] : cells) {
    if (cell.first && cell.second) {
      out.exact.push_back(*cell.first);
      out.gnn.push_back(*cell.second);
    }
  }
  return out;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = fmt::format("{}\n", kCsvHeader);
  for (const auto& r : records)
    out += fmt::format("{},{},{},{},{},{},{}\n", r.n, r.run, to_string(r.method), r.total_cost ? num(*r.total_cost) : "",
                       num(r.wall_time), r.status, r.seed);
  return out;
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InvalidInput("CSV header does not match the run schema");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 7) throw InvalidInput(fmt::format("CSV row '{}' does not have 7 fields", line));
    RunRecord r;
    r.n = std::stoi(fields[0]);
    r.run = std::stoi(fields[1]);
    r.method = method_from_string(fields[2]);
    if (!fields[3].empty()) r.total_cost = std::stod(fields[3]);
    r.wall_time = std::stod(fields[4]);
    r.status = fields[5];
    r.seed = std::stoull(fields[6]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

const char* colour_of(Method m) {
  switch (m) {
    case Method::exact: return "#1f77b4";
    case Method::gnn: return "#d62728";
    case Method::brute: return "#2ca02c";
    case Method::external: return "#7f7f7f";
  }
  return "#000000";
}

// Minimal SVG line/scatter chart.
class Chart {
 public:
  Chart(std::string title, std::string x_label, std::string y_label, bool log_y)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), log_y_(log_y) {}

  void set_range(double x0, double x1, double y0, double y1, bool pad_y = true) {
    if (x1 <= x0) x1 = x0 + 1.0;
    if (log_y_) {
      y0 = std::floor(std::log10(std::max(y0, 1e-9)));
      y1 = std::ceil(std::log10(std::max(y1, 1e-9)));
      if (y1 <= y0) y1 = y0 + 1.0;
    } else if (pad_y || y1 <= y0) {
      const double pad = std::max((y1 - y0) * 0.05, 1e-9);
      y0 -= pad;
      y1 += pad;
    }
    x0_ = x0;
    x1_ = x1;
    y0_ = y0;
    y1_ = y1;
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    const double v = log_y_ ? std::log10(std::max(y, 1e-9)) : y;
    return kHeight - kBottom - (v - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom);
  }

  void point(Method method, double x, double y, const std::string& value_text, int n) {
    body_ += fmt::format(
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\" "
        "data-method=\"{}\" data-n=\"{}\" data-value=\"{}\"/>\n",
        px(x), py(y), colour_of(method), to_string(method), n, value_text);
  }

  void polyline(Method method, const std::vector<std::pair<double, double>>& pts, const std::string& extra = "") {
    std::string coords;
    for (const auto& [x, y] : pts) coords += fmt::format("{:.2f},{:.2f} ", px(x), py(y));
    body_ += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" data-method=\"{}\" {}/>\n",
                         coords, colour_of(method), to_string(method), extra);
  }

  void whisker(Method method, double x, double lo, double hi) {
    body_ += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\" stroke-width=\"1\"/>\n",
                         px(x), py(lo), py(hi), colour_of(method));
  }

  void legend(const std::vector<Method>& methods) { legend_ = methods; }

  std::string render(const std::vector<double>& x_ticks) const {
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
    out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", kWidth / 2, title_);
    const double bx0 = px(x0_), bx1 = px(x1_), by0 = kHeight - kBottom, by1 = kTop;
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#333\"/>\n",
                       bx0, by1, bx1 - bx0, by0 - by1);
    for (double t : x_ticks) {
      out += fmt::format("<line x1=\"{0:.2f}\" x2=\"{0:.2f}\" y1=\"{1:.2f}\" y2=\"{2:.2f}\" stroke=\"#333\"/>\n", px(t), by0,
                         by0 + 5);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(t), by0 + 18,
                         fmt::format("{:.6g}", t));
    }
    const int y_steps = log_y_ ? static_cast<int>(y1_ - y0_) : 5;
    for (int k = 0; k <= y_steps; ++k) {
      const double v = y0_ + (y1_ - y0_) * k / y_steps;
      const double y = kHeight - kBottom - (v - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom);
      const std::string label = log_y_ ? fmt::format("1e{}", static_cast<int>(std::lround(v))) : fmt::format("{:.4g}", v);
      out += fmt::format("<line x1=\"{0:.2f}\" x2=\"{1:.2f}\" y1=\"{2:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n", bx0, bx1, y);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", bx0 - 6, y + 4, label);
    }
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (bx0 + bx1) / 2, kHeight - 12,
                       x_label_);
    out += fmt::format("<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
                       (by0 + by1) / 2, (by0 + by1) / 2, y_label_);
    out += body_;
    double ly = kTop + 14;
    for (Method m : legend_) {
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", bx1 - 110, ly - 10,
                         colour_of(m));
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", bx1 - 92, ly, to_string(m));
      ly += 18;
    }
    out += "</svg>\n";
    return out;
  }

 private:
  static constexpr int kWidth = 640;
  static constexpr int kHeight = 420;
  static constexpr int kLeft = 70;
  static constexpr int kRight = 20;
  static constexpr int kTop = 36;
  static constexpr int kBottom = 50;

  std::string title_, x_label_, y_label_;
  bool log_y_;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  std::string body_;
  std::vector<Method> legend_;
};

std::vector<Method> methods_in(const std::vector<RunRecord>& records) {
  std::set<Method> seen;
  for (const auto& r : records) seen.insert(r.method);
  return {seen.begin(), seen.end()};
}

std::vector<double> n_ticks(const std::vector<RunRecord>& records) {
  std::set<int> ns;
  for (const auto& r : records) ns.insert(r.n);
  return {ns.begin(), ns.end()};
}

std::string runtime_svg(const std::vector<RunRecord>& records) {
  Chart chart("Solve time vs. number of assets", "assets n", "wall time (s, log scale)", true);
  const auto ticks = n_ticks(records);
  double lo = 1e300, hi = 0.0;
  for (const auto& r : records) {
    lo = std::min(lo, r.wall_time);
    hi = std::max(hi, r.wall_time);
  }
  chart.set_range(ticks.front() - 1, ticks.back() + 1, lo, hi);
  const auto methods = methods_in(records);
  for (Method m : methods) {
    std::map<int, std::pair<double, int>> mean;
    for (const auto& r : records) {
      if (r.method != m) continue;
      chart.point(m, r.n, r.wall_time, num(r.wall_time), r.n);
      mean[r.n].first += r.wall_time;
      mean[r.n].second += 1;
    }
    std::vector<std::pair<double, double>> line;
    for (const auto& [n, acc] : mean) line.emplace_back(n, acc.first / acc.second);
    chart.polyline(m, line);
  }
  chart.legend(methods);
  return chart.render(ticks);
}

std::vector<std::pair<Method, std::vector<std::pair<double, double>>>> cdfs_of(const std::vector<RunRecord>& records) {
  const auto paired = paired_costs(records);
  std::vector<std::pair<Method, std::vector<std::pair<double, double>>>> out;
  if (paired.exact.empty()) return out;
  out.emplace_back(Method::exact, compute_cdf(paired.exact));
  out.emplace_back(Method::gnn, compute_cdf(paired.gnn));
  return out;
}

std::string cdf_csv(const std::vector<RunRecord>& records) {
  std::string out = "method,cost_s,cumulative_fraction\n";
  for (const auto& [method, cdf] : cdfs_of(records))
    for (const auto& [x, f] : cdf) out += fmt::format("{},{},{}\n", to_string(method), num(x), num(f));
  return out;
}

std::string cdf_svg(const std::vector<RunRecord>& records) {
  Chart chart("Total travel time CDF (paired runs, exact optimal)", "total time (s)", "fraction of runs", false);
  const auto cdfs = cdfs_of(records);
  double lo = 1e300, hi = -1e300;
  for (const auto& [m, cdf] : cdfs) {
    lo = std::min(lo, cdf.front().first);
    hi = std::max(hi, cdf.back().first);
  }
  if (cdfs.empty()) {
    lo = 0.0;
    hi = 1.0;
  }
  const double span = std::max(hi - lo, 1.0);
  chart.set_range(lo - 0.02 * span, hi + 0.02 * span, 0.0, 1.0, false);
  std::vector<Method> legend;
  for (const auto& [m, cdf] : cdfs) {
    std::vector<std::pair<double, double>> steps{{cdf.front().first, 0.0}};
    double prev = 0.0;
    for (const auto& [x, f] : cdf) {
      steps.emplace_back(x, prev);
      steps.emplace_back(x, f);
      prev = f;
    }
    chart.polyline(m, steps);
    for (const auto& [x, f] : cdf) chart.point(m, x, f, num(x), 0);
    legend.push_back(m);
  }
  chart.legend(legend);
  std::vector<double> ticks;
  for (int k = 0; k <= 4; ++k) ticks.push_back(lo + (hi - lo) * k / 4.0);
  return chart.render(ticks);
}

std::string cost_svg(const std::vector<RunRecord>& records) {
  Chart chart("Mean total travel time vs. number of assets", "assets n", "total time (s)", false);
  const auto ticks = n_ticks(records);
  struct Stat {
    double sum = 0, lo = 1e300, hi = -1e300;
    int count = 0;
  };
  std::map<Method, std::map<int, Stat>> stats;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : records) {
    const bool usable = r.total_cost && (r.method == Method::gnn || r.status == "optimal");
    if (!usable) continue;
    auto& s = stats[r.method][r.n];
    s.sum += *r.total_cost;
    s.lo = std::min(s.lo, *r.total_cost);
    s.hi = std::max(s.hi, *r.total_cost);
    ++s.count;
    lo = std::min(lo, s.lo);
    hi = std::max(hi, s.hi);
  }
  if (stats.empty()) {
    lo = 0.0;
    hi = 1.0;
  }
  chart.set_range(ticks.front() - 1, ticks.back() + 1, lo, hi);
  std::vector<Method> legend;
  for (const auto& [m, per_n] : stats) {
    std::vector<std::pair<double, double>> line;
    // Offset methods slightly so whiskers do not overlap.
    const double shift = m == Method::gnn ? 0.12 : -0.12;
    for (const auto& [n, s] : per_n) {
      const double mean = s.sum / s.count;
      line.emplace_back(n + shift, mean);
      chart.whisker(m, n + shift, s.lo, s.hi);
      chart.point(m, n + shift, mean, num(mean), n);
    }
    chart.polyline(m, line);
    legend.push_back(m);
  }
  chart.legend(legend);
  return chart.render(ticks);
}

std::string table_text(const std::vector<RunRecord>& records) {
  std::string out = fmt::format("{:>4} {:>6} {:>5} {:>7} {:>8} {:>12} {:>12} {:>12} {:>12}\n", "n", "method", "runs",
                                "solved", "optimal", "mean_cost_s", "min_cost_s", "max_cost_s", "median_wall_s");
  std::map<std::pair<int, Method>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[{r.n, r.method}].push_back(&r);
  for (const auto& [key, rs] : groups) {
    double sum = 0, lo = 1e300, hi = -1e300;
    int solved = 0, optimal = 0;
    std::vector<double> walls;
    for (const auto* r : rs) {
      walls.push_back(r->wall_time);
      if (r->status == "optimal") ++optimal;
      if (!r->total_cost) continue;
      ++solved;
      sum += *r->total_cost;
      lo = std::min(lo, *r->total_cost);
      hi = std::max(hi, *r->total_cost);
    }
    std::sort(walls.begin(), walls.end());
    const double median =
        walls.size() % 2 ? walls[walls.size() / 2] : (walls[walls.size() / 2 - 1] + walls[walls.size() / 2]) / 2.0;
    out += fmt::format("{:>4} {:>6} {:>5} {:>7} {:>8} {:>12.3f} {:>12.3f} {:>12.3f} {:>12.6f}\n", key.first,
                       to_string(key.second), rs.size(), solved, optimal, solved ? sum / solved : 0.0,
                       solved ? lo : 0.0, solved ? hi : 0.0, median);
  }
  std::set<int> ns;
  for (const auto& r : records) ns.insert(r.n);
  out += "\ngnn / optimal cost ratio over paired runs\n";
  for (int n : ns) {
    const auto paired = paired_costs(records, n);
    if (paired.exact.empty()) continue;
    double ratio = 0.0, worst = 0.0;
    for (std::size_t k = 0; k < paired.exact.size(); ++k) {
      const double q = paired.gnn[k] / paired.exact[k];
      ratio += q;
      worst = std::max(worst, q);
    }
    out += fmt::format("  n={:<3} pairs={:<4} mean={:.4f} max={:.4f}\n", n, paired.exact.size(),
                       ratio / paired.exact.size(), worst);
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const std::vector<RunRecord>& records,
                                               const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& outdir) {
  if (records.empty()) throw InvalidInput("no run records to report");
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", outdir.string(), ec.message()));

  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& contents) {
    const auto path = outdir / name;
    write_file(path.string(), contents);
    written.push_back(path);
  };
  if (formats.contains(ReportFormat::csv)) {
    emit("results.csv", records_to_csv(records));
    emit("cost_cdf.csv", cdf_csv(records));
  }
  if (formats.contains(ReportFormat::table_text)) emit("report.txt", table_text(records));
  if (formats.contains(ReportFormat::svg_plots)) {
    emit("runtime_vs_n.svg", runtime_svg(records));
    emit("cost_cdf.svg", cdf_svg(records));
    emit("cost_vs_n.svg", cost_svg(records));
  }
  return written;
}

}  // namespace dronecvrp
