#include "dronecvrp/io_formats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/core.h>

namespace dronecvrp {

ParseError::ParseError(std::string path, int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{} (line {}): {}", path, line, message)
                                  : fmt::format("{}: {}", path, message)),
      path_(std::move(path)),
      line_(line) {}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Line {
  int number;
  std::vector<std::string> words;
};

// Non-empty lines with '#' comments removed.
std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    auto words = split_words(raw);
    if (!words.empty()) out.push_back({number, std::move(words)});
  }
  return out;
}

double to_double(const std::string& word, const std::string& path, int line) {
  double v = 0.0;
  const char* first = word.data();
  const char* last = word.data() + word.size();
  if (!word.empty() && word[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError(path, line, fmt::format("'{}' is not a number", word));
  return v;
}

template <typename Int>
Int to_int(const std::string& word, const std::string& path, int line) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc() || ptr != word.data() + word.size())
    throw ParseError(path, line, fmt::format("'{}' is not an integer", word));
  return v;
}

void expect_arity(const Line& line, std::size_t arity, const std::string& path) {
  if (line.words.size() != arity)
    throw ParseError(path, line.number,
                     fmt::format("'{}' takes {} value(s), found {}", line.words[0], arity - 1, line.words.size() - 1));
}

void expect_header(const std::vector<Line>& lines, const char* schema, const char* root) {
  if (lines.empty()) throw ParseError(fmt::format("{}.schema", root), 0, "empty document");
  if (lines[0].words.size() != 1 || lines[0].words[0] != schema)
    throw ParseError(fmt::format("{}.schema", root), lines[0].number,
                     fmt::format("expected schema '{}', found '{}'", schema, lines[0].words[0]));
}

}  // namespace

std::string write_instance(const Instance& instance) {
  std::string out = fmt::format("{}\n", kInstanceSchema);
  out += fmt::format("area {} {}\n", num(instance.area_width), num(instance.area_height));
  out += fmt::format("depot {} {}\n", num(instance.depot_x), num(instance.depot_y));
  out += fmt::format("drones {}\n", instance.m);
  out += fmt::format("capacity {}\n", num(instance.capacity));
  out += fmt::format("speed {}\n", num(instance.speed));
  out += fmt::format("endurance {}\n", num(instance.endurance));
  if (instance.provenance)
    out += fmt::format("generator {} {}\n", instance.provenance->prng, instance.provenance->seed);
  out += "# type <id> <name> <demand_l> <service_time_s>\n";
  for (const auto& t : instance.catalog) {
    if (t.name.empty() || std::any_of(t.name.begin(), t.name.end(), [](unsigned char c) { return std::isspace(c) || c == '#'; }))
      throw InvalidInput(fmt::format("asset type name '{}' must be a single word", t.name));
    out += fmt::format("type {} {} {} {}\n", t.id, t.name, num(t.demand), num(t.service_time));
  }
  out += "# asset <id> <type_id> <x_m> <y_m>\n";
  for (const auto& a : instance.assets)
    out += fmt::format("asset {} {} {} {}\n", a.id, a.type_id, num(a.x), num(a.y));
  return out;
}

Instance parse_instance(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, kInstanceSchema, "instance");

  Instance inst;
  inst.catalog.clear();
  std::set<std::string> seen;
  const std::set<std::string> singletons{"area", "depot", "drones", "capacity", "speed", "endurance", "generator"};
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto& key = line.words[0];
    const std::string path = "instance." + key;
    if (singletons.contains(key) && !seen.insert(key).second)
      throw ParseError(path, line.number, "field appears more than once");

    if (key == "area") {
      expect_arity(line, 3, path);
      inst.area_width = to_double(line.words[1], path, line.number);
      inst.area_height = to_double(line.words[2], path, line.number);
    } else if (key == "depot") {
      expect_arity(line, 3, path);
      inst.depot_x = to_double(line.words[1], path, line.number);
      inst.depot_y = to_double(line.words[2], path, line.number);
    } else if (key == "drones") {
      expect_arity(line, 2, path);
      inst.m = to_int<int>(line.words[1], path, line.number);
    } else if (key == "capacity") {
      expect_arity(line, 2, path);
      inst.capacity = to_double(line.words[1], path, line.number);
    } else if (key == "speed") {
      expect_arity(line, 2, path);
      inst.speed = to_double(line.words[1], path, line.number);
    } else if (key == "endurance") {
      expect_arity(line, 2, path);
      inst.endurance = to_double(line.words[1], path, line.number);
    } else if (key == "generator") {
      expect_arity(line, 3, path);
      inst.provenance = Provenance{line.words[1], to_int<std::uint64_t>(line.words[2], path, line.number)};
    } else if (key == "type") {
      const std::string tpath = fmt::format("instance.catalog[{}]", inst.catalog.size());
      expect_arity(line, 5, tpath);
      inst.catalog.push_back({to_int<int>(line.words[1], tpath + ".id", line.number), line.words[2],
                              to_double(line.words[3], tpath + ".demand", line.number),
                              to_double(line.words[4], tpath + ".service_time", line.number)});
    } else if (key == "asset") {
      const std::string apath = fmt::format("instance.assets[{}]", inst.assets.size());
      expect_arity(line, 5, apath);
      Asset a;
      a.id = to_int<int>(line.words[1], apath + ".id", line.number);
      a.type_id = to_int<int>(line.words[2], apath + ".type_id", line.number);
      a.x = to_double(line.words[3], apath + ".x", line.number);
      a.y = to_double(line.words[4], apath + ".y", line.number);
      if (a.id != static_cast<int>(inst.assets.size()) + 1)
        throw ParseError(apath + ".id", line.number,
                         fmt::format("asset ids must run 1..n in order, expected {}", inst.assets.size() + 1));
      inst.assets.push_back(a);
    } else {
      throw ParseError(path, line.number, fmt::format("unknown field '{}'", key));
    }
  }
  for (const char* required : {"area", "depot", "drones", "capacity", "speed", "endurance"}) {
    if (!seen.contains(required))
      throw ParseError(fmt::format("instance.{}", required), 0, fmt::format("missing required field '{}'", required));
  }
  std::set<int> type_ids;
  for (const auto& t : inst.catalog) type_ids.insert(t.id);
  for (std::size_t k = 0; k < inst.assets.size(); ++k) {
    if (!type_ids.contains(inst.assets[k].type_id))
      throw ParseError(fmt::format("instance.assets[{}].type_id", k), 0,
                       fmt::format("type {} is not declared", inst.assets[k].type_id));
  }
  return inst;
}

std::string write_solution(const Solution& solution, const Instance& instance, const SolveMetadata& metadata) {
  std::string out = fmt::format("{}\n", kSolutionSchema);
  out += fmt::format("method {}\n", to_string(solution.method));
  out += fmt::format("assets {}\n", instance.size());
  out += fmt::format("total_cost {}\n", num(solution.total_cost));
  if (metadata.status) out += fmt::format("status {}\n", *metadata.status);
  if (metadata.lower_bound) out += fmt::format("lower_bound {}\n", num(*metadata.lower_bound));
  if (metadata.nodes) out += fmt::format("nodes {}\n", *metadata.nodes);
  if (metadata.wall_time) out += fmt::format("wall_time {}\n", num(*metadata.wall_time));
  out += "# route <drone_id> <load_l> <duration_s> <stop_count> <stops...>\n";
  for (const auto& r : solution.routes) {
    out += fmt::format("route {} {} {} {}", r.drone_id, num(r.load), num(r.duration), r.stops.size());
    for (int s : r.stops) out += fmt::format(" {}", s);
    out += '\n';
  }
  return out;
}

SolutionDocument parse_solution(const std::string& text) {
  const auto lines = tokenize(text);
  expect_header(lines, kSolutionSchema, "solution");

  SolutionDocument doc;
  std::set<std::string> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    const auto& key = line.words[0];
    const std::string path = "solution." + key;
    if (key != "route" && !seen.insert(key).second) throw ParseError(path, line.number, "field appears more than once");

    if (key == "method") {
      expect_arity(line, 2, path);
      try {
        doc.solution.method = method_from_string(line.words[1]);
      } catch (const InvalidInput& e) {
        throw ParseError(path, line.number, e.what());
      }
    } else if (key == "assets") {
      expect_arity(line, 2, path);
      to_int<int>(line.words[1], path, line.number);
    } else if (key == "total_cost") {
      expect_arity(line, 2, path);
      doc.solution.total_cost = to_double(line.words[1], path, line.number);
    } else if (key == "status") {
      expect_arity(line, 2, path);
      doc.metadata.status = line.words[1];
    } else if (key == "lower_bound") {
      expect_arity(line, 2, path);
      doc.metadata.lower_bound = to_double(line.words[1], path, line.number);
    } else if (key == "nodes") {
      expect_arity(line, 2, path);
      doc.metadata.nodes = to_int<long>(line.words[1], path, line.number);
    } else if (key == "wall_time") {
      expect_arity(line, 2, path);
      doc.metadata.wall_time = to_double(line.words[1], path, line.number);
    } else if (key == "route") {
      const std::string rpath = fmt::format("solution.routes[{}]", doc.solution.routes.size());
      if (line.words.size() < 5) throw ParseError(rpath, line.number, "route needs id, load, duration and stop count");
      Route r;
      r.drone_id = to_int<int>(line.words[1], rpath + ".drone_id", line.number);
      r.load = to_double(line.words[2], rpath + ".load", line.number);
      r.duration = to_double(line.words[3], rpath + ".duration", line.number);
      const auto count = to_int<std::size_t>(line.words[4], rpath + ".stops", line.number);
      if (line.words.size() != 5 + count)
        throw ParseError(rpath + ".stops", line.number,
                         fmt::format("declares {} stops, lists {}", count, line.words.size() - 5));
      for (std::size_t s = 0; s < count; ++s)
        r.stops.push_back(to_int<int>(line.words[5 + s], rpath + ".stops", line.number));
      doc.solution.routes.push_back(std::move(r));
    } else {
      throw ParseError(path, line.number, fmt::format("unknown field '{}'", key));
    }
  }
  for (const char* required : {"method", "total_cost"}) {
    if (!seen.contains(required))
      throw ParseError(fmt::format("solution.{}", required), 0, fmt::format("missing required field '{}'", required));
  }
  return doc;
}

Instance parse_cvrplib(const std::string& text, const CvrplibOptions& options) {
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  std::map<std::string, std::string> spec;
  std::map<int, std::pair<double, double>> coords;
  std::map<int, double> demands;
  std::vector<int> depots;
  enum class Section { header, coords, demands, depots, done } section = Section::header;

  while (std::getline(in, raw)) {
    ++number;
    auto words = split_words(raw);
    if (words.empty()) continue;
    const std::string& head = words[0];
    if (head == "EOF") break;
    if (head == "NODE_COORD_SECTION") {
      section = Section::coords;
      continue;
    }
    if (head == "DEMAND_SECTION") {
      section = Section::demands;
      continue;
    }
    if (head == "DEPOT_SECTION") {
      section = Section::depots;
      continue;
    }
    if (head.size() > 8 && head.ends_with("_SECTION"))
      throw ParseError("cvrplib." + head, number, "unsupported section");

    if (const auto colon = raw.find(':'); section == Section::header || (colon != std::string::npos && !std::isdigit(static_cast<unsigned char>(head[0])) && head[0] != '-')) {
      if (colon == std::string::npos) throw ParseError("cvrplib.header", number, fmt::format("expected 'KEY : value', found '{}'", raw));
      std::string key = raw.substr(0, colon);
      std::string value = raw.substr(colon + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
      };
      trim(key);
      trim(value);
      spec[key] = value;
      section = Section::header;
      continue;
    }
    switch (section) {
      case Section::coords:
        if (words.size() != 3) throw ParseError("cvrplib.NODE_COORD_SECTION", number, "expected 'id x y'");
        coords[to_int<int>(words[0], "cvrplib.NODE_COORD_SECTION", number)] = {
            to_double(words[1], "cvrplib.NODE_COORD_SECTION", number),
            to_double(words[2], "cvrplib.NODE_COORD_SECTION", number)};
        break;
      case Section::demands:
        if (words.size() != 2) throw ParseError("cvrplib.DEMAND_SECTION", number, "expected 'id demand'");
        demands[to_int<int>(words[0], "cvrplib.DEMAND_SECTION", number)] =
            to_double(words[1], "cvrplib.DEMAND_SECTION", number);
        break;
      case Section::depots:
        for (const auto& w : words) {
          const int id = to_int<int>(w, "cvrplib.DEPOT_SECTION", number);
          if (id == -1) section = Section::done;
          else if (section == Section::depots) depots.push_back(id);
        }
        break;
      case Section::header:
      case Section::done:
        break;
    }
  }

  const auto weight = spec.contains("EDGE_WEIGHT_TYPE") ? spec["EDGE_WEIGHT_TYPE"] : std::string("EUC_2D");
  if (weight != "EUC_2D")
    throw ParseError("cvrplib.EDGE_WEIGHT_TYPE", 0, fmt::format("unsupported edge weight type '{}'", weight));
  if (!spec.contains("CAPACITY")) throw ParseError("cvrplib.CAPACITY", 0, "missing required field 'CAPACITY'");
  if (!spec.contains("DIMENSION")) throw ParseError("cvrplib.DIMENSION", 0, "missing required field 'DIMENSION'");
  const int dimension = to_int<int>(spec["DIMENSION"], "cvrplib.DIMENSION", 0);
  if (static_cast<int>(coords.size()) != dimension)
    throw ParseError("cvrplib.NODE_COORD_SECTION", 0, fmt::format("{} coordinates for dimension {}", coords.size(), dimension));
  if (static_cast<int>(demands.size()) != dimension)
    throw ParseError("cvrplib.DEMAND_SECTION", 0, fmt::format("{} demands for dimension {}", demands.size(), dimension));
  if (depots.size() != 1) throw ParseError("cvrplib.DEPOT_SECTION", 0, "exactly one depot is supported");
  const int depot = depots.front();
  if (!coords.contains(depot)) throw ParseError("cvrplib.DEPOT_SECTION", 0, fmt::format("depot {} has no coordinates", depot));

  int vehicles = 0;
  if (options.vehicles) {
    vehicles = *options.vehicles;
  } else if (spec.contains("VEHICLES")) {
    vehicles = to_int<int>(spec["VEHICLES"], "cvrplib.VEHICLES", 0);
  } else {
    // Conventional "-k<vehicles>" suffix of the instance name, then the comment.
    const std::string name = spec.contains("NAME") ? spec["NAME"] : "";
    if (const auto k = name.rfind("-k"); k != std::string::npos) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(name.data() + k + 2, name.data() + name.size(), v);
      if (ec == std::errc() && ptr == name.data() + name.size()) vehicles = v;
    }
    if (vehicles == 0 && spec.contains("COMMENT")) {
      const auto& comment = spec["COMMENT"];
      if (const auto t = comment.find("trucks:"); t != std::string::npos) vehicles = std::atoi(comment.c_str() + t + 7);
    }
  }
  if (vehicles < 1) throw ParseError("cvrplib.VEHICLES", 0, "vehicle count not found; pass an explicit override");

  Instance inst;
  inst.m = vehicles;
  inst.capacity = to_double(spec["CAPACITY"], "cvrplib.CAPACITY", 0);
  inst.speed = 1.0;
  inst.depot_x = coords[depot].first;
  inst.depot_y = coords[depot].second;
  double max_x = inst.depot_x, max_y = inst.depot_y;
  std::map<double, int> type_of_demand;
  for (const auto& [id, xy] : coords) {
    if (id == depot) continue;
    const double q = demands[id];
    auto [it, fresh] = type_of_demand.try_emplace(q, static_cast<int>(type_of_demand.size()));
    if (fresh) inst.catalog.push_back({it->second, fmt::format("demand_{}", num(q)), q, 0.0});
    Asset a;
    a.id = static_cast<int>(inst.assets.size()) + 1;
    a.type_id = it->second;
    a.x = xy.first;
    a.y = xy.second;
    inst.assets.push_back(a);
    max_x = std::max(max_x, a.x);
    max_y = std::max(max_y, a.y);
  }
  inst.area_width = std::max(max_x, 1.0);
  inst.area_height = std::max(max_y, 1.0);
  // Route durations are distances here; endurance is effectively unlimited.
  inst.endurance = 1e12;
  return inst;
}

Instance truncate_assets(const Instance& instance, int count) {
  if (count < 1 || count > instance.size())
    throw InvalidInput(fmt::format("cannot keep {} of {} assets", count, instance.size()));
  Instance out = instance;
  out.assets.resize(count);
  std::set<int> used;
  for (const auto& a : out.assets) used.insert(a.type_id);
  std::erase_if(out.catalog, [&](const AssetType& t) { return !used.contains(t.id); });
  out.provenance.reset();
  return out;
}

std::uint64_t instance_fingerprint(const Instance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : write_instance(instance)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << contents;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

}  // namespace dronecvrp
