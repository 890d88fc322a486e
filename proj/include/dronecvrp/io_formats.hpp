#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "dronecvrp/core_model.hpp"

namespace dronecvrp {

inline constexpr const char* kInstanceSchema = "dronecvrp-instance/1";
inline constexpr const char* kSolutionSchema = "dronecvrp-solution/1";

// Format error with the logical field path and the 1-based line it was
// detected on (0 when the problem is a missing field).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, int line, const std::string& message);

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-oriented "keyword value..." text; see docs/formats.md.
std::string write_instance(const Instance& instance);
Instance parse_instance(const std::string& text);

struct SolveMetadata {
  std::optional<std::string> status;
  std::optional<long> nodes;
  std::optional<double> wall_time;
  std::optional<double> lower_bound;

  bool operator==(const SolveMetadata&) const = default;
};

struct SolutionDocument {
  Solution solution;
  SolveMetadata metadata;
};

std::string write_solution(const Solution& solution, const Instance& instance, const SolveMetadata& metadata = {});
SolutionDocument parse_solution(const std::string& text);

struct CvrplibOptions {
  std::optional<int> vehicles;  // overrides the count found in the file
};

// Node-coordinate CVRP benchmark files (EUC_2D). Speed 1 so travel times
// equal distances, zero service times, one asset type per distinct demand.
Instance parse_cvrplib(const std::string& text, const CvrplibOptions& options = {});

// Keeps the depot and the first `count` assets (and the types they use).
Instance truncate_assets(const Instance& instance, int count);

// 64-bit FNV-1a of write_instance(instance); equal instances hash equal.
std::uint64_t instance_fingerprint(const Instance& instance);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dronecvrp
