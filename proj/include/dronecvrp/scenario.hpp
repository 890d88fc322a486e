#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "dronecvrp/core_model.hpp"

namespace dronecvrp {

// xoshiro256** seeded through splitmix64. The identifier below is written
// next to every generated instance; change it if the stream ever changes.
class Xoshiro256 {
 public:
  static constexpr std::string_view kName = "xoshiro256starstar-splitmix64-v1";

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  // Uniform double in [0, 1) built from the top 53 bits.
  double uniform01();

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

// Stable seed for cell (n, run) of a sweep rooted at `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n, std::uint64_t run);

struct DepotPlacement {
  enum class Kind { corner, center, explicit_point };
  Kind kind = Kind::corner;
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::vector<std::pair<AssetType, int>> counts_per_type;
  double area_width = 1000.0;
  double area_height = 1000.0;
  DepotPlacement depot;
  int m = 5;
  double capacity = 5.5;
  double speed = 20.0;
  double endurance = 780.0;

  int total_assets() const;
};

// bench, wheelchair, ambulance, playground equipment. Tunable defaults.
std::vector<AssetType> default_catalog();

// Paper-scale defaults: 1000 x 1000 m area, corner depot, default catalog
// with `n` assets split as evenly as possible over the types (earlier types
// take the remainder).
ScenarioConfig default_scenario(int n, std::uint64_t seed);

// Same parameters as `base`, with the type mix rescaled to `n` assets.
ScenarioConfig with_total_assets(const ScenarioConfig& base, int n);

Instance generate_instance(const ScenarioConfig& config);

}  // namespace dronecvrp
