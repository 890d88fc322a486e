#include "dronecvrp/scenario.hpp"

#include <fmt/core.h>

namespace dronecvrp {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n, std::uint64_t run) {
  std::uint64_t state = base;
  std::uint64_t h = splitmix64(state);
  state = h ^ (n * 0xd1b54a32d192ed03ULL);
  h = splitmix64(state);
  state = h ^ (run * 0x8cb92ba72f3d8dd7ULL);
  return splitmix64(state);
}

int ScenarioConfig::total_assets() const {
  int total = 0;
  for (const auto& [type, count] : counts_per_type) total += count;
  return total;
}

std::vector<AssetType> default_catalog() {
  return {
      {0, "bench", 0.3, 60.0},
      {1, "wheelchair", 0.4, 90.0},
      {2, "ambulance", 1.2, 240.0},
      {3, "playground", 1.0, 180.0},
  };
}

ScenarioConfig with_total_assets(const ScenarioConfig& base, int n) {
  if (n < 1) throw InvalidInput("scenario needs at least one asset");
  if (base.counts_per_type.empty()) throw InvalidInput("scenario has no asset types");
  ScenarioConfig out = base;
  const int types = static_cast<int>(out.counts_per_type.size());
  for (int k = 0; k < types; ++k) out.counts_per_type[k].second = n / types + (k < n % types ? 1 : 0);
  return out;
}

ScenarioConfig default_scenario(int n, std::uint64_t seed) {
  ScenarioConfig config;
  config.seed = seed;
  for (auto& type : default_catalog()) config.counts_per_type.emplace_back(type, 0);
  return with_total_assets(config, n);
}

Instance generate_instance(const ScenarioConfig& config) {
  for (const auto& [type, count] : config.counts_per_type) {
    if (count < 0) throw InvalidInput(fmt::format("negative count for asset type '{}'", type.name));
  }
  if (config.total_assets() < 1) throw InvalidInput("scenario must contain at least one asset");
  if (!(config.area_width > 0.0) || !(config.area_height > 0.0))
    throw InvalidInput("area dimensions must be positive");

  Instance inst;
  inst.area_width = config.area_width;
  inst.area_height = config.area_height;
  switch (config.depot.kind) {
    case DepotPlacement::Kind::corner:
      inst.depot_x = 0.0;
      inst.depot_y = 0.0;
      break;
    case DepotPlacement::Kind::center:
      inst.depot_x = config.area_width / 2.0;
      inst.depot_y = config.area_height / 2.0;
      break;
    case DepotPlacement::Kind::explicit_point:
      inst.depot_x = config.depot.x;
      inst.depot_y = config.depot.y;
      break;
  }
  inst.m = config.m;
  inst.capacity = config.capacity;
  inst.speed = config.speed;
  inst.endurance = config.endurance;
  inst.provenance = Provenance{std::string(Xoshiro256::kName), config.seed};

  Xoshiro256 rng(config.seed);
  int next_id = 1;
  for (const auto& [type, count] : config.counts_per_type) {
    inst.catalog.push_back(type);
    for (int k = 0; k < count; ++k) {
      Asset a;
      a.id = next_id++;
      a.type_id = type.id;
      a.x = rng.uniform01() * config.area_width;
      a.y = rng.uniform01() * config.area_height;
      inst.assets.push_back(a);
    }
  }
  return inst;
}

}  // namespace dronecvrp
