#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minesim/ids.hpp"
#include "minesim/random_events.hpp"

namespace minesim {

struct TruckFleetConfig {
  std::string type;
  int count{1};
  double capacity{1.0};  // tons
  double speed{1.0};     // km per minute
  events::HazardParams hazard{};

  bool operator==(const TruckFleetConfig&) const = default;
};

struct ChargingSiteConfig {
  std::string name{"charging"};
  Vec2 position{};
  std::vector<TruckFleetConfig> fleets;

  bool operator==(const ChargingSiteConfig&) const = default;
};

struct ShovelConfig {
  std::string type;
  int count{1};
  double bucket_size{1.0};  // tons per bucket
  double cycle_time{1.0};   // minutes per bucket
  events::HazardParams hazard{};

  bool operator==(const ShovelConfig&) const = default;
};

struct LoadSiteConfig {
  std::string name;
  Vec2 position{};
  std::vector<ShovelConfig> shovels;
  int parking_capacity{0};  // 0 = unbounded; informational for policies

  bool operator==(const LoadSiteConfig&) const = default;
};

struct DumpSpotConfig {
  int count{1};
  double unload_time{1.0};  // minutes

  bool operator==(const DumpSpotConfig&) const = default;
};

struct DumpSiteConfig {
  std::string name;
  Vec2 position{};
  std::vector<DumpSpotConfig> spots;

  bool operator==(const DumpSiteConfig&) const = default;
};

struct RoadNetworkConfig {
  // Explicit distances override the Euclidean ones derived from coordinates.
  std::optional<std::vector<double>> charging_to_load;
  std::optional<std::vector<std::vector<double>>> load_to_dump;  // [load][dump]
  events::JamParams jam{};
  events::HazardParams maintenance{};
  double penalty_mean{0.0};  // fractional travel-time penalty during maintenance
  double penalty_std{0.0};

  bool operator==(const RoadNetworkConfig&) const = default;
};

struct SimulationSettings {
  double duration{240.0};  // minutes
  int tick_interval{1};    // minutes between tick records
  std::uint64_t seed{0};

  bool operator==(const SimulationSettings&) const = default;
};

struct MineConfig {
  std::string name;
  bool synthetic{false};
  ChargingSiteConfig charging;
  std::vector<LoadSiteConfig> load_sites;
  std::vector<DumpSiteConfig> dump_sites;
  RoadNetworkConfig roads;
  SimulationSettings simulation;

  int truck_count() const;
  int shovel_count() const;
  int spot_count() const;

  bool operator==(const MineConfig&) const = default;
};

// Carries every validation problem found, each prefixed with a JSON pointer
// into the offending document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

MineConfig parse_config(const std::filesystem::path& path);
MineConfig parse_config_json(const nlohmann::json& doc);
MineConfig parse_config_string(const std::string& text);

// Semantic checks on an already-typed config. Empty result means valid.
std::vector<std::string> validate(const MineConfig& config);

nlohmann::json to_json(const MineConfig& config);
std::string emit_config(const MineConfig& config);  // canonical, pretty printed

// FNV-1a over the canonical emitted form.
std::string config_hash(const MineConfig& config);

}  // namespace minesim
