#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minesim/world.hpp"

namespace minesim::ticklog {

inline constexpr const char* kTickSchema = "minesim.ticks/1";

struct TruckTick {
  std::uint32_t id{};
  Vec2 position{};
  TruckState state{TruckState::AtCharging};
  std::optional<SiteRef> target;

  bool operator==(const TruckTick&) const = default;
};

struct ShovelTick {
  std::uint32_t id{};
  Availability status{Availability::Up};
  std::uint32_t queue{0};

  bool operator==(const ShovelTick&) const = default;
};

struct LoadSiteTick {
  std::uint32_t id{};
  std::uint32_t parking{0};
  double tons_loaded{0.0};
  std::vector<ShovelTick> shovels;

  bool operator==(const LoadSiteTick&) const = default;
};

struct SpotTick {
  std::uint32_t id{};
  std::uint32_t queue{0};

  bool operator==(const SpotTick&) const = default;
};

struct DumpSiteTick {
  std::uint32_t id{};
  std::uint32_t parking{0};
  double tons{0.0};
  std::vector<SpotTick> spots;

  bool operator==(const DumpSiteTick&) const = default;
};

struct RoadTick {
  std::uint32_t id{};
  RoadStatus status{RoadStatus::Up};
  std::uint32_t occupancy{0};
  std::uint64_t jam_count{0};
  bool jammed{false};  // some truck on the road is currently held by a jam

  bool operator==(const RoadTick&) const = default;
};

struct TickRecord {
  double time{0.0};
  std::vector<TruckTick> trucks;
  std::vector<LoadSiteTick> load_sites;
  std::vector<DumpSiteTick> dump_sites;
  std::vector<RoadTick> roads;

  bool operator==(const TickRecord&) const = default;
};

struct TickHeader {
  std::string schema{kTickSchema};
  std::string config_hash;
  std::string policy;
  std::uint64_t seed{0};
  double duration{0.0};
  int tick_interval{1};

  bool operator==(const TickHeader&) const = default;
};

struct TickArchive {
  TickHeader header;
  std::vector<TickRecord> records;

  bool operator==(const TickArchive&) const = default;
};

// Snapshot of the network at `now`; moving trucks are placed by linear
// interpolation along their journey.
TickRecord emit_tick(const Network& network, double now);

nlohmann::json to_json(const TickRecord& record);
nlohmann::json to_json(const TickHeader& header);
TickRecord tick_from_json(const nlohmann::json& j);

void write_archive(std::ostream& out, const TickArchive& archive);
void write_archive(const std::filesystem::path& path, const TickArchive& archive);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(const std::string& what, std::optional<double> at_time);
  std::optional<double> time() const { return time_; }

 private:
  std::optional<double> time_;
};

// Streams records in order, checking schema, monotonicity and that no tick is
// missing. Errors name the tick time at which the archive breaks.
class TickReader {
 public:
  explicit TickReader(std::istream& in);

  const TickHeader& header() const { return header_; }
  std::optional<TickRecord> next();

 private:
  std::istream& in_;
  TickHeader header_;
  std::size_t line_{0};
  std::size_t index_{0};
  std::optional<double> last_time_;
};

// Reads the whole archive and verifies it covers [0, duration].
TickArchive replay(std::istream& in);
TickArchive replay(const std::filesystem::path& path);

}  // namespace minesim::ticklog
