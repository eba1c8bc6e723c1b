#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "minesim/config.hpp"
#include "minesim/ids.hpp"
#include "minesim/random_events.hpp"

namespace minesim {

enum class TruckState : std::uint8_t {
  AtCharging,
  EmptyRun,
  WaitingForLoading,
  Loading,
  FullRun,
  WaitingForUnloading,
  Unloading,
  UnderRepair,
  Broken,
};

inline constexpr std::array kAllTruckStates = {
    TruckState::AtCharging,         TruckState::EmptyRun,  TruckState::WaitingForLoading,
    TruckState::Loading,            TruckState::FullRun,   TruckState::WaitingForUnloading,
    TruckState::Unloading,          TruckState::UnderRepair, TruckState::Broken,
};

std::string_view to_string(TruckState state);
std::optional<TruckState> truck_state_from_string(std::string_view name);
bool is_waiting(TruckState state);

enum class Trigger : std::uint8_t {
  InitOrder,          // AtCharging -> EmptyRun
  ArriveAtLoadSite,   // EmptyRun -> WaitingForLoading
  LoadingStart,       // WaitingForLoading -> Loading
  LoadingComplete,    // Loading -> FullRun
  ArriveAtDumpSite,   // FullRun -> WaitingForUnloading
  UnloadingStart,     // WaitingForUnloading -> Unloading
  UnloadingComplete,  // Unloading -> EmptyRun
  ShovelLost,         // Loading -> WaitingForLoading (shovel broke mid-load)
  Reroute,            // WaitingForLoading -> EmptyRun (site lost every shovel)
  RepairStart,        // moving or queued -> UnderRepair
  RepairComplete,     // UnderRepair -> state held before the repair
  Breakdown,          // moving, queued or under repair -> Broken
};

inline constexpr std::array kAllTriggers = {
    Trigger::InitOrder,       Trigger::ArriveAtLoadSite, Trigger::LoadingStart,
    Trigger::LoadingComplete, Trigger::ArriveAtDumpSite, Trigger::UnloadingStart,
    Trigger::UnloadingComplete, Trigger::ShovelLost,     Trigger::Reroute,
    Trigger::RepairStart,     Trigger::RepairComplete,   Trigger::Breakdown,
};

std::string_view to_string(Trigger trigger);

// Successor state, or nullopt when the trigger is illegal in `from`.
// `resume` is only consulted for RepairComplete.
std::optional<TruckState> next_state(TruckState from, Trigger trigger,
                                     TruckState resume = TruckState::EmptyRun);

enum class Availability : std::uint8_t { Up, UnderRepair, Broken };
enum class RoadStatus : std::uint8_t { Up, UnderMaintenance };

std::string_view to_string(Availability status);
std::string_view to_string(RoadStatus status);

struct Journey {
  std::optional<RoadId> road;  // absent for off-network moves
  SiteRef origin{};
  std::optional<SiteRef> destination;  // absent for a broken truck heading home
  Vec2 from{};
  Vec2 to{};
  double departure{0.0};
  double arrival{0.0};
};

// (now - departure) / (arrival - departure), clamped to [0,1].
double completion_rate(const Journey& journey, double now);
Vec2 position_at(const Journey& journey, double now);

struct Truck {
  TruckId id{};
  std::string type;
  std::size_t fleet{0};
  double capacity{0.0};
  double speed{0.0};
  events::HazardParams hazard{};

  TruckState state{TruckState::AtCharging};
  TruckState resume_state{TruckState::AtCharging};
  std::optional<Journey> journey;
  std::optional<SiteRef> current_site{SiteRef::charging()};
  std::optional<ShovelId> shovel;
  std::optional<SpotId> spot;
  double payload{0.0};
  double jam_from{0.0};
  double jam_to{0.0};
  std::uint64_t epoch{0};  // invalidates stale arrival events
};

struct Shovel {
  ShovelId id{};
  LoadSiteId site{};
  std::string type;
  double bucket_size{0.0};
  double cycle_time{0.0};
  events::HazardParams hazard{};

  Availability status{Availability::Up};
  std::deque<TruckId> queue;  // front is the truck being loaded when busy
  bool busy{false};
  double service_end{0.0};
  std::uint64_t epoch{0};

  // ceil(capacity / bucket) buckets, each taking cycle_time.
  double loading_time(double capacity) const;
};

struct DumpSpot {
  SpotId id{};
  DumpSiteId site{};
  double unload_time{0.0};
  std::deque<TruckId> queue;
  bool busy{false};
};

struct ChargingSite {
  std::string name;
  Vec2 position{};
};

struct LoadSite {
  LoadSiteId id{};
  std::string name;
  Vec2 position{};
  std::vector<ShovelId> shovels;
  std::deque<TruckId> parking_queue;  // trucks not yet assigned a shovel
  int parking_capacity{0};
  double tons_loaded{0.0};
};

struct DumpSite {
  DumpSiteId id{};
  std::string name;
  Vec2 position{};
  std::vector<SpotId> spots;
  std::deque<TruckId> parking_queue;
  double total_tons_received{0.0};
};

struct Road {
  RoadId id{};
  SiteRef a{};
  SiteRef b{};
  double distance{0.0};
  RoadStatus status{RoadStatus::Up};
  double maintenance_end{0.0};
  double penalty_fraction{0.0};
  std::vector<TruckId> trucks_on_road;  // in order of entry
  std::uint64_t jam_count{0};
  std::uint64_t completed_trips{0};
};

// Min-queue on (time, sequence); equal timestamps pop in insertion order.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    double time;
    std::uint64_t sequence;
    Payload payload;
  };

  std::uint64_t push(double time, Payload payload) {
    const auto seq = next_sequence_++;
    heap_.push(Entry{time, seq, std::move(payload)});
    return seq;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Entry& top() const { return heap_.top(); }

  Entry pop() {
    Entry e = heap_.top();
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Entry& lhs, const Entry& rhs) const {
      if (lhs.time != rhs.time) return lhs.time > rhs.time;
      return lhs.sequence > rhs.sequence;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_sequence_{0};
};

// Static network built from a MineConfig: entities in their initial state,
// plus the bipartite road set (charging<->load, load<->dump).
struct Network {
  ChargingSite charging;
  std::vector<Truck> trucks;
  std::vector<Shovel> shovels;
  std::vector<DumpSpot> spots;
  std::vector<LoadSite> load_sites;
  std::vector<DumpSite> dump_sites;
  std::vector<Road> roads;

  Vec2 position_of(SiteRef site) const;
  std::optional<RoadId> road_between(SiteRef x, SiteRef y) const;
  // Road distance when connected, straight-line distance otherwise.
  double distance_between(SiteRef x, SiteRef y) const;

  static Network build(const MineConfig& config);

 private:
  std::vector<RoadId> charging_roads_;            // [load]
  std::vector<std::vector<RoadId>> haul_roads_;   // [load][dump]
};

// distance / speed; throws std::invalid_argument for non-positive inputs.
double travel_time(double distance, double speed);
double travel_time(const Truck& truck, const Road& road);

}  // namespace minesim
