#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "minesim/world.hpp"

namespace minesim {

enum class RecordKind : std::uint8_t {
  StateChange,
  DispatchRequest,
  DispatchOrder,
  PolicyFault,
  DispatchIdle,
  Depart,
  Arrive,
  LoadStart,
  LoadComplete,
  UnloadStart,
  UnloadComplete,
  Jam,
  MaintenancePenalty,
  RoadMaintenance,
  RoadMaintenanceEnd,
  TruckRepair,
  TruckRepairEnd,
  TruckBreakdown,
  ShovelRepair,
  ShovelRepairEnd,
  ShovelBreakdown,
  FaultIgnored,
};

enum class OrderKind : std::uint8_t { None, Init, Haul, Back, Shovel, Spot, Reroute };

enum class SubjectKind : std::uint8_t { Truck, Shovel, Spot, Road, LoadSite, DumpSite };

std::string_view to_string(RecordKind kind);
std::string_view to_string(OrderKind kind);
std::string_view to_string(SubjectKind kind);

// One line of the event pool. Payload fields are interpreted per kind:
//   StateChange:      from -> to
//   DispatchRequest:  order
//   DispatchOrder:    order, target (site/shovel/spot index)
//   Depart:           target = road (-1 off-network), amount = travel minutes,
//                     duration = scheduled arrival time
//   LoadComplete:     target = shovel, amount = tons
//   UnloadComplete:   target = dump site, amount = tons
//   Jam:              target = road, amount = delay, duration = jam duration,
//                     position = jam position
//   MaintenancePenalty: target = road, amount = extra minutes, position = fraction
//   *Repair:          duration = repair minutes
//   TruckBreakdown:   amount = payload lost
struct EventRecord {
  double time{0.0};
  std::uint64_t sequence{0};
  RecordKind kind{RecordKind::StateChange};
  SubjectKind subject_kind{SubjectKind::Truck};
  std::uint32_t subject{0};
  OrderKind order{OrderKind::None};
  std::int64_t target{-1};
  double amount{0.0};
  double duration{0.0};
  double position{0.0};
  TruckState from{TruckState::AtCharging};
  TruckState to{TruckState::AtCharging};

  bool operator==(const EventRecord&) const = default;
};

// Append-only, totally ordered by (time, sequence).
class EventPool {
 public:
  // Stamps the next sequence number; time must not go backwards.
  const EventRecord& append(EventRecord record);

  std::span<const EventRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const EventPool&) const = default;

 private:
  std::vector<EventRecord> records_;
};

nlohmann::json to_json(const EventRecord& record);
EventRecord event_record_from_json(const nlohmann::json& j);

void write_event_pool(std::ostream& out, const EventPool& pool);
// Throws std::runtime_error naming the offending line on malformed input.
EventPool read_event_pool(std::istream& in);

}  // namespace minesim
