#include "minesim/event_pool.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace minesim {

using nlohmann::json;

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::StateChange: return "StateChange";
    case RecordKind::DispatchRequest: return "DispatchRequest";
    case RecordKind::DispatchOrder: return "DispatchOrder";
    case RecordKind::PolicyFault: return "PolicyFault";
    case RecordKind::DispatchIdle: return "DispatchIdle";
    case RecordKind::Depart: return "Depart";
    case RecordKind::Arrive: return "Arrive";
    case RecordKind::LoadStart: return "LoadStart";
    case RecordKind::LoadComplete: return "LoadComplete";
    case RecordKind::UnloadStart: return "UnloadStart";
    case RecordKind::UnloadComplete: return "UnloadComplete";
    case RecordKind::Jam: return "Jam";
    case RecordKind::MaintenancePenalty: return "MaintenancePenalty";
    case RecordKind::RoadMaintenance: return "RoadMaintenance";
    case RecordKind::RoadMaintenanceEnd: return "RoadMaintenanceEnd";
    case RecordKind::TruckRepair: return "TruckRepair";
    case RecordKind::TruckRepairEnd: return "TruckRepairEnd";
    case RecordKind::TruckBreakdown: return "TruckBreakdown";
    case RecordKind::ShovelRepair: return "ShovelRepair";
    case RecordKind::ShovelRepairEnd: return "ShovelRepairEnd";
    case RecordKind::ShovelBreakdown: return "ShovelBreakdown";
    case RecordKind::FaultIgnored: return "FaultIgnored";
  }
  return "?";
}

std::string_view to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::None: return "None";
    case OrderKind::Init: return "Init";
    case OrderKind::Haul: return "Haul";
    case OrderKind::Back: return "Back";
    case OrderKind::Shovel: return "Shovel";
    case OrderKind::Spot: return "Spot";
    case OrderKind::Reroute: return "Reroute";
  }
  return "?";
}

std::string_view to_string(SubjectKind kind) {
  switch (kind) {
    case SubjectKind::Truck: return "truck";
    case SubjectKind::Shovel: return "shovel";
    case SubjectKind::Spot: return "spot";
    case SubjectKind::Road: return "road";
    case SubjectKind::LoadSite: return "load_site";
    case SubjectKind::DumpSite: return "dump_site";
  }
  return "?";
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const Enum (&all)[N], std::string_view what) {
  for (auto e : all) {
    if (to_string(e) == text) return e;
  }
  throw std::runtime_error(fmt::format("unknown {} '{}'", what, text));
}

constexpr RecordKind kRecordKinds[] = {
    RecordKind::StateChange,     RecordKind::DispatchRequest,  RecordKind::DispatchOrder,
    RecordKind::PolicyFault,     RecordKind::DispatchIdle,     RecordKind::Depart,
    RecordKind::Arrive,          RecordKind::LoadStart,        RecordKind::LoadComplete,
    RecordKind::UnloadStart,     RecordKind::UnloadComplete,   RecordKind::Jam,
    RecordKind::MaintenancePenalty, RecordKind::RoadMaintenance, RecordKind::RoadMaintenanceEnd,
    RecordKind::TruckRepair,     RecordKind::TruckRepairEnd,   RecordKind::TruckBreakdown,
    RecordKind::ShovelRepair,    RecordKind::ShovelRepairEnd,  RecordKind::ShovelBreakdown,
    RecordKind::FaultIgnored,
};
constexpr OrderKind kOrderKinds[] = {OrderKind::None,  OrderKind::Init,   OrderKind::Haul,
                                     OrderKind::Back,  OrderKind::Shovel, OrderKind::Spot,
                                     OrderKind::Reroute};
constexpr SubjectKind kSubjectKinds[] = {SubjectKind::Truck,    SubjectKind::Shovel,
                                         SubjectKind::Spot,     SubjectKind::Road,
                                         SubjectKind::LoadSite, SubjectKind::DumpSite};

}  // namespace

const EventRecord& EventPool::append(EventRecord record) {
  if (!records_.empty() && record.time < records_.back().time) {
    throw std::logic_error(fmt::format("event pool time went backwards: {} after {}", record.time,
                                       records_.back().time));
  }
  record.sequence = records_.size();
  records_.push_back(record);
  return records_.back();
}

// Only fields that differ from their defaults are written; the reader
// restores the defaults, so the round trip is exact.
json to_json(const EventRecord& r) {
  json j = {{"t", r.time},
            {"seq", r.sequence},
            {"kind", to_string(r.kind)},
            {"subject", {to_string(r.subject_kind), r.subject}}};
  if (r.order != OrderKind::None) j["order"] = to_string(r.order);
  if (r.target != -1) j["target"] = r.target;
  if (r.amount != 0.0) j["amount"] = r.amount;
  if (r.duration != 0.0) j["duration"] = r.duration;
  if (r.position != 0.0) j["position"] = r.position;
  if (r.kind == RecordKind::StateChange) {
    j["from"] = to_string(r.from);
    j["to"] = to_string(r.to);
  }
  return j;
}

EventRecord event_record_from_json(const json& j) {
  EventRecord r;
  r.time = j.at("t").get<double>();
  r.sequence = j.at("seq").get<std::uint64_t>();
  r.kind = parse_enum(j.at("kind").get<std::string>(), kRecordKinds, "record kind");
  const auto& subject = j.at("subject");
  r.subject_kind = parse_enum(subject.at(0).get<std::string>(), kSubjectKinds, "subject kind");
  r.subject = subject.at(1).get<std::uint32_t>();
  if (auto it = j.find("order"); it != j.end()) {
    r.order = parse_enum(it->get<std::string>(), kOrderKinds, "order kind");
  }
  if (auto it = j.find("target"); it != j.end()) r.target = it->get<std::int64_t>();
  if (auto it = j.find("amount"); it != j.end()) r.amount = it->get<double>();
  if (auto it = j.find("duration"); it != j.end()) r.duration = it->get<double>();
  if (auto it = j.find("position"); it != j.end()) r.position = it->get<double>();
  if (r.kind == RecordKind::StateChange) {
    auto from = truck_state_from_string(j.at("from").get<std::string>());
    auto to = truck_state_from_string(j.at("to").get<std::string>());
    if (!from || !to) throw std::runtime_error("unknown truck state in state change");
    r.from = *from;
    r.to = *to;
  }
  return r;
}

void write_event_pool(std::ostream& out, const EventPool& pool) {
  for (const auto& r : pool.records()) out << to_json(r).dump() << '\n';
}

EventPool read_event_pool(std::istream& in) {
  EventPool pool;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    EventRecord r;
    try {
      r = event_record_from_json(json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("events line {}: {}", line_no, e.what()));
    }
    if (r.sequence != pool.size()) {
      throw std::runtime_error(fmt::format("events line {}: expected sequence {}, found {}",
                                           line_no, pool.size(), r.sequence));
    }
    pool.append(r);
  }
  return pool;
}

}  // namespace minesim
