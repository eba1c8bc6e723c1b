#include "minesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minesim {

std::string_view to_string(TruckState state) {
  switch (state) {
    case TruckState::AtCharging: return "AtCharging";
    case TruckState::EmptyRun: return "EmptyRun";
    case TruckState::WaitingForLoading: return "WaitingForLoading";
    case TruckState::Loading: return "Loading";
    case TruckState::FullRun: return "FullRun";
    case TruckState::WaitingForUnloading: return "WaitingForUnloading";
    case TruckState::Unloading: return "Unloading";
    case TruckState::UnderRepair: return "UnderRepair";
    case TruckState::Broken: return "Broken";
  }
  return "?";
}

std::optional<TruckState> truck_state_from_string(std::string_view name) {
  for (auto s : kAllTruckStates) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

bool is_waiting(TruckState state) {
  return state == TruckState::WaitingForLoading || state == TruckState::WaitingForUnloading;
}

std::string_view to_string(Trigger trigger) {
  switch (trigger) {
    case Trigger::InitOrder: return "InitOrder";
    case Trigger::ArriveAtLoadSite: return "ArriveAtLoadSite";
    case Trigger::LoadingStart: return "LoadingStart";
    case Trigger::LoadingComplete: return "LoadingComplete";
    case Trigger::ArriveAtDumpSite: return "ArriveAtDumpSite";
    case Trigger::UnloadingStart: return "UnloadingStart";
    case Trigger::UnloadingComplete: return "UnloadingComplete";
    case Trigger::ShovelLost: return "ShovelLost";
    case Trigger::Reroute: return "Reroute";
    case Trigger::RepairStart: return "RepairStart";
    case Trigger::RepairComplete: return "RepairComplete";
    case Trigger::Breakdown: return "Breakdown";
  }
  return "?";
}

namespace {

// States in which a truck can be hit by a repair or breakdown.
bool faultable(TruckState s) {
  return s == TruckState::EmptyRun || s == TruckState::FullRun ||
         s == TruckState::WaitingForLoading || s == TruckState::WaitingForUnloading;
}

}  // namespace

std::optional<TruckState> next_state(TruckState from, Trigger trigger, TruckState resume) {
  using S = TruckState;
  switch (trigger) {
    case Trigger::InitOrder:
      if (from == S::AtCharging) return S::EmptyRun;
      break;
    case Trigger::ArriveAtLoadSite:
      if (from == S::EmptyRun) return S::WaitingForLoading;
      break;
    case Trigger::LoadingStart:
      if (from == S::WaitingForLoading) return S::Loading;
      break;
    case Trigger::LoadingComplete:
      if (from == S::Loading) return S::FullRun;
      break;
    case Trigger::ArriveAtDumpSite:
      if (from == S::FullRun) return S::WaitingForUnloading;
      break;
    case Trigger::UnloadingStart:
      if (from == S::WaitingForUnloading) return S::Unloading;
      break;
    case Trigger::UnloadingComplete:
      if (from == S::Unloading) return S::EmptyRun;
      break;
    case Trigger::ShovelLost:
      if (from == S::Loading) return S::WaitingForLoading;
      break;
    case Trigger::Reroute:
      if (from == S::WaitingForLoading) return S::EmptyRun;
      break;
    case Trigger::RepairStart:
      if (faultable(from)) return S::UnderRepair;
      break;
    case Trigger::RepairComplete:
      if (from == S::UnderRepair && faultable(resume)) return resume;
      break;
    case Trigger::Breakdown:
      if (faultable(from)) return S::Broken;
      break;
  }
  return std::nullopt;
}

std::string_view to_string(Availability status) {
  switch (status) {
    case Availability::Up: return "Up";
    case Availability::UnderRepair: return "UnderRepair";
    case Availability::Broken: return "Broken";
  }
  return "?";
}

std::string_view to_string(RoadStatus status) {
  return status == RoadStatus::Up ? "Up" : "UnderMaintenance";
}

double completion_rate(const Journey& journey, double now) {
  const double span = journey.arrival - journey.departure;
  if (!(span > 0.0)) return now >= journey.arrival ? 1.0 : 0.0;
  return std::clamp((now - journey.departure) / span, 0.0, 1.0);
}

Vec2 position_at(const Journey& journey, double now) {
  return lerp(journey.from, journey.to, completion_rate(journey, now));
}

double Shovel::loading_time(double capacity) const {
  // The epsilon keeps 3.0 / 0.1 = 30.000000000000004 at 30 buckets.
  const double buckets = std::ceil(capacity / bucket_size - 1e-9);
  return std::max(1.0, buckets) * cycle_time;
}

double travel_time(double distance, double speed) {
  if (!(distance > 0.0)) throw std::invalid_argument("travel distance must be > 0");
  if (!(speed > 0.0)) throw std::invalid_argument("truck speed must be > 0");
  return distance / speed;
}

double travel_time(const Truck& truck, const Road& road) {
  return travel_time(road.distance, truck.speed);
}

Vec2 Network::position_of(SiteRef site) const {
  switch (site.kind) {
    case SiteKind::Charging: return charging.position;
    case SiteKind::Load: return load_sites.at(site.index).position;
    case SiteKind::Dump: return dump_sites.at(site.index).position;
  }
  return {};
}

std::optional<RoadId> Network::road_between(SiteRef x, SiteRef y) const {
  if (x.kind > y.kind) std::swap(x, y);
  if (x.kind == SiteKind::Charging && y.kind == SiteKind::Load) {
    return charging_roads_.at(y.index);
  }
  if (x.kind == SiteKind::Load && y.kind == SiteKind::Dump) {
    return haul_roads_.at(x.index).at(y.index);
  }
  return std::nullopt;
}

double Network::distance_between(SiteRef x, SiteRef y) const {
  if (x == y) return 0.0;
  if (auto road = road_between(x, y)) return roads[road->index()].distance;
  return distance(position_of(x), position_of(y));
}

Network Network::build(const MineConfig& config) {
  Network net;
  net.charging = {config.charging.name, config.charging.position};

  for (std::size_t f = 0; f < config.charging.fleets.size(); ++f) {
    const auto& fleet = config.charging.fleets[f];
    for (int k = 0; k < fleet.count; ++k) {
      Truck t;
      t.id = TruckId(net.trucks.size());
      t.type = fleet.type;
      t.fleet = f;
      t.capacity = fleet.capacity;
      t.speed = fleet.speed;
      t.hazard = fleet.hazard;
      net.trucks.push_back(std::move(t));
    }
  }

  for (std::size_t i = 0; i < config.load_sites.size(); ++i) {
    const auto& sc = config.load_sites[i];
    LoadSite site;
    site.id = LoadSiteId(i);
    site.name = sc.name;
    site.position = sc.position;
    site.parking_capacity = sc.parking_capacity;
    for (const auto& shovel_cfg : sc.shovels) {
      for (int k = 0; k < shovel_cfg.count; ++k) {
        Shovel s;
        s.id = ShovelId(net.shovels.size());
        s.site = site.id;
        s.type = shovel_cfg.type;
        s.bucket_size = shovel_cfg.bucket_size;
        s.cycle_time = shovel_cfg.cycle_time;
        s.hazard = shovel_cfg.hazard;
        site.shovels.push_back(s.id);
        net.shovels.push_back(std::move(s));
      }
    }
    net.load_sites.push_back(std::move(site));
  }

  for (std::size_t i = 0; i < config.dump_sites.size(); ++i) {
    const auto& sc = config.dump_sites[i];
    DumpSite site;
    site.id = DumpSiteId(i);
    site.name = sc.name;
    site.position = sc.position;
    for (const auto& spot_cfg : sc.spots) {
      for (int k = 0; k < spot_cfg.count; ++k) {
        DumpSpot s;
        s.id = SpotId(net.spots.size());
        s.site = site.id;
        s.unload_time = spot_cfg.unload_time;
        site.spots.push_back(s.id);
        net.spots.push_back(std::move(s));
      }
    }
    net.dump_sites.push_back(std::move(site));
  }

  for (std::size_t i = 0; i < net.load_sites.size(); ++i) {
    Road r;
    r.id = RoadId(net.roads.size());
    r.a = SiteRef::charging();
    r.b = SiteRef::load(LoadSiteId(i));
    r.distance = config.roads.charging_to_load
                     ? (*config.roads.charging_to_load)[i]
                     : distance(net.charging.position, net.load_sites[i].position);
    net.charging_roads_.push_back(r.id);
    net.roads.push_back(std::move(r));
  }
  net.haul_roads_.resize(net.load_sites.size());
  for (std::size_t i = 0; i < net.load_sites.size(); ++i) {
    for (std::size_t k = 0; k < net.dump_sites.size(); ++k) {
      Road r;
      r.id = RoadId(net.roads.size());
      r.a = SiteRef::load(LoadSiteId(i));
      r.b = SiteRef::dump(DumpSiteId(k));
      r.distance = config.roads.load_to_dump
                       ? (*config.roads.load_to_dump)[i][k]
                       : distance(net.load_sites[i].position, net.dump_sites[k].position);
      net.haul_roads_[i].push_back(r.id);
      net.roads.push_back(std::move(r));
    }
  }
  return net;
}

}  // namespace minesim
