#include "minesim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace minesim {

PolicyError::PolicyError(const std::string& what, kpi::DecisionLog decisions)
    : std::runtime_error(what), decisions_(std::move(decisions)) {}

namespace {

enum class EvKind : std::uint8_t {
  Arrive,
  LoadDone,
  UnloadDone,
  TruckRepairEnd,
  ShovelRepairEnd,
  RoadMaintenanceEnd,
  Retry,
};

struct Ev {
  EvKind kind{EvKind::Arrive};
  std::uint32_t subject{0};
  std::uint64_t epoch{0};
  OrderKind order{OrderKind::None};
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void remove_from(std::deque<TruckId>& q, TruckId id) {
  q.erase(std::remove(q.begin(), q.end(), id), q.end());
}

void remove_from(std::vector<TruckId>& v, TruckId id) {
  v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

}  // namespace

class Simulation::Impl {
 public:
  Impl(const MineConfig& config, dispatch::DispatchPolicy& policy, std::uint64_t seed,
       double duration, RunOptions options)
      : config_(config),
        policy_(policy),
        seed_(seed),
        duration_(duration),
        options_(std::move(options)),
        net_(Network::build(config)) {
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    last_minute_ = static_cast<long>(std::floor(duration));
    tick_interval_ = std::max(1, config.simulation.tick_interval);
    for (const auto& t : net_.trucks) {
      truck_rngs_.push_back(derive_stream(seed, StreamClass::TruckHazard, t.id.value));
    }
    for (const auto& s : net_.shovels) {
      shovel_rngs_.push_back(derive_stream(seed, StreamClass::ShovelHazard, s.id.value));
    }
    for (const auto& r : net_.roads) {
      road_rngs_.push_back(derive_stream(seed, StreamClass::RoadHazard, r.id.value));
      jam_rngs_.push_back(derive_stream(seed, StreamClass::RoadJam, r.id.value));
    }
  }

  // --- driver ---------------------------------------------------------------

  void start() {
    if (started_) return;
    started_ = true;
    if (options_.logger) {
      options_.logger->info("run start: policy={} seed={} duration={} trucks={} shovels={}",
                            policy_.name(), seed_, duration_, net_.trucks.size(),
                            net_.shovels.size());
    }
    dispatch::PolicyContext ctx{&config_, &net_,
                                derive_stream(seed_, StreamClass::Policy)()};
    const auto t0 = Clock::now();
    try {
      policy_.initialize(ctx);
    } catch (const std::exception& e) {
      decisions_.init_durations.push_back(seconds_since(t0));
      abort_policy(e);
    }
    decisions_.init_durations.push_back(seconds_since(t0));
    for (auto& t : net_.trucks) request_order(t, OrderKind::Init);
  }

  void advance_to(double t) {
    start();
    const long until = std::min(last_minute_, static_cast<long>(std::floor(t)));
    while (next_minute_ <= until) {
      const long m = next_minute_;
      drain(static_cast<double>(m));
      if (static_cast<double>(m) < duration_) {
        clock_ = static_cast<double>(m);
        sample_hazards();
        drain(static_cast<double>(m));
      }
      clock_ = static_cast<double>(m);
      if (options_.record_ticks && m % tick_interval_ == 0) {
        ticks_.records.push_back(ticklog::emit_tick(net_, clock_));
      }
      ++next_minute_;
    }
    // Events between the last whole minute and a fractional horizon.
    if (t >= duration_ && duration_ > static_cast<double>(last_minute_)) {
      drain(duration_);
      clock_ = duration_;
    }
  }

  SimResult finish() {
    advance_to(duration_);
    SimResult out;
    out.policy = std::string(policy_.name());
    out.seed = seed_;
    out.duration = duration_;
    for (const auto& t : net_.trucks) {
      if (t.state != TruckState::Broken) mass_.in_transit += t.payload;
    }
    out.mass = mass_;
    out.policy_faults = policy_faults_;
    out.kpis = kpi::summarize(config_, pool_, duration_, &decisions_);
    out.ticks.header.config_hash = config_hash(config_);
    out.ticks.header.policy = out.policy;
    out.ticks.header.seed = seed_;
    out.ticks.header.duration = duration_;
    out.ticks.header.tick_interval = tick_interval_;
    out.ticks.records = std::move(ticks_.records);
    out.decisions = decisions_;
    out.events = std::move(pool_);
    if (options_.logger) {
      options_.logger->info("run end: produced={:.2f} t wait={:.1f} min jams={} faults={}",
                            out.kpis.produced_tons, out.kpis.total_wait_time,
                            out.kpis.road_jams, out.policy_faults);
      options_.logger->flush();
    }
    return out;
  }

  // --- public mutations -----------------------------------------------------

  std::size_t enqueue_at_shovel(TruckId tid, ShovelId sid) {
    auto& shovel = net_.shovels.at(sid.index());
    auto& truck = net_.trucks.at(tid.index());
    if (shovel.status == Availability::Broken) {
      throw std::invalid_argument(fmt::format("shovel {} is broken", sid.value));
    }
    remove_from(net_.load_sites[shovel.site.index()].parking_queue, tid);
    truck.shovel = sid;
    shovel.queue.push_back(tid);
    const std::size_t position = shovel.queue.size() - 1;
    if (!shovel.busy && shovel.status == Availability::Up) start_loading(shovel);
    return position;
  }

  void apply_fault(const events::RandomEvent& ev) {
    using events::EventKind;
    switch (ev.kind) {
      case EventKind::Jam:
        break;
      case EventKind::TruckRepair:
      case EventKind::TruckBreakdown: {
        auto& truck = net_.trucks.at(ev.subject.id);
        const bool moving = truck.journey.has_value() && (truck.state == TruckState::EmptyRun ||
                                                          truck.state == TruckState::FullRun);
        if (!moving) return ignore(SubjectKind::Truck, ev.subject.id);
        if (ev.kind == EventKind::TruckRepair) {
          truck_repair(truck, ev.duration.value_or(0.0));
        } else {
          truck_breakdown(truck);
        }
        break;
      }
      case EventKind::ShovelRepair:
      case EventKind::ShovelBreakdown: {
        auto& shovel = net_.shovels.at(ev.subject.id);
        if (shovel.status != Availability::Up) return ignore(SubjectKind::Shovel, ev.subject.id);
        if (ev.kind == EventKind::ShovelRepair) {
          shovel_repair(shovel, ev.duration.value_or(0.0));
        } else {
          shovel_breakdown(shovel);
        }
        break;
      }
      case EventKind::RoadMaintenance: {
        auto& road = net_.roads.at(ev.subject.id);
        if (road.status != RoadStatus::Up) return ignore(SubjectKind::Road, ev.subject.id);
        road_maintenance(road, ev.duration.value_or(0.0), ev.penalty_fraction);
        break;
      }
    }
    notify(ev);
  }

  TruckState transition(Truck& truck, Trigger trigger) {
    const auto next = next_state(truck.state, trigger, truck.resume_state);
    if (!next) {
      throw std::logic_error(fmt::format("truck {}: illegal trigger {} in state {} at t={}",
                                         truck.id.value, to_string(trigger),
                                         to_string(truck.state), clock_));
    }
    EventRecord r;
    r.kind = RecordKind::StateChange;
    r.subject = truck.id.value;
    r.from = truck.state;
    r.to = *next;
    record(r);
    truck.state = *next;
    return *next;
  }

  double now() const { return clock_; }
  const Network& network() const { return net_; }
  const EventPool& events() const { return pool_; }
  const kpi::DecisionLog& decisions() const { return decisions_; }
  Network& mutable_network() { return net_; }

 private:
  // --- bookkeeping ----------------------------------------------------------

  void record(EventRecord r) {
    r.time = clock_;
    const auto& stored = pool_.append(r);
    if (options_.logger && options_.logger->should_log(spdlog::level::debug)) {
      options_.logger->debug("{}", to_json(stored).dump());
    }
  }

  void record_truck(RecordKind kind, const Truck& truck, std::int64_t target = -1,
                    double amount = 0.0, double duration = 0.0) {
    EventRecord r;
    r.kind = kind;
    r.subject = truck.id.value;
    r.target = target;
    r.amount = amount;
    r.duration = duration;
    record(r);
  }

  void ignore(SubjectKind kind, std::uint32_t id) {
    EventRecord r;
    r.kind = RecordKind::FaultIgnored;
    r.subject_kind = kind;
    r.subject = id;
    record(r);
  }

  void notify(const events::RandomEvent& ev) {
    try {
      policy_.on_event(ev);
    } catch (const std::exception& e) {
      abort_policy(e);
    }
  }

  [[noreturn]] void abort_policy(const std::exception& e) {
    if (options_.logger) {
      options_.logger->error("policy {} threw at t={}: {}", policy_.name(), clock_, e.what());
      options_.logger->flush();
    }
    throw PolicyError(fmt::format("policy {} threw at t={}: {}", policy_.name(), clock_, e.what()),
                      decisions_);
  }

  template <typename F>
  auto timed(F&& call) {
    const auto t0 = Clock::now();
    try {
      auto result = call();
      decisions_.order_durations.push_back(seconds_since(t0));
      return result;
    } catch (const std::exception& e) {
      decisions_.order_durations.push_back(seconds_since(t0));
      abort_policy(e);
    }
  }

  void drain(double until) {
    while (!queue_.empty() && queue_.top().time <= until) {
      auto e = queue_.pop();
      clock_ = std::max(clock_, e.time);
      handle(e.payload);
    }
  }

  void schedule(double time, Ev ev) { queue_.push(time, ev); }

  // --- snapshot -------------------------------------------------------------

  double load_minutes(const Shovel& s, TruckId t) const {
    return s.loading_time(net_.trucks[t.index()].capacity);
  }

  dispatch::MineSnapshot snapshot(const Truck& requester) const {
    dispatch::MineSnapshot s;
    s.clock = clock_;
    s.truck.id = requester.id;
    s.truck.type = requester.type;
    s.truck.fleet = requester.fleet;
    s.truck.capacity = requester.capacity;
    s.truck.speed = requester.speed;
    s.truck.location = requester.current_site;

    auto distance_to = [&](SiteRef site) {
      if (requester.current_site) return net_.distance_between(*requester.current_site, site);
      const Vec2 here = requester.journey ? position_at(*requester.journey, clock_)
                                          : net_.charging.position;
      return distance(here, net_.position_of(site));
    };

    s.load_sites.reserve(net_.load_sites.size());
    for (const auto& site : net_.load_sites) {
      dispatch::LoadSiteView v;
      v.id = site.id;
      v.name = site.name;
      v.position = site.position;
      v.parking_capacity = site.parking_capacity;
      v.parking_queue = site.parking_queue.size();
      v.queue_length = site.parking_queue.size();
      for (TruckId t : site.parking_queue) {
        v.queued_capacities.push_back(net_.trucks[t.index()].capacity);
      }
      for (ShovelId sid : site.shovels) {
        const auto& sh = net_.shovels[sid.index()];
        dispatch::ShovelView sv;
        sv.id = sh.id;
        sv.type = sh.type;
        sv.bucket_size = sh.bucket_size;
        sv.cycle_time = sh.cycle_time;
        sv.status = sh.status;
        sv.queue_length = sh.queue.size();
        for (TruckId t : sh.queue) {
          sv.queued_load_minutes += load_minutes(sh, t);
          v.queued_capacities.push_back(net_.trucks[t.index()].capacity);
        }
        sv.own_load_minutes = sh.loading_time(requester.capacity);
        v.queue_length += sh.queue.size();
        if (sh.status != Availability::Broken) v.eligible = true;
        v.shovels.push_back(sv);
      }
      v.distance_from_requester = distance_to(SiteRef::load(site.id));
      s.load_sites.push_back(std::move(v));
    }

    s.dump_sites.reserve(net_.dump_sites.size());
    for (const auto& site : net_.dump_sites) {
      dispatch::DumpSiteView v;
      v.id = site.id;
      v.name = site.name;
      v.position = site.position;
      v.parking_queue = site.parking_queue.size();
      v.queue_length = site.parking_queue.size();
      v.total_tons_received = site.total_tons_received;
      for (SpotId sid : site.spots) {
        const auto& sp = net_.spots[sid.index()];
        v.spots.push_back({sp.id, sp.unload_time, sp.queue.size()});
        v.queue_length += sp.queue.size();
      }
      v.distance_from_requester = distance_to(SiteRef::dump(site.id));
      s.dump_sites.push_back(std::move(v));
    }

    for (const auto& t : net_.trucks) {
      if (t.id == requester.id || t.state == TruckState::Broken || !t.journey ||
          !t.journey->destination) {
        continue;
      }
      const SiteRef dest = *t.journey->destination;
      if (dest.kind == SiteKind::Load) {
        auto& v = s.load_sites[dest.index];
        ++v.en_route;
        v.en_route_capacities.push_back(t.capacity);
      } else if (dest.kind == SiteKind::Dump) {
        ++s.dump_sites[dest.index].en_route;
      }
    }

    s.roads.reserve(net_.roads.size());
    for (const auto& r : net_.roads) {
      s.roads.push_back({r.id, r.a, r.b, r.distance, r.status, r.trucks_on_road.size(),
                         r.jam_count});
    }
    return s;
  }

  // --- dispatch requests ----------------------------------------------------

  void record_request(const Truck& truck, OrderKind order) {
    EventRecord r;
    r.kind = RecordKind::DispatchRequest;
    r.subject = truck.id.value;
    r.order = order;
    record(r);
  }

  void record_order(const Truck& truck, OrderKind order, std::size_t target) {
    EventRecord r;
    r.kind = RecordKind::DispatchOrder;
    r.subject = truck.id.value;
    r.order = order;
    r.target = static_cast<std::int64_t>(target);
    record(r);
  }

  void record_fault(const Truck& truck, OrderKind order, std::optional<std::size_t> target) {
    ++policy_faults_;
    EventRecord r;
    r.kind = RecordKind::PolicyFault;
    r.subject = truck.id.value;
    r.order = order;
    r.target = target ? static_cast<std::int64_t>(*target) : -1;
    record(r);
  }

  void idle(Truck& truck, OrderKind order) {
    EventRecord r;
    r.kind = RecordKind::DispatchIdle;
    r.subject = truck.id.value;
    r.order = order;
    record(r);
    schedule(clock_ + 1.0, Ev{EvKind::Retry, truck.id.value, truck.epoch, order});
  }

  // Asks the policy twice at most. `ask` returns the raw answer and `valid`
  // checks it against the current world.
  template <typename Ask, typename Valid>
  std::optional<std::size_t> decide(Truck& truck, OrderKind order, Ask&& ask, Valid&& valid) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto snap = snapshot(truck);
      const std::optional<std::size_t> answer = timed([&] { return ask(snap); });
      if (!answer) {
        idle(truck, order);
        return std::nullopt;
      }
      if (valid(*answer)) {
        record_order(truck, order, *answer);
        return answer;
      }
      record_fault(truck, order, answer);
    }
    idle(truck, order);
    return std::nullopt;
  }

  bool load_site_eligible(std::size_t i) const {
    if (i >= net_.load_sites.size()) return false;
    for (ShovelId sid : net_.load_sites[i].shovels) {
      if (net_.shovels[sid.index()].status != Availability::Broken) return true;
    }
    return false;
  }

  static std::optional<std::size_t> index_of(std::optional<LoadSiteId> id) {
    if (!id) return std::nullopt;
    return id->index();
  }
  static std::optional<std::size_t> index_of(std::optional<DumpSiteId> id) {
    if (!id) return std::nullopt;
    return id->index();
  }

  void request_order(Truck& truck, OrderKind order) {
    record_request(truck, order);
    switch (order) {
      case OrderKind::Init:
      case OrderKind::Back:
      case OrderKind::Reroute: {
        auto target = decide(
            truck, order,
            [&](const dispatch::MineSnapshot& s) {
              return index_of(order == OrderKind::Init ? policy_.give_init_order(s)
                                                       : policy_.give_back_order(s));
            },
            [&](std::size_t i) { return load_site_eligible(i); });
        if (!target) return;
        const auto dest = SiteRef::load(LoadSiteId(*target));
        if (order == OrderKind::Init) transition(truck, Trigger::InitOrder);
        if (order == OrderKind::Reroute) {
          remove_from(net_.load_sites[truck.current_site->index].parking_queue, truck.id);
          transition(truck, Trigger::Reroute);
        }
        depart(truck, dest);
        break;
      }
      case OrderKind::Haul: {
        auto target = decide(
            truck, order,
            [&](const dispatch::MineSnapshot& s) { return index_of(policy_.give_haul_order(s)); },
            [&](std::size_t i) { return i < net_.dump_sites.size(); });
        if (!target) return;
        depart(truck, SiteRef::dump(DumpSiteId(*target)));
        break;
      }
      case OrderKind::Shovel:
      case OrderKind::Spot:
      case OrderKind::None:
        throw std::logic_error("request_order called with a non-route order");
    }
  }

  // A truck waiting in a load site's parking area picks a shovel; when the
  // site has lost every shovel it is sent elsewhere instead.
  void request_shovel(Truck& truck) {
    const LoadSiteId site{truck.current_site->index};
    if (!load_site_eligible(site.index())) return request_order(truck, OrderKind::Reroute);
    record_request(truck, OrderKind::Shovel);
    auto target = decide(
        truck, OrderKind::Shovel,
        [&](const dispatch::MineSnapshot& s) -> std::optional<std::size_t> {
          auto id = policy_.choose_shovel(s, site);
          if (!id) return std::nullopt;
          return id->index();
        },
        [&](std::size_t i) {
          return i < net_.shovels.size() && net_.shovels[i].site == site &&
                 net_.shovels[i].status == Availability::Up;
        });
    if (target) enqueue_at_shovel(truck.id, ShovelId(*target));
  }

  void request_spot(Truck& truck) {
    const DumpSiteId site{truck.current_site->index};
    record_request(truck, OrderKind::Spot);
    auto target = decide(
        truck, OrderKind::Spot,
        [&](const dispatch::MineSnapshot& s) -> std::optional<std::size_t> {
          auto id = policy_.choose_dump_spot(s, site);
          if (!id) return std::nullopt;
          return id->index();
        },
        [&](std::size_t i) { return i < net_.spots.size() && net_.spots[i].site == site; });
    if (!target) return;
    auto& spot = net_.spots[*target];
    remove_from(net_.dump_sites[site.index()].parking_queue, truck.id);
    truck.spot = spot.id;
    spot.queue.push_back(truck.id);
    if (!spot.busy) start_unloading(spot);
  }

  // --- movement -------------------------------------------------------------

  // Fraction of the road already covered, from the truck's drawn position.
  double road_completion(const Truck& t) const {
    const auto& j = *t.journey;
    const double total = distance(j.from, j.to);
    if (!(total > 0.0)) return 1.0;
    const Vec2 origin = net_.position_of(j.origin);
    const double full = distance(origin, j.to);
    if (!(full > 0.0)) return 1.0;
    return std::clamp(distance(origin, position_at(j, clock_)) / full, 0.0, 1.0);
  }

  void depart(Truck& truck, SiteRef dest) {
    const SiteRef origin = *truck.current_site;
    const auto road_id = net_.road_between(origin, dest);
    const double dist = road_id ? net_.roads[road_id->index()].distance
                                : distance(net_.position_of(origin), net_.position_of(dest));
    // Off-network moves between co-located sites take no time.
    double travel = road_id || dist > 0.0 ? travel_time(dist, truck.speed) : 0.0;
    truck.jam_from = truck.jam_to = 0.0;

    if (road_id) {
      auto& road = net_.roads[road_id->index()];
      if (road.status == RoadStatus::UnderMaintenance && road.penalty_fraction > 0.0) {
        const double extra = travel * road.penalty_fraction;
        EventRecord r;
        r.kind = RecordKind::MaintenancePenalty;
        r.subject = truck.id.value;
        r.target = road.id.value;
        r.amount = extra;
        r.position = road.penalty_fraction;
        record(r);
        travel += extra;
      }
      std::vector<double> others;
      others.reserve(road.trucks_on_road.size());
      for (TruckId o : road.trucks_on_road) others.push_back(road_completion(net_.trucks[o.index()]));
      if (auto jam = events::sample_jam(config_.roads.jam, others, travel,
                                        jam_rngs_[road.id.index()]);
          jam && jam->affected) {
        ++road.jam_count;
        EventRecord r;
        r.kind = RecordKind::Jam;
        r.subject = truck.id.value;
        r.target = road.id.value;
        r.amount = jam->delay;
        r.duration = jam->duration;
        r.position = jam->position;
        record(r);
        truck.jam_from = clock_ + jam->reach_time;
        truck.jam_to = truck.jam_from + jam->delay;
        travel += jam->delay;
        events::RandomEvent ev;
        ev.kind = events::EventKind::Jam;
        ev.subject = {events::SubjectClass::Road, road.id.value};
        ev.start = clock_;
        ev.duration = jam->duration;
        notify(ev);
      }
      road.trucks_on_road.push_back(truck.id);
    }

    Journey j;
    j.road = road_id;
    j.origin = origin;
    j.destination = dest;
    j.from = net_.position_of(origin);
    j.to = net_.position_of(dest);
    j.departure = clock_;
    j.arrival = clock_ + travel;
    truck.journey = j;
    truck.current_site.reset();
    ++truck.epoch;
    schedule(j.arrival, Ev{EvKind::Arrive, truck.id.value, truck.epoch});

    EventRecord r;
    r.kind = RecordKind::Depart;
    r.subject = truck.id.value;
    r.target = road_id ? static_cast<std::int64_t>(road_id->value) : -1;
    r.amount = travel;
    r.duration = j.arrival;
    record(r);
  }

  void arrive(Truck& truck) {
    const Journey j = *truck.journey;
    truck.journey.reset();
    if (j.road) {
      auto& road = net_.roads[j.road->index()];
      remove_from(road.trucks_on_road, truck.id);
      ++road.completed_trips;
    }
    if (truck.state == TruckState::Broken) {
      // Back home; broken trucks leave no further trace.
      truck.current_site = SiteRef::charging();
      return;
    }
    const SiteRef dest = *j.destination;
    truck.current_site = dest;
    record_truck(RecordKind::Arrive, truck, static_cast<std::int64_t>(dest.index));
    if (dest.kind == SiteKind::Load) {
      transition(truck, Trigger::ArriveAtLoadSite);
      net_.load_sites[dest.index].parking_queue.push_back(truck.id);
      request_shovel(truck);
    } else if (dest.kind == SiteKind::Dump) {
      transition(truck, Trigger::ArriveAtDumpSite);
      net_.dump_sites[dest.index].parking_queue.push_back(truck.id);
      request_spot(truck);
    }
  }

  // --- service --------------------------------------------------------------

  void start_loading(Shovel& shovel) {
    auto& truck = net_.trucks[shovel.queue.front().index()];
    transition(truck, Trigger::LoadingStart);
    shovel.busy = true;
    shovel.service_end = clock_ + shovel.loading_time(truck.capacity);
    ++shovel.epoch;
    schedule(shovel.service_end, Ev{EvKind::LoadDone, shovel.id.value, shovel.epoch});
    record_truck(RecordKind::LoadStart, truck, shovel.id.value);
  }

  void load_done(Shovel& shovel) {
    auto& truck = net_.trucks[shovel.queue.front().index()];
    shovel.queue.pop_front();
    shovel.busy = false;
    truck.shovel.reset();
    truck.payload = truck.capacity;
    net_.load_sites[shovel.site.index()].tons_loaded += truck.capacity;
    mass_.loaded += truck.capacity;
    record_truck(RecordKind::LoadComplete, truck, shovel.id.value, truck.capacity);
    transition(truck, Trigger::LoadingComplete);
    if (!shovel.queue.empty() && shovel.status == Availability::Up) start_loading(shovel);
    request_order(truck, OrderKind::Haul);
  }

  void start_unloading(DumpSpot& spot) {
    auto& truck = net_.trucks[spot.queue.front().index()];
    transition(truck, Trigger::UnloadingStart);
    spot.busy = true;
    schedule(clock_ + spot.unload_time, Ev{EvKind::UnloadDone, spot.id.value});
    record_truck(RecordKind::UnloadStart, truck, spot.id.value);
  }

  void unload_done(DumpSpot& spot) {
    auto& truck = net_.trucks[spot.queue.front().index()];
    spot.queue.pop_front();
    spot.busy = false;
    truck.spot.reset();
    const double tons = truck.payload;
    truck.payload = 0.0;
    net_.dump_sites[spot.site.index()].total_tons_received += tons;
    mass_.unloaded += tons;
    record_truck(RecordKind::UnloadComplete, truck, spot.site.value, tons);
    transition(truck, Trigger::UnloadingComplete);
    if (!spot.queue.empty()) start_unloading(spot);
    request_order(truck, OrderKind::Back);
  }

  // --- faults ---------------------------------------------------------------

  void sample_hazards() {
    using events::SubjectClass;
    for (auto& t : net_.trucks) {
      if (!t.journey || (t.state != TruckState::EmptyRun && t.state != TruckState::FullRun)) {
        continue;
      }
      if (auto ev = events::sample_availability(t.hazard, {SubjectClass::Truck, t.id.value}, 1.0,
                                                clock_, truck_rngs_[t.id.index()])) {
        apply_fault(*ev);
      }
    }
    for (auto& s : net_.shovels) {
      if (s.status != Availability::Up) continue;
      if (auto ev = events::sample_availability(s.hazard, {SubjectClass::Shovel, s.id.value}, 1.0,
                                                clock_, shovel_rngs_[s.id.index()])) {
        apply_fault(*ev);
      }
    }
    const auto& params = config_.roads.maintenance;
    for (auto& r : net_.roads) {
      if (r.status != RoadStatus::Up) continue;
      auto& rng = road_rngs_[r.id.index()];
      if (auto ev = events::sample_availability(params, {SubjectClass::Road, r.id.value}, 1.0,
                                                clock_, rng)) {
        ev->penalty_fraction =
            events::sample_penalty_fraction(config_.roads.penalty_mean, config_.roads.penalty_std,
                                            rng);
        apply_fault(*ev);
      }
    }
  }

  void truck_repair(Truck& truck, double duration) {
    truck.resume_state = truck.state;
    transition(truck, Trigger::RepairStart);
    record_truck(RecordKind::TruckRepair, truck, -1, 0.0, duration);
    auto& j = *truck.journey;
    // Halt in place: the rest of the trip starts once the repair is done.
    j.from = position_at(j, clock_);
    const double remaining = std::max(0.0, j.arrival - clock_);
    j.departure = clock_ + duration;
    j.arrival = j.departure + remaining;
    ++truck.epoch;
    schedule(clock_ + duration, Ev{EvKind::TruckRepairEnd, truck.id.value, truck.epoch});
    schedule(j.arrival, Ev{EvKind::Arrive, truck.id.value, truck.epoch});
  }

  void truck_breakdown(Truck& truck) {
    transition(truck, Trigger::Breakdown);
    record_truck(RecordKind::TruckBreakdown, truck, -1, truck.payload);
    mass_.lost += truck.payload;
    truck.payload = 0.0;
    auto& j = *truck.journey;
    if (j.road) remove_from(net_.roads[j.road->index()].trucks_on_road, truck.id);
    const Vec2 here = position_at(j, clock_);
    const double dist = distance(here, net_.charging.position);
    Journey home;
    home.origin = j.origin;
    home.from = here;
    home.to = net_.charging.position;
    home.departure = clock_;
    home.arrival = clock_ + (dist > 0.0 ? travel_time(dist, truck.speed) : 0.0);
    truck.journey = home;
    ++truck.epoch;
    schedule(home.arrival, Ev{EvKind::Arrive, truck.id.value, truck.epoch});
  }

  void shovel_repair(Shovel& shovel, double duration) {
    shovel.status = Availability::UnderRepair;
    EventRecord r;
    r.kind = RecordKind::ShovelRepair;
    r.subject_kind = SubjectKind::Shovel;
    r.subject = shovel.id.value;
    r.duration = duration;
    record(r);
    if (shovel.busy) {
      shovel.service_end += duration;
      ++shovel.epoch;
      schedule(shovel.service_end, Ev{EvKind::LoadDone, shovel.id.value, shovel.epoch});
    }
    schedule(clock_ + duration, Ev{EvKind::ShovelRepairEnd, shovel.id.value});
  }

  void shovel_breakdown(Shovel& shovel) {
    shovel.status = Availability::Broken;
    ++shovel.epoch;
    EventRecord r;
    r.kind = RecordKind::ShovelBreakdown;
    r.subject_kind = SubjectKind::Shovel;
    r.subject = shovel.id.value;
    record(r);
    const std::vector<TruckId> queued(shovel.queue.begin(), shovel.queue.end());
    shovel.queue.clear();
    auto& site = net_.load_sites[shovel.site.index()];
    if (shovel.busy) {
      shovel.busy = false;
      transition(net_.trucks[queued.front().index()], Trigger::ShovelLost);
    }
    for (TruckId id : queued) {
      auto& t = net_.trucks[id.index()];
      t.shovel.reset();
      site.parking_queue.push_back(id);
    }
    for (TruckId id : queued) request_shovel(net_.trucks[id.index()]);
  }

  void road_maintenance(Road& road, double duration, double penalty) {
    road.status = RoadStatus::UnderMaintenance;
    road.penalty_fraction = penalty;
    road.maintenance_end = clock_ + duration;
    EventRecord r;
    r.kind = RecordKind::RoadMaintenance;
    r.subject_kind = SubjectKind::Road;
    r.subject = road.id.value;
    r.duration = duration;
    r.position = penalty;
    record(r);
    schedule(road.maintenance_end, Ev{EvKind::RoadMaintenanceEnd, road.id.value});
  }

  // --- event dispatch -------------------------------------------------------

  void handle(const Ev& e) {
    switch (e.kind) {
      case EvKind::Arrive: {
        auto& t = net_.trucks[e.subject];
        if (t.epoch == e.epoch && t.journey) arrive(t);
        break;
      }
      case EvKind::LoadDone: {
        auto& s = net_.shovels[e.subject];
        if (s.epoch == e.epoch && s.busy) load_done(s);
        break;
      }
      case EvKind::UnloadDone:
        unload_done(net_.spots[e.subject]);
        break;
      case EvKind::TruckRepairEnd: {
        auto& t = net_.trucks[e.subject];
        if (t.state != TruckState::UnderRepair) break;
        transition(t, Trigger::RepairComplete);
        record_truck(RecordKind::TruckRepairEnd, t);
        break;
      }
      case EvKind::ShovelRepairEnd: {
        auto& s = net_.shovels[e.subject];
        if (s.status != Availability::UnderRepair) break;
        s.status = Availability::Up;
        EventRecord r;
        r.kind = RecordKind::ShovelRepairEnd;
        r.subject_kind = SubjectKind::Shovel;
        r.subject = s.id.value;
        record(r);
        if (!s.busy && !s.queue.empty()) start_loading(s);
        break;
      }
      case EvKind::RoadMaintenanceEnd: {
        auto& road = net_.roads[e.subject];
        road.status = RoadStatus::Up;
        road.penalty_fraction = 0.0;
        EventRecord r;
        r.kind = RecordKind::RoadMaintenanceEnd;
        r.subject_kind = SubjectKind::Road;
        r.subject = road.id.value;
        record(r);
        break;
      }
      case EvKind::Retry: {
        auto& t = net_.trucks[e.subject];
        if (t.epoch != e.epoch || t.state == TruckState::Broken) break;
        switch (e.order) {
          case OrderKind::Shovel:
          case OrderKind::Reroute:
            request_shovel(t);
            break;
          case OrderKind::Spot:
            request_spot(t);
            break;
          default:
            request_order(t, e.order);
            break;
        }
        break;
      }
    }
  }

  MineConfig config_;
  dispatch::DispatchPolicy& policy_;
  std::uint64_t seed_;
  double duration_;
  RunOptions options_;
  Network net_;

  EventQueue<Ev> queue_;
  EventPool pool_;
  kpi::DecisionLog decisions_;
  ticklog::TickArchive ticks_;
  MassBalance mass_;
  std::uint64_t policy_faults_{0};

  std::vector<Rng> truck_rngs_;
  std::vector<Rng> shovel_rngs_;
  std::vector<Rng> road_rngs_;
  std::vector<Rng> jam_rngs_;

  double clock_{0.0};
  bool started_{false};
  long next_minute_{0};
  long last_minute_{0};
  int tick_interval_{1};
};

Simulation::Simulation(const MineConfig& config, dispatch::DispatchPolicy& policy,
                       std::uint64_t seed, double duration, RunOptions options)
    : impl_(std::make_unique<Impl>(config, policy, seed, duration, std::move(options))) {}

Simulation::~Simulation() = default;

void Simulation::start() { impl_->start(); }
void Simulation::advance_to(double t) { impl_->advance_to(t); }
SimResult Simulation::finish() { return impl_->finish(); }
SimResult Simulation::run() { return impl_->finish(); }

std::size_t Simulation::enqueue_at_shovel(TruckId truck, ShovelId shovel) {
  return impl_->enqueue_at_shovel(truck, shovel);
}

void Simulation::apply_fault(const events::RandomEvent& event) { impl_->apply_fault(event); }

TruckState Simulation::transition(TruckId truck, Trigger trigger) {
  return impl_->transition(impl_->mutable_network().trucks.at(truck.index()), trigger);
}

double Simulation::now() const { return impl_->now(); }
const Network& Simulation::network() const { return impl_->network(); }
const EventPool& Simulation::events() const { return impl_->events(); }
const kpi::DecisionLog& Simulation::decisions() const { return impl_->decisions(); }

SimResult run_simulation(const MineConfig& config, dispatch::DispatchPolicy& policy,
                         std::uint64_t seed, double duration, const RunOptions& options) {
  if (auto errors = validate(config); !errors.empty()) throw ConfigError(std::move(errors));
  Simulation sim(config, policy, seed, duration, options);
  return sim.run();
}

}  // namespace minesim
