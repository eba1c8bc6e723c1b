#include "minesim/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include <fmt/format.h>

namespace minesim::dispatch {

double ShovelView::loading_time(double capacity) const {
  Shovel s;
  s.bucket_size = bucket_size;
  s.cycle_time = cycle_time;
  return s.loading_time(capacity);
}

void DispatchPolicy::initialize(const PolicyContext& context) { rng_.seed(context.rng_seed); }

std::optional<SpotId> DispatchPolicy::choose_dump_spot(const MineSnapshot& s, DumpSiteId site) {
  const auto& view = s.dump_sites.at(site.index());
  if (view.spots.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < view.spots.size(); ++i) {
    if (view.spots[i].queue_length < view.spots[best].queue_length) best = i;
  }
  return view.spots[best].id;
}

void DispatchPolicy::on_event(const events::RandomEvent&) {}

// ---------------------------------------------------------------- registry

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, PolicyFactory, std::less<>> factories;

  Registry() {
    factories["NaiveDispatcher"] = [] { return std::make_unique<NaiveDispatcher>(); };
    factories["RandomDispatcher"] = [] { return std::make_unique<RandomDispatcher>(); };
    factories["NearestDispatcher"] = [] { return std::make_unique<NearestDispatcher>(); };
    factories["SQDispatcher"] = [] { return std::make_unique<SQDispatcher>(); };
    factories["SPTFDispatcher"] = [] { return std::make_unique<SPTFDispatcher>(); };
    factories["FixedGroupDispatcher"] = [] { return std::make_unique<FixedGroupDispatcher>(); };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

// std::vector<bool> has no contiguous storage, so eligibility masks are built
// as plain arrays of bool.
class Mask {
 public:
  explicit Mask(std::size_t n) : data_(std::make_unique<bool[]>(n)), size_(n) {}
  bool& operator[](std::size_t i) { return data_[i]; }
  operator std::span<const bool>() const { return {data_.get(), size_}; }

 private:
  std::unique_ptr<bool[]> data_;
  std::size_t size_;
};

Mask load_eligibility(const MineSnapshot& s) {
  Mask m(s.load_sites.size());
  for (std::size_t i = 0; i < s.load_sites.size(); ++i) m[i] = s.load_sites[i].eligible;
  return m;
}

Mask dump_eligibility(const MineSnapshot& s) {
  Mask m(s.dump_sites.size());
  for (std::size_t i = 0; i < s.dump_sites.size(); ++i) m[i] = s.dump_sites[i].eligible;
  return m;
}

template <typename IdT>
std::optional<IdT> as_id(std::optional<std::size_t> index) {
  if (!index) return std::nullopt;
  return IdT(*index);
}

std::optional<LoadSiteId> nearest_load(const MineSnapshot& s) {
  std::vector<double> d;
  for (const auto& site : s.load_sites) d.push_back(site.distance_from_requester);
  return as_id<LoadSiteId>(pick_min(d, load_eligibility(s)));
}

std::optional<DumpSiteId> nearest_dump(const MineSnapshot& s) {
  std::vector<double> d;
  for (const auto& site : s.dump_sites) d.push_back(site.distance_from_requester);
  return as_id<DumpSiteId>(pick_min(d, dump_eligibility(s)));
}

std::optional<LoadSiteId> shortest_queue_load(const MineSnapshot& s) {
  std::vector<double> q, r;
  for (const auto& site : s.load_sites) {
    q.push_back(static_cast<double>(site.queue_length));
    r.push_back(static_cast<double>(site.en_route));
  }
  return as_id<LoadSiteId>(pick_shortest_queue(q, r, load_eligibility(s)));
}

std::optional<DumpSiteId> shortest_queue_dump(const MineSnapshot& s) {
  std::vector<double> q, r;
  for (const auto& site : s.dump_sites) {
    q.push_back(static_cast<double>(site.queue_length));
    r.push_back(static_cast<double>(site.en_route));
  }
  return as_id<DumpSiteId>(pick_shortest_queue(q, r, dump_eligibility(s)));
}

std::optional<LoadSiteId> sptf_load(const MineSnapshot& s) {
  std::vector<double> t;
  for (const auto& site : s.load_sites) t.push_back(load_site_processing_time(site, s.truck.capacity));
  return as_id<LoadSiteId>(pick_min(t, load_eligibility(s)));
}

}  // namespace

std::optional<ShovelId> DispatchPolicy::choose_shovel(const MineSnapshot& s, LoadSiteId site) {
  const auto& view = s.load_sites.at(site.index());
  std::vector<double> queued;
  Mask up(view.shovels.size());
  for (std::size_t i = 0; i < view.shovels.size(); ++i) {
    queued.push_back(static_cast<double>(view.shovels[i].queue_length));
    up[i] = view.shovels[i].status == Availability::Up;
  }
  const auto pick = pick_min(queued, up);
  if (!pick) return std::nullopt;
  return view.shovels[*pick].id;
}

UnknownPolicyError::UnknownPolicyError(std::string name)
    : std::runtime_error(fmt::format("unknown dispatch policy '{}'", name)) {}

void register_policy(std::string name, PolicyFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[std::move(name)] = std::move(factory);
}

std::unique_ptr<DispatchPolicy> make_policy(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) throw UnknownPolicyError(std::string(name));
  return it->second();
}

std::vector<std::string> registered_policies() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.factories) names.push_back(name);
  return names;
}

// ---------------------------------------------------------- selection rules

std::optional<std::size_t> pick_uniform(std::span<const bool> eligible, Rng& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (eligible[i]) candidates.push_back(i);
  }
  if (candidates.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> dist(0, candidates.size() - 1);
  return candidates[dist(rng)];
}

std::optional<std::size_t> pick_first(std::span<const bool> eligible) {
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (eligible[i]) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> pick_min(std::span<const double> metric, std::span<const bool> eligible) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < metric.size() && i < eligible.size(); ++i) {
    if (!eligible[i]) continue;
    // Values within rounding noise count as a tie and keep the lower index.
    if (!best) {
      best = i;
      continue;
    }
    const double a = metric[i];
    const double b = metric[*best];
    const double tol = std::isfinite(a) && std::isfinite(b) ? 1e-9 * std::max(std::abs(a), std::abs(b)) : 0.0;
    if (a < b - tol) best = i;
  }
  return best;
}

std::optional<std::size_t> pick_shortest_queue(std::span<const double> queued,
                                               std::span<const double> en_route,
                                               std::span<const bool> eligible) {
  std::vector<double> effective(queued.size());
  for (std::size_t i = 0; i < queued.size(); ++i) effective[i] = queued[i] + en_route[i];
  return pick_min(effective, eligible);
}

double load_site_processing_time(const LoadSiteView& site, double own_capacity) {
  auto best = [&](double capacity) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& s : site.shovels) {
      if (s.status == Availability::Up) t = std::min(t, s.loading_time(capacity));
    }
    if (std::isinf(t)) {
      for (const auto& s : site.shovels) {
        if (s.status != Availability::Broken) t = std::min(t, s.loading_time(capacity));
      }
    }
    return t;
  };
  double total = best(own_capacity);
  for (double c : site.queued_capacities) total += best(c);
  for (double c : site.en_route_capacities) total += best(c);
  return total;
}

double dump_site_processing_time(const DumpSiteView& site) {
  double unload = std::numeric_limits<double>::infinity();
  for (const auto& spot : site.spots) unload = std::min(unload, spot.unload_time);
  return static_cast<double>(site.queue_length + site.en_route + 1) * unload;
}

std::vector<double> productivity_ratio(std::span<const LoadSiteConfig> load_sites) {
  std::vector<double> rate(load_sites.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < load_sites.size(); ++j) {
    for (const auto& s : load_sites[j].shovels) {
      if (!(s.cycle_time > 0.0)) {
        throw std::invalid_argument(
            fmt::format("load site '{}': shovel cycle time must be > 0", load_sites[j].name));
      }
      rate[j] += s.count * (s.bucket_size / s.cycle_time);
    }
    total += rate[j];
  }
  if (!(total > 0.0)) throw std::invalid_argument("no loading capacity configured");
  for (auto& r : rate) r /= total;
  return rate;
}

std::vector<LoadSiteId> fixed_group_assign(const MineConfig& config) {
  const auto ratio = productivity_ratio(config.load_sites);

  struct Entry {
    std::size_t truck;
    double capacity;
  };
  std::vector<Entry> trucks;
  double fleet_capacity = 0.0;
  for (const auto& fleet : config.charging.fleets) {
    for (int k = 0; k < fleet.count; ++k) {
      trucks.push_back({trucks.size(), fleet.capacity});
      fleet_capacity += fleet.capacity;
    }
  }
  std::stable_sort(trucks.begin(), trucks.end(),
                   [](const Entry& a, const Entry& b) { return a.capacity > b.capacity; });

  std::vector<double> assigned(ratio.size(), 0.0);
  std::vector<LoadSiteId> groups(trucks.size());
  for (const auto& t : trucks) {
    std::optional<std::size_t> best;
    double best_deficit = 0.0;
    for (std::size_t j = 0; j < ratio.size(); ++j) {
      if (!(ratio[j] > 0.0)) continue;
      const double deficit = ratio[j] * fleet_capacity - assigned[j];
      if (!best || deficit > best_deficit) {
        best = j;
        best_deficit = deficit;
      }
    }
    groups[t.truck] = LoadSiteId(*best);
    assigned[*best] += t.capacity;
  }
  return groups;
}

// ---------------------------------------------------------------- baselines

std::optional<LoadSiteId> NaiveDispatcher::give_init_order(const MineSnapshot& s) {
  return as_id<LoadSiteId>(pick_first(load_eligibility(s)));
}

std::optional<DumpSiteId> NaiveDispatcher::give_haul_order(const MineSnapshot& s) {
  return as_id<DumpSiteId>(pick_first(dump_eligibility(s)));
}

std::optional<LoadSiteId> NaiveDispatcher::give_back_order(const MineSnapshot& s) {
  return give_init_order(s);
}

std::optional<ShovelId> NaiveDispatcher::choose_shovel(const MineSnapshot& s, LoadSiteId site) {
  for (const auto& shovel : s.load_sites.at(site.index()).shovels) {
    if (shovel.status == Availability::Up) return shovel.id;
  }
  return std::nullopt;
}

std::optional<SpotId> NaiveDispatcher::choose_dump_spot(const MineSnapshot& s, DumpSiteId site) {
  const auto& spots = s.dump_sites.at(site.index()).spots;
  if (spots.empty()) return std::nullopt;
  return spots.front().id;
}

std::optional<LoadSiteId> RandomDispatcher::give_init_order(const MineSnapshot& s) {
  return as_id<LoadSiteId>(pick_uniform(load_eligibility(s), rng()));
}

std::optional<DumpSiteId> RandomDispatcher::give_haul_order(const MineSnapshot& s) {
  return as_id<DumpSiteId>(pick_uniform(dump_eligibility(s), rng()));
}

std::optional<LoadSiteId> RandomDispatcher::give_back_order(const MineSnapshot& s) {
  return give_init_order(s);
}

std::optional<LoadSiteId> NearestDispatcher::give_init_order(const MineSnapshot& s) {
  return nearest_load(s);
}

std::optional<DumpSiteId> NearestDispatcher::give_haul_order(const MineSnapshot& s) {
  return nearest_dump(s);
}

std::optional<LoadSiteId> NearestDispatcher::give_back_order(const MineSnapshot& s) {
  return nearest_load(s);
}

std::optional<LoadSiteId> SQDispatcher::give_init_order(const MineSnapshot& s) {
  return as_id<LoadSiteId>(pick_uniform(load_eligibility(s), rng()));
}

std::optional<DumpSiteId> SQDispatcher::give_haul_order(const MineSnapshot& s) {
  return shortest_queue_dump(s);
}

std::optional<LoadSiteId> SQDispatcher::give_back_order(const MineSnapshot& s) {
  return shortest_queue_load(s);
}

std::optional<LoadSiteId> SPTFDispatcher::give_init_order(const MineSnapshot& s) {
  return sptf_load(s);
}

std::optional<DumpSiteId> SPTFDispatcher::give_haul_order(const MineSnapshot& s) {
  std::vector<double> t;
  for (const auto& site : s.dump_sites) t.push_back(dump_site_processing_time(site));
  return as_id<DumpSiteId>(pick_min(t, dump_eligibility(s)));
}

std::optional<LoadSiteId> SPTFDispatcher::give_back_order(const MineSnapshot& s) {
  return sptf_load(s);
}

std::optional<ShovelId> SPTFDispatcher::choose_shovel(const MineSnapshot& s, LoadSiteId site) {
  const auto& view = s.load_sites.at(site.index());
  std::vector<double> t;
  Mask up(view.shovels.size());
  for (std::size_t i = 0; i < view.shovels.size(); ++i) {
    t.push_back(view.shovels[i].queued_load_minutes + view.shovels[i].own_load_minutes);
    up[i] = view.shovels[i].status == Availability::Up;
  }
  const auto pick = pick_min(t, up);
  if (!pick) return std::nullopt;
  return view.shovels[*pick].id;
}

std::optional<SpotId> SPTFDispatcher::choose_dump_spot(const MineSnapshot& s, DumpSiteId site) {
  const auto& view = s.dump_sites.at(site.index());
  std::vector<double> t;
  Mask all(view.spots.size());
  for (std::size_t i = 0; i < view.spots.size(); ++i) {
    t.push_back(static_cast<double>(view.spots[i].queue_length + 1) * view.spots[i].unload_time);
    all[i] = true;
  }
  const auto pick = pick_min(t, all);
  if (!pick) return std::nullopt;
  return view.spots[*pick].id;
}

void FixedGroupDispatcher::initialize(const PolicyContext& context) {
  DispatchPolicy::initialize(context);
  groups_ = fixed_group_assign(*context.config);
}

std::optional<LoadSiteId> FixedGroupDispatcher::bound_site(const MineSnapshot& s) const {
  const auto site = groups_.at(s.truck.id.index());
  if (s.load_sites.at(site.index()).eligible) return site;
  // The bound site lost every shovel; fall back to the nearest working one.
  return nearest_load(s);
}

std::optional<LoadSiteId> FixedGroupDispatcher::give_init_order(const MineSnapshot& s) {
  return bound_site(s);
}

std::optional<DumpSiteId> FixedGroupDispatcher::give_haul_order(const MineSnapshot& s) {
  return nearest_dump(s);
}

std::optional<LoadSiteId> FixedGroupDispatcher::give_back_order(const MineSnapshot& s) {
  return bound_site(s);
}

}  // namespace minesim::dispatch
