#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minesim/config.hpp"
#include "minesim/ids.hpp"
#include "minesim/random_events.hpp"
#include "minesim/world.hpp"

namespace minesim::dispatch {

struct ShovelView {
  ShovelId id{};
  std::string_view type;
  double bucket_size{0.0};
  double cycle_time{0.0};
  Availability status{Availability::Up};
  std::size_t queue_length{0};      // includes the truck being loaded
  double queued_load_minutes{0.0};  // sum of loading times of the queue
  double own_load_minutes{0.0};     // loading time for the requesting truck

  double loading_time(double capacity) const;
};

struct LoadSiteView {
  LoadSiteId id{};
  std::string_view name;
  Vec2 position{};
  bool eligible{false};  // at least one shovel that is not Broken
  std::vector<ShovelView> shovels;
  std::size_t parking_queue{0};
  std::size_t queue_length{0};  // parking + all shovel queues
  std::size_t en_route{0};      // trucks whose journey targets this site
  std::vector<double> queued_capacities;
  std::vector<double> en_route_capacities;
  int parking_capacity{0};
  double distance_from_requester{0.0};
};

struct SpotView {
  SpotId id{};
  double unload_time{0.0};
  std::size_t queue_length{0};
};

struct DumpSiteView {
  DumpSiteId id{};
  std::string_view name;
  Vec2 position{};
  bool eligible{true};
  std::vector<SpotView> spots;
  std::size_t parking_queue{0};
  std::size_t queue_length{0};
  std::size_t en_route{0};
  double total_tons_received{0.0};
  double distance_from_requester{0.0};
};

struct RoadView {
  RoadId id{};
  SiteRef a{};
  SiteRef b{};
  double distance{0.0};
  RoadStatus status{RoadStatus::Up};
  std::size_t load{0};
  std::uint64_t jam_count{0};
};

struct RequesterView {
  TruckId id{};
  std::string_view type;
  std::size_t fleet{0};
  double capacity{0.0};
  double speed{0.0};
  std::optional<SiteRef> location;
};

// Read-only view of the mine handed to a policy for one decision.
struct MineSnapshot {
  double clock{0.0};
  RequesterView truck;
  std::vector<LoadSiteView> load_sites;
  std::vector<DumpSiteView> dump_sites;
  std::vector<RoadView> roads;
};

// Static information handed to a policy once per run.
struct PolicyContext {
  const MineConfig* config{nullptr};
  const Network* network{nullptr};
  std::uint64_t rng_seed{0};
};

class DispatchPolicy {
 public:
  virtual ~DispatchPolicy() = default;

  virtual std::string_view name() const = 0;

  virtual void initialize(const PolicyContext& context);

  virtual std::optional<LoadSiteId> give_init_order(const MineSnapshot& snapshot) = 0;
  virtual std::optional<DumpSiteId> give_haul_order(const MineSnapshot& snapshot) = 0;
  virtual std::optional<LoadSiteId> give_back_order(const MineSnapshot& snapshot) = 0;

  // Defaults: shortest shovel queue among Up shovels / shortest spot queue.
  virtual std::optional<ShovelId> choose_shovel(const MineSnapshot& snapshot, LoadSiteId site);
  virtual std::optional<SpotId> choose_dump_spot(const MineSnapshot& snapshot, DumpSiteId site);

  virtual void on_event(const events::RandomEvent& event);

 protected:
  Rng& rng() { return rng_; }

 private:
  Rng rng_{};
};

using PolicyFactory = std::function<std::unique_ptr<DispatchPolicy>()>;

// Third-party policies register here; the six baselines are pre-registered.
void register_policy(std::string name, PolicyFactory factory);
std::unique_ptr<DispatchPolicy> make_policy(std::string_view name);
std::vector<std::string> registered_policies();

class UnknownPolicyError : public std::runtime_error {
 public:
  explicit UnknownPolicyError(std::string name);
};

// --- selection rules shared by the baselines; ties go to the lowest index ---

std::optional<std::size_t> pick_uniform(std::span<const bool> eligible, Rng& rng);
std::optional<std::size_t> pick_first(std::span<const bool> eligible);
std::optional<std::size_t> pick_min(std::span<const double> metric, std::span<const bool> eligible);
// Shortest queue where trucks on the road count as queued ahead.
std::optional<std::size_t> pick_shortest_queue(std::span<const double> queued,
                                               std::span<const double> en_route,
                                               std::span<const bool> eligible);

// Expected processing time at a load site for the requesting truck: loading of
// every queued and en-route truck at its best shovel, plus its own.
double load_site_processing_time(const LoadSiteView& site, double own_capacity);
double dump_site_processing_time(const DumpSiteView& site);

// Output rate share of each loading area; sums to one.
std::vector<double> productivity_ratio(std::span<const LoadSiteConfig> load_sites);

// Trucks sorted by capacity (descending, then id) are bound one at a time to
// the site with the largest remaining capacity deficit.
std::vector<LoadSiteId> fixed_group_assign(const MineConfig& config);

class NaiveDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "NaiveDispatcher"; }
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;
  std::optional<ShovelId> choose_shovel(const MineSnapshot& s, LoadSiteId site) override;
  std::optional<SpotId> choose_dump_spot(const MineSnapshot& s, DumpSiteId site) override;
};

class RandomDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "RandomDispatcher"; }
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;
};

class NearestDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "NearestDispatcher"; }
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;
};

class SQDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "SQDispatcher"; }
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;
};

class SPTFDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "SPTFDispatcher"; }
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;
  std::optional<ShovelId> choose_shovel(const MineSnapshot& s, LoadSiteId site) override;
  std::optional<SpotId> choose_dump_spot(const MineSnapshot& s, DumpSiteId site) override;
};

class FixedGroupDispatcher final : public DispatchPolicy {
 public:
  std::string_view name() const override { return "FixedGroupDispatcher"; }
  void initialize(const PolicyContext& context) override;
  std::optional<LoadSiteId> give_init_order(const MineSnapshot& s) override;
  std::optional<DumpSiteId> give_haul_order(const MineSnapshot& s) override;
  std::optional<LoadSiteId> give_back_order(const MineSnapshot& s) override;

  const std::vector<LoadSiteId>& groups() const { return groups_; }

 private:
  std::optional<LoadSiteId> bound_site(const MineSnapshot& s) const;

  std::vector<LoadSiteId> groups_;
};

}  // namespace minesim::dispatch
