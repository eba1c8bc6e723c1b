#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minesim/config.hpp"
#include "minesim/event_pool.hpp"

namespace minesim::kpi {

// Wall-clock cost of a policy, in seconds.
struct DecisionLog {
  std::vector<double> init_durations;   // T0 per initialization (M entries)
  std::vector<double> order_durations;  // t_i per dispatch decision (N entries)

  std::size_t initializations() const { return init_durations.size(); }
  std::size_t orders() const { return order_durations.size(); }
};

// (sum T0 + sum t_i) / N; absent when no order was issued.
std::optional<double> adl(const DecisionLog& log);

struct FleetSpec {
  std::vector<double> truck_counts;        // N_i per truck type
  std::vector<double> shovel_counts;       // shovel_j per shovel type
  std::vector<std::vector<double>> ult;    // [truck type][shovel type], minutes
  double truck_cycle_time{0.0};            // minutes

  double total_trucks() const;
};

// Heterogeneous match factor. ULT values are put on a 0.1 minute grid so the
// least common multiple is defined; the grid scale cancels out.
// Throws std::invalid_argument on non-positive or inconsistent inputs.
double match_factor(const FleetSpec& spec);

// Truck types are the configured fleets, shovel types the distinct
// (type, bucket, cycle) shovel specs. truck_cycle_time is left at zero.
FleetSpec fleet_spec_from_config(const MineConfig& config);

struct SeriesPoint {
  double time{0.0};
  double value{0.0};

  bool operator==(const SeriesPoint&) const = default;
};

using Series = std::vector<SeriesPoint>;

// Cumulative tons at every unload completion, starting with (0, 0).
Series production_curve(const EventPool& pool);
// Number of trucks in a waiting state, one point per change, starting at (0, 0).
Series waiting_curve(const EventPool& pool);
// Step-function value at `t` (last point with time <= t).
double value_at(const Series& series, double t);
// Integral of a step series over [0, end].
double integrate_steps(const Series& series, double end);

// Time spent in WaitingForLoading plus WaitingForUnloading, summed over trucks,
// with open intervals closed at `end`.
double total_wait_time(const EventPool& pool, double end);
std::uint64_t road_jams(const EventPool& pool);
double produced_tons(const EventPool& pool);

// Mean duration between consecutive entries into WaitingForLoading per truck.
// Incomplete cycles are excluded; nullopt when no cycle completed.
std::optional<double> observed_cycle_time(const EventPool& pool);

struct KpiSummary {
  double produced_tons{0.0};
  std::optional<double> match_factor;
  double total_wait_time{0.0};
  std::uint64_t road_jams{0};
  std::optional<double> adl;  // wall-clock; excluded from determinism checks
  Series production_curve;
  Series waiting_curve;
  std::map<std::string, double> custom;

  // Equality of every field derived from the event pool (all but adl).
  bool same_outcome(const KpiSummary& other) const;
};

// Custom indicators see the complete pool through a const view.
using Indicator = std::function<double(const EventPool&)>;

void register_indicator(std::string name, Indicator indicator);
void clear_indicators();
std::vector<std::string> registered_indicators();

KpiSummary summarize(const MineConfig& config, const EventPool& pool, double duration,
                     const DecisionLog* decisions = nullptr);

}  // namespace minesim::kpi
