#include "minesim/kpi.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace minesim::kpi {

std::optional<double> adl(const DecisionLog& log) {
  if (log.orders() == 0) return std::nullopt;
  const double init = std::accumulate(log.init_durations.begin(), log.init_durations.end(), 0.0);
  const double orders =
      std::accumulate(log.order_durations.begin(), log.order_durations.end(), 0.0);
  return (init + orders) / static_cast<double>(log.orders());
}

double FleetSpec::total_trucks() const {
  return std::accumulate(truck_counts.begin(), truck_counts.end(), 0.0);
}

namespace {

constexpr double kGridPerMinute = 10.0;  // deciminutes

std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t g = std::gcd(a, b);
  const std::uint64_t q = a / g;
  if (q != 0 && b > std::numeric_limits<std::uint64_t>::max() / q) {
    throw std::overflow_error("match factor: lcm of loading times overflows");
  }
  return q * b;
}

}  // namespace

double match_factor(const FleetSpec& spec) {
  const std::size_t types = spec.truck_counts.size();
  const std::size_t shovel_types = spec.shovel_counts.size();
  if (types == 0 || shovel_types == 0) {
    throw std::invalid_argument("match factor needs at least one truck and one shovel type");
  }
  if (spec.ult.size() != types) throw std::invalid_argument("ULT needs one row per truck type");
  if (!(spec.truck_cycle_time > 0.0)) throw std::invalid_argument("truck cycle time must be > 0");
  for (double n : spec.truck_counts) {
    if (!(n >= 0.0)) throw std::invalid_argument("truck counts must be >= 0");
  }
  for (double s : spec.shovel_counts) {
    if (!(s > 0.0)) throw std::invalid_argument("shovel counts must be > 0");
  }
  const double trucks = spec.total_trucks();
  if (!(trucks > 0.0)) throw std::invalid_argument("match factor needs at least one truck");

  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < types; ++i) {
    if (spec.ult[i].size() != shovel_types) {
      throw std::invalid_argument("ULT needs one column per shovel type");
    }
    std::vector<std::uint64_t> grid(shovel_types);
    std::uint64_t lcm = 1;
    for (std::size_t j = 0; j < shovel_types; ++j) {
      const double ult = spec.ult[i][j];
      if (!(ult > 0.0)) throw std::invalid_argument("ULT values must be > 0");
      grid[j] = static_cast<std::uint64_t>(std::max(1.0, std::round(ult * kGridPerMinute)));
      lcm = checked_lcm(lcm, grid[j]);
    }
    numerator += static_cast<double>(lcm) / kGridPerMinute;
    for (std::size_t j = 0; j < shovel_types; ++j) {
      denominator += spec.shovel_counts[j] * static_cast<double>(lcm / grid[j]);
    }
  }
  return trucks * numerator / (denominator * spec.truck_cycle_time);
}

FleetSpec fleet_spec_from_config(const MineConfig& config) {
  FleetSpec spec;
  std::vector<Shovel> kinds;
  using Key = std::tuple<std::string, double, double>;
  std::map<Key, std::size_t> index;
  for (const auto& site : config.load_sites) {
    for (const auto& s : site.shovels) {
      const Key key{s.type, s.bucket_size, s.cycle_time};
      auto [it, inserted] = index.emplace(key, kinds.size());
      if (inserted) {
        Shovel k;
        k.bucket_size = s.bucket_size;
        k.cycle_time = s.cycle_time;
        kinds.push_back(k);
        spec.shovel_counts.push_back(0.0);
      }
      spec.shovel_counts[it->second] += s.count;
    }
  }
  for (const auto& fleet : config.charging.fleets) {
    spec.truck_counts.push_back(fleet.count);
    std::vector<double> row;
    for (const auto& k : kinds) row.push_back(k.loading_time(fleet.capacity));
    spec.ult.push_back(std::move(row));
  }
  return spec;
}

Series production_curve(const EventPool& pool) {
  Series out{{0.0, 0.0}};
  double total = 0.0;
  for (const auto& r : pool.records()) {
    if (r.kind != RecordKind::UnloadComplete) continue;
    total += r.amount;
    out.push_back({r.time, total});
  }
  return out;
}

Series waiting_curve(const EventPool& pool) {
  Series out{{0.0, 0.0}};
  double count = 0.0;
  for (const auto& r : pool.records()) {
    if (r.kind != RecordKind::StateChange) continue;
    const double delta = (is_waiting(r.to) ? 1.0 : 0.0) - (is_waiting(r.from) ? 1.0 : 0.0);
    if (delta == 0.0) continue;
    count += delta;
    if (out.back().time == r.time) {
      out.back().value = count;
    } else {
      out.push_back({r.time, count});
    }
  }
  return out;
}

double value_at(const Series& series, double t) {
  double v = 0.0;
  for (const auto& p : series) {
    if (p.time > t) break;
    v = p.value;
  }
  return v;
}

double integrate_steps(const Series& series, double end) {
  double area = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double from = series[i].time;
    if (from >= end) break;
    const double to = i + 1 < series.size() ? std::min(series[i + 1].time, end) : end;
    area += series[i].value * (to - from);
  }
  return area;
}

double total_wait_time(const EventPool& pool, double end) {
  std::map<std::uint32_t, double> open;  // truck -> wait start
  double total = 0.0;
  for (const auto& r : pool.records()) {
    if (r.kind != RecordKind::StateChange) continue;
    if (is_waiting(r.from)) {
      auto it = open.find(r.subject);
      if (it != open.end()) {
        total += r.time - it->second;
        open.erase(it);
      }
    }
    if (is_waiting(r.to)) open[r.subject] = r.time;
  }
  for (const auto& [truck, start] : open) total += std::max(0.0, end - start);
  return total;
}

std::uint64_t road_jams(const EventPool& pool) {
  std::uint64_t n = 0;
  for (const auto& r : pool.records()) n += r.kind == RecordKind::Jam ? 1 : 0;
  return n;
}

double produced_tons(const EventPool& pool) {
  double total = 0.0;
  for (const auto& r : pool.records()) {
    if (r.kind == RecordKind::UnloadComplete) total += r.amount;
  }
  return total;
}

std::optional<double> observed_cycle_time(const EventPool& pool) {
  std::map<std::uint32_t, double> last_entry;
  double sum = 0.0;
  std::size_t cycles = 0;
  for (const auto& r : pool.records()) {
    if (r.kind != RecordKind::StateChange || r.to != TruckState::WaitingForLoading) continue;
    // Re-entering after a broken shovel is not a new cycle.
    if (r.from == TruckState::Loading) continue;
    auto it = last_entry.find(r.subject);
    if (it != last_entry.end()) {
      sum += r.time - it->second;
      ++cycles;
      it->second = r.time;
    } else {
      last_entry.emplace(r.subject, r.time);
    }
  }
  if (cycles == 0) return std::nullopt;
  return sum / static_cast<double>(cycles);
}

bool KpiSummary::same_outcome(const KpiSummary& other) const {
  return produced_tons == other.produced_tons && match_factor == other.match_factor &&
         total_wait_time == other.total_wait_time && road_jams == other.road_jams &&
         production_curve == other.production_curve && waiting_curve == other.waiting_curve &&
         custom == other.custom;
}

namespace {

struct IndicatorRegistry {
  std::mutex mutex;
  std::map<std::string, Indicator> indicators;
};

IndicatorRegistry& indicator_registry() {
  static IndicatorRegistry r;
  return r;
}

}  // namespace

void register_indicator(std::string name, Indicator indicator) {
  auto& r = indicator_registry();
  std::lock_guard lock(r.mutex);
  r.indicators[std::move(name)] = std::move(indicator);
}

void clear_indicators() {
  auto& r = indicator_registry();
  std::lock_guard lock(r.mutex);
  r.indicators.clear();
}

std::vector<std::string> registered_indicators() {
  auto& r = indicator_registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : r.indicators) names.push_back(name);
  return names;
}

KpiSummary summarize(const MineConfig& config, const EventPool& pool, double duration,
                     const DecisionLog* decisions) {
  KpiSummary k;
  k.production_curve = production_curve(pool);
  k.produced_tons = k.production_curve.back().value;
  k.waiting_curve = waiting_curve(pool);
  k.total_wait_time = total_wait_time(pool, duration);
  k.road_jams = road_jams(pool);
  if (auto cycle = observed_cycle_time(pool)) {
    auto spec = fleet_spec_from_config(config);
    spec.truck_cycle_time = *cycle;
    k.match_factor = match_factor(spec);
  }
  if (decisions) k.adl = adl(*decisions);

  std::map<std::string, Indicator> indicators;
  {
    auto& r = indicator_registry();
    std::lock_guard lock(r.mutex);
    indicators = r.indicators;
  }
  for (const auto& [name, fn] : indicators) k.custom[name] = fn(pool);
  return k;
}

}  // namespace minesim::kpi
