// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "minesim/cli.hpp"
#include "minesim/simulation.hpp"

using namespace minesim;

namespace {

const std::vector<std::string> kBaselines = {"FixedGroupDispatcher", "SQDispatcher",
                                             "SPTFDispatcher",       "RandomDispatcher",
                                             "NearestDispatcher",    "NaiveDispatcher"};

MineConfig reference() {
  return parse_config(std::filesystem::path(MINESIM_SCENARIO_DIR) / "reference_mine.json");
}

int failures = 0;

void report(int n, std::string_view title, bool ok, const std::string& detail) {
  std::cout << fmt::format("{} {}: {} -- {}", ok ? "PASS" : "FAIL", n, title, detail) << std::endl;
  if (!ok) ++failures;
}

struct Cell {
  double tons;
  double wait;
  double jams;
  double adl;
  double seconds;
};

// policy -> one cell per seed
using Grid = std::map<std::string, std::vector<Cell>>;

Grid run_baselines(const MineConfig& config, int seeds) {
  Grid grid;
  for (const auto& name : kBaselines) {
    for (int s = 1; s <= seeds; ++s) {
      auto policy = dispatch::make_policy(name);
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_simulation(config, *policy, static_cast<std::uint64_t>(s), 240.0);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      grid[name].push_back({r.kpis.produced_tons, r.kpis.total_wait_time,
                            static_cast<double>(r.kpis.road_jams), r.kpis.adl.value_or(0.0),
                            secs});
    }
  }
  return grid;
}

double mean(const std::vector<Cell>& cells, double Cell::*field) {
  double s = 0.0;
  for (const auto& c : cells) s += c.*field;
  return s / static_cast<double>(cells.size());
}

void criterion_ranking(const Grid& grid) {
  std::map<std::string, double> tons;
  double slowest = 0.0;
  for (const auto& [name, cells] : grid) {
    tons[name] = mean(cells, &Cell::tons);
    for (const auto& c : cells) slowest = std::max(slowest, c.seconds);
  }
  const bool order = tons["FixedGroupDispatcher"] > tons["SQDispatcher"] &&
                     tons["SQDispatcher"] > tons["RandomDispatcher"] &&
                     tons["RandomDispatcher"] > tons["NearestDispatcher"] &&
                     tons["NearestDispatcher"] > tons["NaiveDispatcher"];
  const double gap = std::abs(tons["SPTFDispatcher"] - tons["SQDispatcher"]) / tons["SQDispatcher"];
  std::string detail;
  for (const auto& name : kBaselines) detail += fmt::format("{}={:.0f} ", name, tons[name]);
  detail += fmt::format("| SPTF vs SQ {:.1f}% | slowest run {:.2f} s", gap * 100.0, slowest);
  report(1, "baseline production ranking", order && gap <= 0.05 && slowest < 60.0, detail);
}

void criterion_signatures(const Grid& grid) {
  const std::size_t seeds = grid.begin()->second.size();
  int naive_jams = 0, naive_wait = 0, fg_jams = 0, fg_tons = 0, sptf_wait = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    auto at = [&](const std::string& n) { return grid.at(n)[s]; };
    bool nj = true, nw = true, fj = true, ft = true, sw = true;
    for (const auto& n : kBaselines) {
      if (n != "NaiveDispatcher") {
        nj = nj && at("NaiveDispatcher").jams < at(n).jams;
        nw = nw && at("NaiveDispatcher").wait > at(n).wait;
      }
      if (n != "FixedGroupDispatcher") {
        fj = fj && at("FixedGroupDispatcher").jams > at(n).jams;
        ft = ft && at("FixedGroupDispatcher").tons > at(n).tons;
      }
    }
    for (const auto* n : {"RandomDispatcher", "SQDispatcher", "FixedGroupDispatcher"}) {
      sw = sw && at("SPTFDispatcher").wait < at(n).wait;
    }
    naive_jams += nj;
    naive_wait += nw;
    fg_jams += fj;
    fg_tons += ft;
    sptf_wait += sw;
  }
  const int need = static_cast<int>(std::ceil(0.8 * static_cast<double>(seeds)));
  const bool ok = naive_jams >= need && naive_wait >= need && fg_jams >= need &&
                  fg_tons >= need && sptf_wait >= need;
  report(2, "qualitative signatures", ok,
         fmt::format("of {} seeds: Naive min jams {}, Naive max wait {}, FixedGroup max jams {}, "
                     "FixedGroup max tons {}, SPTF min wait {}",
                     seeds, naive_jams, naive_wait, fg_jams, fg_tons, sptf_wait));
}

void criterion_match_factor() {
  const double homogeneous = kpi::match_factor({{10}, {1}, {{5}}, 50.0});
  // Literal evaluation for the mixed fleet: lcm(4,6)=12, lcm(8,12)=24.
  const double oracle = (3.0 + 2.0) * (12.0 + 24.0) /
                        ((12.0 / 4 + 12.0 / 6 + 24.0 / 8 + 24.0 / 12) * 60.0);
  const double mixed = kpi::match_factor({{3, 2}, {1, 1}, {{4, 6}, {8, 12}}, 60.0});
  const double doubled = kpi::match_factor({{6, 4}, {1, 1}, {{4, 6}, {8, 12}}, 60.0});
  const bool ok = std::abs(homogeneous - 1.0) < 1e-9 && std::abs(mixed - oracle) < 1e-9 &&
                  std::abs(doubled - 2.0 * mixed) < 1e-9;
  report(3, "match factor", ok,
         fmt::format("homogeneous {:.12f}, mixed {:.12f} vs oracle {:.12f}, doubled {:.12f}",
                     homogeneous, mixed, oracle, doubled));
}

void criterion_calibration() {
  const int n = 1'000'000;
  Rng rng = derive_stream(99, StreamClass::TruckHazard, 0);
  const events::HazardParams h{0.01, 10.0, 2.0, 0.0};
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += events::sample_availability(h, {}, 100.0, 0.0, rng) ? 1 : 0;
  const double p = 1.0 - std::exp(-1.0);
  const double dev = std::abs(static_cast<double>(hits) / n - p) / std::sqrt(p * (1 - p) / n);

  const auto density =
      events::jam_position_density(std::vector<double>{0.2, 0.8}, {0.0, 0.1, 1.0, 2.0, 5.0});
  const int bins = 20;
  std::vector<double> hist(bins, 0.0);
  for (int i = 0; i < n; ++i) hist[std::min(bins - 1, static_cast<int>(density->sample(rng) * bins))] += 1;
  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    l1 += std::abs(hist[b] / n - (density->cdf((b + 1.0) / bins) - density->cdf(double(b) / bins)));
  }

  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += events::sample_weibull(2.0, 15.0, rng);
  const double expected = 15.0 * std::tgamma(1.5);
  const double weibull_err = std::abs(sum / n - expected) / expected;

  report(4, "stochastic calibration", dev <= 3.0 && l1 < 0.01 && weibull_err < 0.01,
         fmt::format("trigger {:.2f} sigma, jam histogram L1 {:.4f}, Weibull mean error {:.4f}%",
                     dev, l1, weibull_err * 100.0));
}

void criterion_determinism(const MineConfig& config) {
  bool ok = true;
  std::string broken;
  for (const auto& name : kBaselines) {
    auto p1 = dispatch::make_policy(name);
    auto p2 = dispatch::make_policy(name);
    const auto a = run_simulation(config, *p1, 7, 240.0);
    const auto b = run_simulation(config, *p2, 7, 240.0);

    std::stringstream events;
    write_event_pool(events, a.events);
    const auto pool = read_event_pool(events);
    std::stringstream ticks;
    ticklog::write_archive(ticks, a.ticks);
    const auto archive = ticklog::replay(ticks);
    const auto replayed = kpi::summarize(config, pool, a.duration);

    const bool same = a.events == b.events && a.ticks == b.ticks && a.kpis.same_outcome(b.kpis) &&
                      pool == a.events && archive == a.ticks && replayed.same_outcome(a.kpis);
    if (!same) broken += name + " ";
    ok = ok && same;
  }
  report(5, "determinism and replay", ok,
         ok ? "six baselines, seed 7: pools, tick archives and KPIs identical"
            : "mismatch for " + broken);
}

void criterion_conservation(const MineConfig& config) {
  bool monotone = true, balance = true, exact = true, penalties = true, baseline = true;
  const Network net = Network::build(config);

  MineConfig calm = config;
  for (auto& f : calm.charging.fleets) f.hazard.lambda = 0.0;
  for (auto& s : calm.load_sites) {
    for (auto& v : s.shovels) v.hazard.lambda = 0.0;
  }
  calm.roads.maintenance.lambda = 0.0;
  calm.roads.jam.jam_probability = 0.0;
  MineConfig plain = calm;
  for (auto& f : plain.charging.fleets) f.hazard = {};
  for (auto& s : plain.load_sites) {
    for (auto& v : s.shovels) v.hazard = {};
  }
  plain.roads.maintenance = {};
  plain.roads.penalty_mean = plain.roads.penalty_std = 0.0;
  plain.roads.jam = {};

  for (const auto& name : kBaselines) {
    auto p = dispatch::make_policy(name);
    const auto r = run_simulation(config, *p, 3, 240.0);
    const auto& curve = r.kpis.production_curve;
    for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i - 1].value <= curve[i].value;
    balance = balance && r.mass.unloaded <= r.mass.loaded &&
              std::abs(r.mass.loaded - (r.mass.unloaded + r.mass.in_transit + r.mass.lost)) < 1e-6;

    std::map<std::uint32_t, bool> pending;
    for (const auto& rec : r.events.records()) {
      if ((rec.kind == RecordKind::Jam || rec.kind == RecordKind::MaintenancePenalty) &&
          rec.amount > 0.0) {
        pending[rec.subject] = true;
      }
      if (rec.kind != RecordKind::Depart || rec.target < 0) continue;
      const double base =
          net.roads[rec.target].distance / net.trucks[rec.subject].speed;
      penalties = penalties && (pending[rec.subject] ? rec.amount > base : rec.amount == base);
      pending[rec.subject] = false;
    }

    auto q1 = dispatch::make_policy(name);
    auto q2 = dispatch::make_policy(name);
    const auto z = run_simulation(calm, *q1, 3, 240.0);
    const auto k = run_simulation(plain, *q2, 3, 240.0);
    exact = exact && z.mass.lost == 0.0 && z.mass.loaded == z.mass.unloaded + z.mass.in_transit;
    baseline = baseline && z.events == k.events && z.ticks.records == k.ticks.records;
  }
  report(6, "conservation and monotonicity", monotone && balance && exact && penalties && baseline,
         fmt::format("curve non-decreasing {}, mass balance {}, fault-free equality {}, "
                     "penalties lengthen trips {}, zero-probability run equals kinematic run {}",
                     monotone, balance, exact, penalties, baseline));
}

void criterion_adl(const Grid& grid) {
  kpi::DecisionLog a;
  a.init_durations = {0.0};
  a.order_durations.assign(100, 0.001);
  kpi::DecisionLog b;
  b.init_durations = {3.0, 3.0};
  b.order_durations.assign(10, 0.01);
  const bool units = std::abs(*kpi::adl(a) - 0.001) < 1e-12 && std::abs(*kpi::adl(b) - 0.61) < 1e-12;
  double worst = 0.0;
  for (const auto& [name, cells] : grid) {
    for (const auto& c : cells) worst = std::max(worst, c.adl);
  }
  report(7, "average decision latency", units && worst < 0.05,
         fmt::format("unit cases {:.6f} s and {:.6f} s, worst measured {:.4f} ms/order",
                     *kpi::adl(a), *kpi::adl(b), worst * 1000.0));
}

void criterion_single_truck() {
  MineConfig c;
  c.name = "single";
  c.charging.position = {0, 0};
  c.charging.fleets.push_back({"T40", 1, 40.0, 0.5, {}});
  LoadSiteConfig load;
  load.name = "load";
  load.position = {3, 4};
  load.shovels.push_back({"S10", 1, 10.0, 1.0, {}});
  c.load_sites.push_back(load);
  DumpSiteConfig dump;
  dump.name = "dump";
  dump.position = {3, 8};
  dump.spots.push_back({1, 2.0});
  c.dump_sites.push_back(dump);
  c.roads.charging_to_load = std::vector<double>{4.0};
  c.roads.load_to_dump = std::vector<std::vector<double>>{{4.0}};

  // ceil(40/10) buckets of 1 min, 8 min each way, 2 min unload.
  const double cycle = 4.0 * 1.0 + 4.0 / 0.5 + 2.0 + 4.0 / 0.5;
  bool ok = true;
  std::string detail;
  for (double d : {22.0, 60.0, 100.0, 240.0, 480.0}) {
    for (const auto& name : kBaselines) {
      auto p = dispatch::make_policy(name);
      const auto r = run_simulation(c, *p, 1, d);
      const double expected = std::floor(d / cycle) * 40.0;
      if (r.kpis.produced_tons != expected) {
        ok = false;
        detail += fmt::format("{}@{}: {} != {}; ", name, d, r.kpis.produced_tons, expected);
      }
    }
  }
  report(8, "single-truck closed form", ok,
         ok ? fmt::format("cycle {} min, five horizons, six policies", cycle) : detail);
}

}  // namespace

int main() {
  const auto config = reference();
  const auto grid = run_baselines(config, 10);
  criterion_ranking(grid);
  criterion_signatures(grid);
  criterion_match_factor();
  criterion_calibration();
  criterion_determinism(config);
  criterion_conservation(config);
  criterion_adl(grid);
  criterion_single_truck();
  std::cout << (failures == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
