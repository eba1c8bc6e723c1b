#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <type_traits>

#include "minesim/kpi.hpp"
#include "minesim/report.hpp"
#include "minesim/simulation.hpp"
#include "support.hpp"

using namespace minesim;
using namespace minesim::kpi;

namespace {

SimResult run(const MineConfig& c, std::string_view policy, std::uint64_t seed, double duration) {
  auto p = dispatch::make_policy(policy);
  return run_simulation(c, *p, seed, duration);
}

}  // namespace

TEST_CASE("homogeneous balanced fleet has match factor one") {
  FleetSpec spec{{10.0}, {1.0}, {{5.0}}, 50.0};
  CHECK(std::abs(match_factor(spec) - 1.0) < 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n(1, 80);
  std::uniform_int_distribution<int> tenths(1, 200);
  for (int trial = 0; trial < 1000; ++trial) {
    const double trucks = n(rng);
    const double shovels = n(rng) % 8 + 1;
    const double ult = tenths(rng) / 10.0;
    FleetSpec s{{trucks}, {shovels}, {{ult}}, trucks * ult / shovels};
    CHECK(std::abs(match_factor(s) - 1.0) < 1e-9);
  }
}

TEST_CASE("heterogeneous match factor agrees with a literal evaluation") {
  const std::vector<std::vector<long>> ult = {{4, 6}, {8, 12}};
  const std::vector<double> shovels = {1, 1};
  const std::vector<double> trucks = {3, 2};
  const double cycle = 60.0;

  // Literal formula on integer loading times.
  double sum_lcm = 0.0;
  double denominator = 0.0;
  for (std::size_t i = 0; i < ult.size(); ++i) {
    const long l = std::lcm(ult[i][0], ult[i][1]);
    sum_lcm += static_cast<double>(l);
    for (std::size_t j = 0; j < shovels.size(); ++j) {
      denominator += shovels[j] * static_cast<double>(l) / static_cast<double>(ult[i][j]);
    }
  }
  const double oracle = (trucks[0] + trucks[1]) * sum_lcm / (denominator * cycle);
  CHECK(oracle == doctest::Approx(0.3));

  FleetSpec spec{trucks, shovels, {{4, 6}, {8, 12}}, cycle};
  CHECK(std::abs(match_factor(spec) - oracle) < 1e-9);
}

TEST_CASE("match factor is linear in the truck count") {
  FleetSpec spec{{3, 2}, {1, 2}, {{4, 6.5}, {8.2, 12}}, 45.0};
  const double base = match_factor(spec);
  for (double k : {2.0, 3.0, 10.0}) {
    FleetSpec scaled = spec;
    for (auto& c : scaled.truck_counts) c *= k;
    CHECK(match_factor(scaled) == doctest::Approx(k * base).epsilon(1e-12));
  }
}

TEST_CASE("match factor rejects non-positive inputs") {
  CHECK_THROWS_AS(match_factor({{10}, {1}, {{5}}, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(match_factor({{10}, {0}, {{5}}, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(match_factor({{10}, {1}, {{-5}}, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(match_factor({{0}, {1}, {{5}}, 50.0}), std::invalid_argument);
  CHECK_THROWS_AS(match_factor({{}, {1}, {}, 50.0}), std::invalid_argument);
}

TEST_CASE("fleet spec from config groups distinct shovel kinds") {
  const auto c = parse_config(testing::scenario("reference_mine.json"));
  const auto spec = fleet_spec_from_config(c);
  CHECK(spec.truck_counts == std::vector<double>{30, 25, 16});
  CHECK(spec.shovel_counts.size() == 4);
  CHECK(std::accumulate(spec.shovel_counts.begin(), spec.shovel_counts.end(), 0.0) == 21.0);
  CHECK(spec.ult.size() == 3);
}

TEST_CASE("average decision latency") {
  DecisionLog one;
  one.init_durations = {0.0};
  one.order_durations.assign(100, 0.001);
  CHECK(adl(one).value() == doctest::Approx(0.001).epsilon(1e-12));

  DecisionLog two;
  two.init_durations = {3.0, 3.0};
  two.order_durations.assign(10, 0.01);
  CHECK(adl(two).value() == doctest::Approx(0.61).epsilon(1e-12));

  DecisionLog none;
  none.init_durations = {1.0};
  CHECK_FALSE(adl(none).has_value());

  DecisionLog shuffled = two;
  shuffled.order_durations = {0.5, 0.001, 0.02, 0.3};
  auto reversed = shuffled;
  std::reverse(reversed.order_durations.begin(), reversed.order_durations.end());
  CHECK(adl(shuffled).value() == doctest::Approx(adl(reversed).value()).epsilon(1e-15));
}

TEST_CASE("production curve steps at each unload") {
  EventPool empty;
  CHECK(production_curve(empty) == Series{{0, 0}});
  CHECK(produced_tons(empty) == 0.0);

  EventPool pool;
  EventRecord r;
  r.time = 30.0;
  r.kind = RecordKind::UnloadComplete;
  r.amount = 40.0;
  pool.append(r);
  const auto curve = production_curve(pool);
  CHECK(curve == Series{{0, 0}, {30, 40}});
  CHECK(value_at(curve, 29.999) == 0.0);
  CHECK(value_at(curve, 30.0) == 40.0);
  CHECK(value_at(curve, 1000.0) == 40.0);
}

TEST_CASE("production curve ends at the tons received by the dumps") {
  const auto c = parse_config(testing::scenario("reference_mine.json"));
  for (const auto* name : {"SQDispatcher", "FixedGroupDispatcher"}) {
    const auto r = run(c, name, 4, 240.0);
    const auto& curve = r.kpis.production_curve;
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i - 1].value <= curve[i].value);
    double dumped = 0.0;
    for (const auto& d : r.ticks.records.back().dump_sites) dumped += d.tons;
    CHECK(curve.back().value == doctest::Approx(dumped));
    CHECK(r.kpis.produced_tons == curve.back().value);
  }
}

TEST_CASE("one truck never waits") {
  auto c = testing::small_mine();
  const auto r = run(c, "NaiveDispatcher", 1, 240.0);
  CHECK(r.kpis.total_wait_time == 0.0);
  CHECK(r.kpis.produced_tons > 0.0);
}

TEST_CASE("two trucks arriving together wait one loading time in total") {
  auto c = testing::small_mine(2);
  c.load_sites[0].shovels[0].cycle_time = 1.25;  // 4 buckets, 5 minutes
  const auto r = run(c, "NaiveDispatcher", 1, 30.0);
  CHECK(r.kpis.total_wait_time == doctest::Approx(5.0));
}

TEST_CASE("total wait equals the area under the waiting-truck curve") {
  const auto c = parse_config(testing::scenario("reference_mine.json"));
  for (const auto& name : dispatch::registered_policies()) {
    CAPTURE(name);
    const auto r = run(c, name, 6, 240.0);
    CHECK(r.kpis.total_wait_time >= 0.0);
    CHECK(r.kpis.total_wait_time ==
          doctest::Approx(integrate_steps(r.kpis.waiting_curve, 240.0)).epsilon(1e-9));
  }
}

TEST_CASE("observed cycle time of a lone truck is its analytic cycle") {
  auto c = testing::small_mine();
  const auto r = run(c, "NaiveDispatcher", 1, 240.0);
  REQUIRE(observed_cycle_time(r.events).has_value());
  CHECK(*observed_cycle_time(r.events) == doctest::Approx(22.0));
  auto spec = fleet_spec_from_config(c);
  spec.truck_cycle_time = 22.0;
  CHECK(r.kpis.match_factor.value() == doctest::Approx(match_factor(spec)));
}

TEST_CASE("custom indicators see the whole pool read-only") {
  auto mutating = [](EventPool& p) { return static_cast<double>(p.size()); };
  static_assert(!std::is_constructible_v<Indicator, decltype(mutating)>);

  clear_indicators();
  register_indicator("unloads", [](const EventPool& p) {
    double n = 0;
    for (const auto& r : p.records()) n += r.kind == RecordKind::UnloadComplete ? 1 : 0;
    return n;
  });
  register_indicator("records", [](const EventPool& p) { return static_cast<double>(p.size()); });
  CHECK(registered_indicators() == std::vector<std::string>{"records", "unloads"});
  const auto r = run(testing::small_mine(), "NaiveDispatcher", 1, 240.0);
  CHECK(r.kpis.custom.at("unloads") == r.kpis.produced_tons / 40.0);
  CHECK(r.kpis.custom.at("records") == static_cast<double>(r.events.size()));
  const auto csv = to_csv(std::vector<ReportRow>{row_for(r)});
  CHECK(csv.find(",records,unloads\n") != std::string::npos);
  clear_indicators();
  CHECK(registered_indicators().empty());
}

TEST_CASE("summary report averages per policy and sorts by tons") {
  const auto c = parse_config(testing::scenario("reference_mine.json"));
  std::vector<SimResult> runs;
  for (const auto* name : {"NaiveDispatcher", "FixedGroupDispatcher", "SQDispatcher"}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) runs.push_back(run(c, name, seed, 120.0));
  }
  const auto report = summary_report(runs);
  REQUIRE(report.rows.size() == 3);
  REQUIRE(report.per_seed.size() == 9);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i - 1].produced_tons >= report.rows[i].produced_tons);
  }
  for (const auto& row : report.rows) {
    CHECK(row.runs == 3);
    CHECK_FALSE(row.seed.has_value());
    double tons = 0, wait = 0, jams = 0;
    for (const auto& r : runs) {
      if (r.policy != row.name) continue;
      tons += r.kpis.produced_tons;
      wait += r.kpis.total_wait_time;
      jams += static_cast<double>(r.kpis.road_jams);
    }
    CHECK(row.produced_tons == doctest::Approx(tons / 3));
    CHECK(row.total_wait_time == doctest::Approx(wait / 3));
    CHECK(row.road_jams == doctest::Approx(jams / 3));
  }
  const auto header = to_csv(report.rows).substr(0, to_csv(report.rows).find('\n'));
  CHECK(header == "policy,seed,runs,produced_tons,match_factor,total_wait_time,road_jams,adl_ms");
  CHECK(to_markdown(report.rows).find("| Policy | Runs | Produced tons | Match factor") == 0);

  const auto single = summary_report(std::span<const SimResult>(runs.data(), 1));
  CHECK(single.rows.size() == 1);
  CHECK_THROWS_AS(summary_report(std::span<const SimResult>{}), std::invalid_argument);
}
