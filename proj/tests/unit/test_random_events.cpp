#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "minesim/random_events.hpp"
#include "minesim/simulation.hpp"
#include "support.hpp"

using namespace minesim;
using namespace minesim::events;

namespace {

MineConfig reference() { return parse_config(testing::scenario("reference_mine.json")); }

// Every stochastic knob set to "never", with other parameters left non-trivial.
MineConfig zero_probability(MineConfig c) {
  for (auto& f : c.charging.fleets) f.hazard.lambda = 0.0;
  for (auto& s : c.load_sites) {
    for (auto& v : s.shovels) v.hazard.lambda = 0.0;
  }
  c.roads.maintenance.lambda = 0.0;
  c.roads.jam.jam_probability = 0.0;
  return c;
}

// Same mine with the stochastic sections reset to defaults.
MineConfig kinematic(MineConfig c) {
  for (auto& f : c.charging.fleets) f.hazard = {};
  for (auto& s : c.load_sites) {
    for (auto& v : s.shovels) v.hazard = {};
  }
  c.roads.maintenance = {};
  c.roads.penalty_mean = 0.0;
  c.roads.penalty_std = 0.0;
  c.roads.jam = {};
  return c;
}

}  // namespace

TEST_CASE("fault trigger frequency follows the exponential CDF") {
  Rng rng = derive_stream(2024, StreamClass::TruckHazard, 0);
  const HazardParams h{0.01, 10.0, 2.0, 0.0};
  const int n = 1'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_availability(h, {}, 100.0, 0.0, rng) ? 1 : 0;
  const double p = 1.0 - std::exp(-0.01 * 100.0);
  const double freq = static_cast<double>(hits) / n;
  CHECK(p == doctest::Approx(0.6321).epsilon(1e-4));
  CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));
  CHECK(std::abs(freq - p) / p < 0.005);
}

TEST_CASE("a vanishing rate never fires") {
  Rng rng(1);
  HazardParams h{};
  for (int i = 0; i < 10000; ++i) CHECK_FALSE(sample_availability(h, {}, 1.0, 0.0, rng));
  h.lambda = 1e-12;
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += sample_availability(h, {}, 1.0, 0.0, rng) ? 1 : 0;
  CHECK(hits == 0);
}

TEST_CASE("repairs carry a non-negative duration, breakdowns none") {
  Rng rng(5);
  HazardParams h{5.0, 1.0, 3.0, 0.5};
  int breakdowns = 0;
  for (int i = 0; i < 5000; ++i) {
    auto ev = sample_availability(h, {SubjectClass::Shovel, 2}, 1.0, 7.0, rng);
    if (!ev) continue;
    CHECK(ev->subject == Subject{SubjectClass::Shovel, 2});
    CHECK(ev->start == 7.0);
    if (ev->kind == EventKind::ShovelBreakdown) {
      ++breakdowns;
      CHECK_FALSE(ev->duration.has_value());
    } else {
      REQUIRE(ev->kind == EventKind::ShovelRepair);
      REQUIRE(ev->duration.has_value());
      CHECK(*ev->duration >= 0.0);
    }
  }
  CHECK(breakdowns > 0);
  // Roads are only ever maintained.
  for (int i = 0; i < 1000; ++i) {
    auto ev = sample_availability(h, {SubjectClass::Road, 0}, 1.0, 0.0, rng);
    if (ev) CHECK(ev->kind == EventKind::RoadMaintenance);
  }
}

TEST_CASE("jam density is a proper density on [0,1]") {
  const JamParams p{0.0, 0.1, 1.0, 2.0, 5.0};
  CHECK_FALSE(jam_position_density(std::vector<double>{}, p).has_value());
  const std::vector<std::vector<double>> cases = {
      {0.5}, {0.2, 0.8}, {0.0, 0.0}, {0.02, 0.97, 0.5}, {1.0}, {0.1, 0.3, 0.3, 0.9}};
  for (const auto& rates : cases) {
    const auto d = jam_position_density(rates, p);
    REQUIRE(d.has_value());
    // Composite Simpson on a fine grid.
    const int n = 20000;
    const double h = 1.0 / n;
    double s = d->pdf(0.0) + d->pdf(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * d->pdf(i * h);
    CHECK(std::abs(s * h / 3.0 - 1.0) < 1e-6);
    CHECK(d->cdf(1.0) == 1.0);
    CHECK(d->cdf(0.0) == 0.0);
  }
}

TEST_CASE("one truck gives a single truncated normal at its position") {
  const auto d = jam_position_density(std::vector<double>{0.5}, {0.0, 0.1, 1.0, 2.0, 5.0});
  REQUIRE(d);
  CHECK(d->centers().size() == 1);
  CHECK(d->cdf(0.5) == doctest::Approx(0.5));
  CHECK(d->pdf(0.4) == doctest::Approx(d->pdf(0.6)));
}

TEST_CASE("mixture weights follow completion rates, uniform when all are zero") {
  const JamParams p{0.0, 0.1, 1.0, 2.0, 5.0};
  auto d = jam_position_density(std::vector<double>{0.2, 0.8}, p);
  CHECK(d->weights()[0] == doctest::Approx(0.2));
  CHECK(d->weights()[1] == doctest::Approx(0.8));
  d = jam_position_density(std::vector<double>{0.0, 0.0, 0.0}, p);
  for (double w : d->weights()) CHECK(w == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("sampled jam positions match the closed-form mixture") {
  const auto d = jam_position_density(std::vector<double>{0.2, 0.8}, {0.0, 0.1, 1.0, 2.0, 5.0});
  Rng rng(77);
  const int n = 1'000'000;
  const int bins = 20;
  std::vector<double> hist(bins, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = d->sample(rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    hist[std::min(bins - 1, static_cast<int>(x * bins))] += 1.0;
  }
  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double expected = d->cdf((b + 1.0) / bins) - d->cdf(static_cast<double>(b) / bins);
    l1 += std::abs(hist[b] / n - expected);
  }
  CHECK(l1 < 0.01);
}

TEST_CASE("a truck reaching the jam as it clears is not held") {
  const auto o = resolve_jam(0.5, 10.0, 20.0);
  CHECK(o.reach_time == 10.0);
  CHECK_FALSE(o.affected);
  CHECK(o.delay == 0.0);

  const auto held = resolve_jam(0.25, 10.0, 20.0);
  CHECK(held.affected);
  CHECK(held.delay == doctest::Approx(5.0));
}

TEST_CASE("zero jam probability never jams") {
  JamParams p{0.0, 0.1, 0.0, 2.0, 5.0};
  Rng rng(3);
  const std::vector<double> others{0.3, 0.6};
  for (int i = 0; i < 10000; ++i) CHECK_FALSE(sample_jam(p, others, 10.0, rng));
  p.jam_probability = 1.0;
  CHECK_FALSE(sample_jam(p, std::vector<double>{}, 10.0, rng));
}

TEST_CASE("mean jam delay agrees with a direct Monte-Carlo of the same procedure") {
  const JamParams p{0.0, 0.05, 1.0, 2.0, 15.0};
  const std::vector<double> others{0.3, 0.6};
  const double travel = 20.0;
  const int n = 100'000;

  Rng rng(8);
  double library = 0.0;
  for (int i = 0; i < n; ++i) {
    auto jam = sample_jam(p, others, travel, rng);
    REQUIRE(jam);
    library += jam->delay;
  }
  library /= n;

  // Rejection-sampled truncated normals and inverse-CDF Weibull draws.
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  double direct = 0.0;
  for (int i = 0; i < n; ++i) {
    const double center = u(gen) < 0.3 / 0.9 ? 0.3 : 0.6;
    double pos;
    do {
      pos = center + 0.05 * z(gen);
    } while (pos < 0.0 || pos > 1.0);
    const double dur = 15.0 * std::pow(-std::log(1.0 - u(gen)), 1.0 / 2.0);
    direct += std::max(0.0, dur - pos * travel);
  }
  direct /= n;
  CHECK(std::abs(library - direct) / direct < 0.02);
}

TEST_CASE("Weibull samples have the analytic mean") {
  Rng rng(11);
  for (auto [shape, scale] : {std::pair{2.0, 15.0}, std::pair{1.5, 5.0}}) {
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_weibull(shape, scale, rng);
    const double expected = scale * std::tgamma(1.0 + 1.0 / shape);
    CHECK(std::abs(sum / n - expected) / expected < 0.01);
  }
}

TEST_CASE("derived streams are reproducible and distinct") {
  auto a = derive_stream(1, StreamClass::TruckHazard, 3);
  auto b = derive_stream(1, StreamClass::TruckHazard, 3);
  auto c = derive_stream(1, StreamClass::TruckHazard, 4);
  auto d = derive_stream(1, StreamClass::ShovelHazard, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("terminal faults happen once and nothing follows them") {
  auto c = reference();
  for (auto& f : c.charging.fleets) f.hazard = {0.02, 5.0, 1.0, 1.0};
  for (auto& s : c.load_sites) {
    for (auto& v : s.shovels) v.hazard = {0.01, 5.0, 1.0, 1.0};
  }
  for (const auto* name : {"SQDispatcher", "NaiveDispatcher"}) {
    CAPTURE(name);
    auto policy = dispatch::make_policy(name);
    const auto r = run_simulation(c, *policy, 5, 240.0);
    std::set<std::uint32_t> broken_trucks;
    std::set<std::uint32_t> broken_shovels;
    for (const auto& rec : r.events.records()) {
      const bool truck_subject = rec.subject_kind == SubjectKind::Truck;
      if (truck_subject) CHECK_FALSE(broken_trucks.count(rec.subject));
      if (rec.subject_kind == SubjectKind::Shovel) CHECK_FALSE(broken_shovels.count(rec.subject));
      if (rec.kind == RecordKind::LoadStart) CHECK_FALSE(broken_shovels.count(
          static_cast<std::uint32_t>(rec.target)));
      if (rec.kind == RecordKind::TruckBreakdown) broken_trucks.insert(rec.subject);
      if (rec.kind == RecordKind::ShovelBreakdown) broken_shovels.insert(rec.subject);
      CHECK(rec.kind != RecordKind::TruckRepair);
      CHECK(rec.kind != RecordKind::ShovelRepair);
    }
    CHECK_FALSE(broken_trucks.empty());
    CHECK_FALSE(broken_shovels.empty());
    for (auto id : broken_trucks) CHECK(r.ticks.records.back().trucks[id].state == TruckState::Broken);
  }
}

TEST_CASE("heavy breakdowns never produce more than a fault-free run") {
  const auto base = kinematic(reference());
  auto harsh = base;
  for (auto& f : harsh.charging.fleets) f.hazard = {0.05, 10.0, 2.0, 1.0};
  for (auto& s : harsh.load_sites) {
    for (auto& v : s.shovels) v.hazard = {0.05, 10.0, 2.0, 1.0};
  }
  for (const auto& name : dispatch::registered_policies()) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      CAPTURE(name);
      CAPTURE(seed);
      auto p1 = dispatch::make_policy(name);
      auto p2 = dispatch::make_policy(name);
      const auto calm = run_simulation(base, *p1, seed, 240.0);
      const auto rough = run_simulation(harsh, *p2, seed, 240.0);
      CHECK(rough.kpis.produced_tons <= calm.kpis.produced_tons);
    }
  }
}

TEST_CASE("penalties only ever lengthen trips") {
  auto c = reference();
  c.roads.maintenance = {0.02, 30.0, 5.0, 0.0};
  c.roads.penalty_mean = 0.3;
  c.roads.penalty_std = 0.1;
  c.roads.jam.jam_probability = 0.6;
  const Network net = Network::build(c);
  std::vector<double> speed;
  for (const auto& t : net.trucks) speed.push_back(t.speed);

  auto policy = dispatch::make_policy("SQDispatcher");
  const auto r = run_simulation(c, *policy, 3, 240.0);
  std::size_t penalised = 0;
  std::map<std::uint32_t, bool> pending;  // truck -> penalty recorded for the next depart
  for (const auto& rec : r.events.records()) {
    if (rec.kind == RecordKind::Jam || rec.kind == RecordKind::MaintenancePenalty) {
      CHECK(rec.amount >= 0.0);
      if (rec.amount > 0.0) pending[rec.subject] = true;
    }
    if (rec.kind != RecordKind::Depart || rec.target < 0) continue;
    const double base = net.roads[rec.target].distance / speed[rec.subject];
    CHECK(rec.amount >= base);
    if (pending[rec.subject]) {
      CHECK(rec.amount > base);
      ++penalised;
    } else {
      CHECK(rec.amount == base);
    }
    pending[rec.subject] = false;
  }
  CHECK(penalised > 0);
  CHECK(r.kpis.road_jams > 0);
}

TEST_CASE("zero event probabilities reduce to the kinematic run exactly") {
  const auto ref = reference();
  const auto zero = zero_probability(ref);
  const auto plain = kinematic(ref);
  for (const auto* name : {"FixedGroupDispatcher", "SPTFDispatcher", "NearestDispatcher",
                           "NaiveDispatcher"}) {
    CAPTURE(name);
    auto p1 = dispatch::make_policy(name);
    auto p2 = dispatch::make_policy(name);
    auto p3 = dispatch::make_policy(name);
    const auto a = run_simulation(zero, *p1, 1, 240.0);
    const auto b = run_simulation(plain, *p2, 1, 240.0);
    const auto c = run_simulation(zero, *p3, 987654321, 240.0);
    CHECK(a.events == b.events);
    CHECK(a.events == c.events);
    CHECK(a.ticks.records == b.ticks.records);
    CHECK(a.kpis.same_outcome(b.kpis));
    CHECK(a.kpis.road_jams == 0);
  }
}
