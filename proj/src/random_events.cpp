#include "minesim/random_events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "minesim/ids.hpp"

namespace minesim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec2 lerp(Vec2 a, Vec2 b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng derive_stream(std::uint64_t seed, StreamClass cls, std::uint64_t entity) {
  const auto a = splitmix64(seed);
  const auto b = splitmix64(a ^ (static_cast<std::uint64_t>(cls) << 56));
  const auto c = splitmix64(b ^ entity);
  return Rng{c};
}

namespace events {
namespace {

const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Jam: return "Jam";
    case EventKind::RoadMaintenance: return "RoadMaintenance";
    case EventKind::TruckRepair: return "TruckRepair";
    case EventKind::TruckBreakdown: return "TruckBreakdown";
    case EventKind::ShovelRepair: return "ShovelRepair";
    case EventKind::ShovelBreakdown: return "ShovelBreakdown";
  }
  return "?";
}

bool is_terminal(EventKind kind) {
  return kind == EventKind::TruckBreakdown || kind == EventKind::ShovelBreakdown;
}

JamDensity::JamDensity(std::vector<double> centers, std::vector<double> weights, double sigma)
    : centers_(std::move(centers)), weights_(std::move(weights)), sigma_(sigma) {
  if (centers_.empty() || centers_.size() != weights_.size()) {
    throw std::invalid_argument("jam density needs one weight per component");
  }
  if (!(sigma_ > 0.0)) throw std::invalid_argument("jam density sigma must be > 0");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("jam density weights must sum to > 0");
  for (auto& w : weights_) w /= total;

  lower_cdf_.reserve(centers_.size());
  mass_.reserve(centers_.size());
  for (double c : centers_) {
    const double lo = boost::math::cdf(kStdNormal, (0.0 - c) / sigma_);
    const double hi = boost::math::cdf(kStdNormal, (1.0 - c) / sigma_);
    lower_cdf_.push_back(lo);
    mass_.push_back(hi - lo);
  }
}

double JamDensity::pdf(double c) const {
  if (c < 0.0 || c > 1.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (mass_[i] < 1e-12) continue;
    acc += weights_[i] * boost::math::pdf(kStdNormal, (c - centers_[i]) / sigma_) /
           (sigma_ * mass_[i]);
  }
  return acc;
}

double JamDensity::cdf(double c) const {
  if (c <= 0.0) return 0.0;
  if (c >= 1.0) return 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (mass_[i] < 1e-12) {
      // Component collapsed onto the nearest end of the road.
      acc += weights_[i] * (std::clamp(centers_[i], 0.0, 1.0) <= c ? 1.0 : 0.0);
      continue;
    }
    const double at = boost::math::cdf(kStdNormal, (c - centers_[i]) / sigma_);
    acc += weights_[i] * (at - lower_cdf_[i]) / mass_[i];
  }
  return acc;
}

double JamDensity::sample(Rng& rng) const {
  // Pick a component by weight, then invert its truncated CDF.
  const double pick = uniform01(rng);
  std::size_t k = 0;
  double cumulative = weights_[0];
  while (pick >= cumulative && k + 1 < weights_.size()) {
    ++k;
    cumulative += weights_[k];
  }
  const double u = uniform01(rng);
  if (mass_[k] < 1e-12) return std::clamp(centers_[k], 0.0, 1.0);
  const double p = std::clamp(lower_cdf_[k] + u * mass_[k], 1e-300, 1.0 - 1e-16);
  const double x = centers_[k] + sigma_ * boost::math::quantile(kStdNormal, p);
  return std::clamp(x, 0.0, 1.0);
}

std::optional<JamDensity> jam_position_density(std::span<const double> completion_rates,
                                               const JamParams& params) {
  if (completion_rates.empty()) return std::nullopt;
  std::vector<double> centers;
  std::vector<double> weights;
  centers.reserve(completion_rates.size());
  weights.reserve(completion_rates.size());
  double total = 0.0;
  for (double c : completion_rates) {
    centers.push_back(c + params.mu);
    weights.push_back(c);
    total += c;
  }
  if (!(total > 0.0)) std::fill(weights.begin(), weights.end(), 1.0);
  return JamDensity(std::move(centers), std::move(weights), params.sigma);
}

JamOutcome resolve_jam(double position, double duration, double travel_time) {
  JamOutcome out;
  out.position = position;
  out.duration = duration;
  out.reach_time = position * travel_time;
  out.affected = out.reach_time < duration;
  out.delay = out.affected ? duration - out.reach_time : 0.0;
  return out;
}

double sample_weibull(double shape, double scale, Rng& rng) {
  return std::weibull_distribution<double>(shape, scale)(rng);
}

std::optional<JamOutcome> sample_jam(const JamParams& params, std::span<const double> others,
                                     double travel_time, Rng& rng) {
  if (params.jam_probability <= 0.0) return std::nullopt;
  const auto density = jam_position_density(others, params);
  if (!density) return std::nullopt;
  if (uniform01(rng) >= params.jam_probability) return std::nullopt;
  const double position = density->sample(rng);
  const double duration = sample_weibull(params.weibull_shape, params.weibull_scale, rng);
  return resolve_jam(position, duration, travel_time);
}

double sample_repair_duration(double mean, double std, Rng& rng) {
  if (std <= 0.0) return std::max(0.0, mean);
  return std::max(0.0, std::normal_distribution<double>(mean, std)(rng));
}

double sample_penalty_fraction(double mean, double std, Rng& rng) {
  return sample_repair_duration(mean, std, rng);
}

std::optional<RandomEvent> sample_availability(const HazardParams& params, Subject subject,
                                               double t, double now, Rng& rng) {
  if (params.lambda <= 0.0) return std::nullopt;
  const double x = std::exponential_distribution<double>(params.lambda)(rng);
  if (!(x < t)) return std::nullopt;

  const bool terminal =
      subject.cls != SubjectClass::Road && uniform01(rng) < params.breakdown_probability;
  RandomEvent ev;
  ev.subject = subject;
  ev.start = now;
  switch (subject.cls) {
    case SubjectClass::Truck:
      ev.kind = terminal ? EventKind::TruckBreakdown : EventKind::TruckRepair;
      break;
    case SubjectClass::Shovel:
      ev.kind = terminal ? EventKind::ShovelBreakdown : EventKind::ShovelRepair;
      break;
    case SubjectClass::Road:
      ev.kind = EventKind::RoadMaintenance;
      break;
  }
  if (!terminal) ev.duration = sample_repair_duration(params.repair_mean, params.repair_std, rng);
  return ev;
}

}  // namespace events
}  // namespace minesim
