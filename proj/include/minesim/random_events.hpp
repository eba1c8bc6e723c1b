#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace minesim {

using Rng = std::mt19937_64;

// Independent substreams so that adding an entity never perturbs the draws of
// another one.
enum class StreamClass : std::uint64_t {
  Policy = 1,
  TruckHazard = 2,
  ShovelHazard = 3,
  RoadHazard = 4,
  RoadJam = 5,
};

std::uint64_t splitmix64(std::uint64_t x);
Rng derive_stream(std::uint64_t seed, StreamClass cls, std::uint64_t entity = 0);

namespace events {

// Traffic jam model. Positions are expressed in journey completion rate [0,1].
struct JamParams {
  double mu{0.0};     // offset of each mixture component from the truck's position
  double sigma{0.1};  // spread of each component
  double jam_probability{0.0};
  double weibull_shape{2.0};
  double weibull_scale{10.0};  // minutes

  bool operator==(const JamParams&) const = default;
};

// Availability model shared by trucks, shovels and roads. `lambda` is a
// per-minute rate; zero disables the hazard entirely.
struct HazardParams {
  double lambda{0.0};
  double repair_mean{10.0};  // minutes
  double repair_std{0.0};
  double breakdown_probability{0.0};  // share of faults that are terminal

  bool operator==(const HazardParams&) const = default;
};

enum class EventKind : std::uint8_t {
  Jam,
  RoadMaintenance,
  TruckRepair,
  TruckBreakdown,
  ShovelRepair,
  ShovelBreakdown,
};

enum class SubjectClass : std::uint8_t { Truck, Shovel, Road };

struct Subject {
  SubjectClass cls{SubjectClass::Truck};
  std::uint32_t id{};

  bool operator==(const Subject&) const = default;
};

struct RandomEvent {
  EventKind kind{EventKind::Jam};
  Subject subject{};
  double start{0.0};
  std::optional<double> duration;  // absent for breakdowns
  double penalty_fraction{0.0};

  bool operator==(const RandomEvent&) const = default;
};

std::string_view to_string(EventKind kind);
bool is_terminal(EventKind kind);

// Completion-weighted mixture of normals, one component per truck on the road,
// each truncated to [0,1] and renormalized.
class JamDensity {
 public:
  JamDensity(std::vector<double> centers, std::vector<double> weights, double sigma);

  double pdf(double c) const;
  double cdf(double c) const;
  double sample(Rng& rng) const;

  std::span<const double> centers() const { return centers_; }
  std::span<const double> weights() const { return weights_; }
  double sigma() const { return sigma_; }

 private:
  std::vector<double> centers_;
  std::vector<double> weights_;  // normalized to sum 1
  std::vector<double> lower_cdf_;  // Phi((0 - center) / sigma)
  std::vector<double> mass_;       // Phi((1 - center) / sigma) - lower_cdf_
  double sigma_;
};

// Returns nullopt for an empty road ("no jam possible"). When every truck has
// just departed (all rates zero) the components are weighted uniformly.
std::optional<JamDensity> jam_position_density(std::span<const double> completion_rates,
                                               const JamParams& params);

struct JamOutcome {
  double position{0.0};   // completion rate at which the jam sits
  double duration{0.0};   // minutes, from the moment of departure
  double reach_time{0.0}; // minutes after departure when the truck reaches the jam
  double delay{0.0};      // residual jam time, zero when unaffected
  bool affected{false};

  bool operator==(const JamOutcome&) const = default;
};

// The truck is held iff it reaches the jam strictly before the jam clears.
JamOutcome resolve_jam(double position, double duration, double travel_time);

// Called once per departure. `others` are the completion rates of the trucks
// already on the road. Returns nullopt when no jam is drawn.
std::optional<JamOutcome> sample_jam(const JamParams& params, std::span<const double> others,
                                     double travel_time, Rng& rng);

// Draws x ~ Exp(lambda) and fires a fault iff x < t. For the kernel `t` is the
// unit check interval (one minute).
std::optional<RandomEvent> sample_availability(const HazardParams& params, Subject subject,
                                               double t, double now, Rng& rng);

double sample_repair_duration(double mean, double std, Rng& rng);
double sample_penalty_fraction(double mean, double std, Rng& rng);
double sample_weibull(double shape, double scale, Rng& rng);

}  // namespace events
}  // namespace minesim
