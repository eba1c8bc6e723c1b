#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <spdlog/logger.h>

#include "minesim/config.hpp"
#include "minesim/dispatch.hpp"
#include "minesim/event_pool.hpp"
#include "minesim/kpi.hpp"
#include "minesim/random_events.hpp"
#include "minesim/tick_log.hpp"
#include "minesim/world.hpp"

namespace minesim {

struct RunOptions {
  std::shared_ptr<spdlog::logger> logger;  // null runs silently
  bool record_ticks{true};
};

struct MassBalance {
  double loaded{0.0};
  double unloaded{0.0};
  double in_transit{0.0};  // payload still on trucks at the horizon
  double lost{0.0};        // payload on trucks that broke down

  bool operator==(const MassBalance&) const = default;
};

struct SimResult {
  std::string policy;
  std::uint64_t seed{0};
  double duration{0.0};
  EventPool events;
  ticklog::TickArchive ticks;
  kpi::DecisionLog decisions;
  kpi::KpiSummary kpis;
  MassBalance mass;
  std::uint64_t policy_faults{0};
};

// Raised when a policy throws; the run is abandoned after the decision log and
// the text log are flushed.
class PolicyError : public std::runtime_error {
 public:
  PolicyError(const std::string& what, kpi::DecisionLog decisions);
  const kpi::DecisionLog& decisions() const { return decisions_; }

 private:
  kpi::DecisionLog decisions_;
};

// Single-threaded discrete-event kernel for one run. The clock advances in
// whole minutes: at each minute pending events are drained, availability
// hazards are sampled, then a tick is recorded.
class Simulation {
 public:
  Simulation(const MineConfig& config, dispatch::DispatchPolicy& policy, std::uint64_t seed,
             double duration, RunOptions options = {});
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Initializes the policy and issues the init orders at t = 0.
  void start();
  // Processes everything up to and including time `t`.
  void advance_to(double t);
  // Runs to the configured duration and collects the result.
  SimResult finish();
  SimResult run();

  // Appends the truck FIFO to the shovel queue and returns its position.
  // Starts loading immediately when the shovel is idle.
  std::size_t enqueue_at_shovel(TruckId truck, ShovelId shovel);
  // Faults on a subject that is not Up are ignored (and logged).
  void apply_fault(const events::RandomEvent& event);
  // Applies a state-machine trigger; an illegal trigger aborts the run with
  // std::logic_error.
  TruckState transition(TruckId truck, Trigger trigger);

  double now() const;
  const Network& network() const;
  const EventPool& events() const;
  const kpi::DecisionLog& decisions() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// Validates the config, runs one simulation and returns its artifacts.
SimResult run_simulation(const MineConfig& config, dispatch::DispatchPolicy& policy,
                         std::uint64_t seed, double duration, const RunOptions& options = {});

}  // namespace minesim
