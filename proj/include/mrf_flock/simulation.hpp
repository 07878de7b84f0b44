#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"
#include "mrf_flock/metrics.hpp"
#include "mrf_flock/mrf_controller.hpp"

namespace mrf_flock {

/// Leader-follower scenario: the leader (agent 0) waits at the origin while
/// the followers gather, then flies an S-curve at constant speed.
struct ScenarioConfig {
  std::size_t n_agents = 7;
  double dt = 0.05;
  std::size_t steps = 1400;
  double gather_duration = 10.0;
  double leader_speed = 0.2;
  double s_curve_amplitude = 0.9;  // heading swing, rad
  double s_curve_period = 25.0;    // s
  double spawn_radius = 2.5;       // m
  std::uint64_t rng_seed = 1;
  ControllerConfig controller;

  void validate() const {
    if (n_agents < 2) throw std::invalid_argument("n_agents must be >= 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(dt <= controller.discretization.t_p)) throw std::invalid_argument("dt must not exceed t_p");
    if (!(gather_duration >= 0.0)) throw std::invalid_argument("gather_duration must be >= 0");
    if (!(leader_speed >= 0.0) || !(leader_speed <= controller.bounds.v_max)) {
      throw std::invalid_argument("leader_speed must lie in [0, v_max]");
    }
    if (!(s_curve_period > 0.0)) throw std::invalid_argument("s_curve_period must be positive");
    if (!std::isfinite(s_curve_amplitude)) throw std::invalid_argument("s_curve_amplitude must be finite");
    controller.validate();
    if (!(spawn_radius >= 2.0 * desired_distance(controller.potentials))) {
      throw std::invalid_argument("spawn_radius must be at least twice the desired distance");
    }
  }
};

inline constexpr std::size_t kLeaderIndex = 0;

/// Leader reference velocity at time t.
inline Vec2 leader_velocity(double t, const ScenarioConfig& config) {
  if (t < config.gather_duration) return Vec2::Zero();
  const double phase = 2.0 * std::numbers::pi * (t - config.gather_duration) / config.s_curve_period;
  const double heading = config.s_curve_amplitude * std::sin(phase);
  return config.leader_speed * Vec2(std::cos(heading), std::sin(heading));
}

/// Leader state at time t. Positions accumulate the reference velocity tick
/// by tick, exactly as the simulator advances the leader; between ticks the
/// last tick velocity is held.
inline AgentState leader_reference(double t, const ScenarioConfig& config) {
  if (!(t >= 0.0)) throw std::invalid_argument("leader_reference: t must be >= 0");
  const auto ticks = static_cast<std::size_t>(std::floor(t / config.dt + 1e-9));
  AgentState s;
  for (std::size_t n = 0; n < ticks; ++n) s.position += leader_velocity(n * config.dt, config) * config.dt;
  const double t_tick = ticks * config.dt;
  s.position += leader_velocity(t_tick, config) * std::max(0.0, t - t_tick);
  s.velocity = leader_velocity(t, config);
  if (ticks > 0) s.last_input = (leader_velocity(t_tick, config) - leader_velocity(t_tick - config.dt, config)) / config.dt;
  return s;
}

/// Leader at the origin followed by n_agents - 1 followers at rest, drawn
/// uniformly (by area) from the annulus [2 d_t, spawn_radius] with pairwise
/// spacing of at least 2 r_coll.
inline std::vector<AgentState> spawn_followers(const ScenarioConfig& config) {
  constexpr int kMaxRejections = 10'000;
  const double inner = 2.0 * desired_distance(config.controller.potentials);
  const double outer = config.spawn_radius;
  const double spacing = 2.0 * config.controller.bounds.r_coll;

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<AgentState> agents(config.n_agents);
  int rejections = 0;
  for (std::size_t i = 1; i < config.n_agents;) {
    const double r = std::sqrt(inner * inner + unit(rng) * (outer * outer - inner * inner));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const Vec2 p = r * Vec2(std::cos(angle), std::sin(angle));
    bool clear = true;
    for (std::size_t j = 0; j < i && clear; ++j) clear = (agents[j].position - p).norm() >= spacing;
    if (clear) {
      agents[i].position = p;
      ++i;
    } else if (++rejections > kMaxRejections) {
      throw InfeasibleScenario("could not place followers with the required spacing");
    }
  }
  return agents;
}

struct AgentSummary {
  double u_avg = 0.0;
  double traj_length = 0.0;
};

/// Everything recorded during a run. Frame 0 is the initial condition and
/// frame n the state after tick n; each state's `last_input` is the
/// command applied during the tick that produced it.
struct SimulationLog {
  std::vector<double> times;
  std::vector<std::vector<AgentState>> frames;
  std::vector<MetricsRecord> metrics;
  std::vector<AgentSummary> summary;
  std::vector<bool> collision_free;  // per frame
  std::size_t speed_violations = 0;  // follower speeds above v_max + u_max dt
  std::size_t total_sweeps = 0;

  bool all_collision_free() const {
    for (bool ok : collision_free) {
      if (!ok) return false;
    }
    return true;
  }
};

inline MetricsRecord measure(double t, std::span<const AgentState> states, const NeighborGraph& graph) {
  std::vector<Vec2> positions, velocities;
  positions.reserve(states.size());
  velocities.reserve(states.size());
  MetricsRecord r;
  r.t = t;
  for (const auto& s : states) {
    positions.push_back(s.position);
    velocities.push_back(s.velocity);
    r.input_magnitude.push_back(s.last_input.norm());
  }
  r.order = order_metric(velocities, graph);
  r.distance = distance_metrics(positions);
  return r;
}

inline SimulationLog run_simulation(const ScenarioConfig& config) {
  config.validate();
  const auto& ctrl = config.controller;
  const std::size_t n = config.n_agents;
  const double speed_limit = ctrl.bounds.v_max + ctrl.bounds.u_max * config.dt + kBoundSlack;

  SimulationLog log;
  log.times.reserve(config.steps + 1);
  log.frames.reserve(config.steps + 1);
  log.metrics.reserve(config.steps + 1);

  std::vector<AgentState> states = spawn_followers(config);
  std::vector<Vec2> positions(n);
  Vec2 leader_position = Vec2::Zero();
  Vec2 leader_prev_velocity = Vec2::Zero();

  for (std::size_t tick = 0;; ++tick) {
    const double t = static_cast<double>(tick) * config.dt;
    for (std::size_t i = 0; i < n; ++i) positions[i] = states[i].position;
    const NeighborGraph graph = build_neighbor_graph(positions, ctrl.k, kLeaderIndex);

    log.times.push_back(t);
    log.frames.push_back(states);
    log.metrics.push_back(measure(t, states, graph));
    log.collision_free.push_back(collision_check(positions, ctrl.bounds.r_coll));
    if (tick == config.steps) break;

    const Vec2 v_leader = leader_velocity(t, config);
    const ControlOutput out = control_step(states, graph, v_leader, ctrl);
    log.total_sweeps += static_cast<std::size_t>(out.sweeps);

    for (std::size_t i = 0; i < n; ++i) {
      if (i == kLeaderIndex) continue;
      states[i] = integrate_step(states[i], out.commands[i], config.dt);
      if (states[i].velocity.norm() > speed_limit) ++log.speed_violations;
    }

    // Leader: kinematic, tick-exact accumulation of the reference.
    leader_position += v_leader * config.dt;
    const Vec2 v_next = leader_velocity(t + config.dt, config);
    AgentState& leader = states[kLeaderIndex];
    leader.position = leader_position;
    leader.velocity = v_next;
    leader.last_input = (v_next - leader_prev_velocity) / config.dt;
    leader_prev_velocity = v_next;
  }

  log.summary.resize(n);
  if (config.steps > 0) {
    std::vector<Vec2> inputs, path;
    for (std::size_t i = 0; i < n; ++i) {
      inputs.clear();
      path.clear();
      for (std::size_t f = 0; f < log.frames.size(); ++f) {
        if (f > 0) inputs.push_back(log.frames[f][i].last_input);
        path.push_back(log.frames[f][i].position);
      }
      log.summary[i] = {control_efficiency(inputs), trajectory_length(path)};
    }
  }
  return log;
}

}  // namespace mrf_flock
