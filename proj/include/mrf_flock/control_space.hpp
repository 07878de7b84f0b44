#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"

namespace mrf_flock {

struct DiscretizationConfig {
  int n_a = 6;           // nonzero input directions
  double delta_u = 0.14; // magnitude step, m/s^2
  double u_max = 0.7;
  double t_p = 0.15;     // planning horizon, s

  void validate() const {
    if (n_a < 1) throw std::invalid_argument("n_a must be >= 1");
    if (!(delta_u > 0.0) || !(delta_u <= u_max)) throw std::invalid_argument("need 0 < delta_u <= u_max");
    if (!(t_p > 0.0) || !std::isfinite(t_p)) throw std::invalid_argument("t_p must be positive");
  }

  /// Number of nonzero magnitudes in the ladder, floor(u_max / delta_u).
  int magnitude_levels() const {
    // 0.7 / 0.14 is 5 - 1ulp in binary; allow for that before flooring.
    return static_cast<int>(std::floor(u_max / delta_u * (1.0 + 1e-12)));
  }

  std::size_t input_count() const { return 1 + static_cast<std::size_t>(n_a) * magnitude_levels(); }
};

/// A screened input together with the state it leads to after t_p.
struct ControlCandidate {
  Vec2 input = Vec2::Zero();
  AgentState predicted;
};

/// Unit direction e_u(x) = [sin x, cos x].
inline Vec2 input_direction(double angle) { return {std::sin(angle), std::cos(angle)}; }

/// The discretized input set: zero, then for each magnitude m * delta_u
/// (ascending) the n_a directions k * 2pi / n_a, k = 1..n_a.
inline std::vector<Vec2> enumerate_inputs(const DiscretizationConfig& config) {
  config.validate();
  const int levels = config.magnitude_levels();
  const double theta_min = 2.0 * std::numbers::pi / config.n_a;

  std::vector<Vec2> inputs;
  inputs.reserve(config.input_count());
  inputs.emplace_back(Vec2::Zero());
  for (int m = 1; m <= levels; ++m) {
    const double magnitude = std::min(m * config.delta_u, config.u_max);
    for (int k = 1; k <= config.n_a; ++k) {
      inputs.emplace_back(magnitude * input_direction(k * theta_min));
    }
  }
  return inputs;
}

/// Predicts every enumerated input over t_p and keeps the feasible ones, in
/// enumeration order.
///
/// An agent already above v_max (the input filter can overshoot by one tick)
/// may have no feasible candidate at all. It then gets the single candidate
/// with the lowest predicted speed, provided that candidate actually slows
/// it down; otherwise InfeasibleState is thrown.
inline std::vector<ControlCandidate> generate_candidates(const AgentState& state, const DiscretizationConfig& config,
                                                         const Bounds& bounds) {
  if (!is_finite(state)) throw std::invalid_argument("generate_candidates: non-finite state");

  const auto inputs = enumerate_inputs(config);
  std::vector<ControlCandidate> candidates;
  candidates.reserve(inputs.size());

  const ControlCandidate* slowest = nullptr;
  std::vector<ControlCandidate> all;
  all.reserve(inputs.size());
  for (const Vec2& u : inputs) {
    ControlCandidate c{u, predict_state(state, u, config.t_p)};
    if (is_feasible(c.predicted, u, bounds)) candidates.push_back(c);
    all.push_back(c);
  }
  if (!candidates.empty()) return candidates;

  for (const auto& c : all) {
    if (c.input.norm() > bounds.u_max + kBoundSlack) continue;
    if (slowest == nullptr || c.predicted.velocity.norm() < slowest->predicted.velocity.norm()) slowest = &c;
  }
  if (slowest == nullptr || !(slowest->predicted.velocity.norm() < state.velocity.norm())) {
    throw InfeasibleState("no candidate input brings the speed back under v_max");
  }
  return {*slowest};
}

}  // namespace mrf_flock
