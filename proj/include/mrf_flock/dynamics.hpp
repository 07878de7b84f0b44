#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace mrf_flock {

using Vec2 = Eigen::Vector2d;

/// Planar double-integrator agent. `last_input` is the acceleration applied
/// over the most recent tick.
struct AgentState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 last_input = Vec2::Zero();

  bool operator==(const AgentState&) const = default;
};

struct Bounds {
  double v_max = 0.35;
  double u_max = 0.7;
  double r_coll = 0.12;

  void validate() const {
    if (!(v_max > 0.0) || !(u_max > 0.0) || !(r_coll > 0.0)) {
      throw std::invalid_argument("bounds must be strictly positive");
    }
  }
};

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

inline bool is_finite(const AgentState& s) {
  return is_finite(s.position) && is_finite(s.velocity) && is_finite(s.last_input);
}

namespace detail {

inline AgentState euler_advance(const AgentState& state, const Vec2& input, double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(what) + ": time step must be positive and finite");
  }
  if (!is_finite(state.position) || !is_finite(state.velocity) || !is_finite(input)) {
    throw std::invalid_argument(std::string(what) + ": non-finite state or input");
  }
  AgentState next;
  next.position = state.position + state.velocity * t + input * (0.5 * t * t);
  next.velocity = state.velocity + input * t;
  next.last_input = input;
  return next;
}

}  // namespace detail

/// Euler prediction of the state after `horizon` seconds under constant
/// acceleration `input`: x' = G x + K u with G = [1 t; 0 1], K = [t^2/2; t].
inline AgentState predict_state(const AgentState& state, const Vec2& input, double horizon) {
  return detail::euler_advance(state, input, horizon, "predict_state");
}

/// One simulator tick. Same update as predict_state with the tick length.
inline AgentState integrate_step(const AgentState& state, const Vec2& input, double dt) {
  return detail::euler_advance(state, input, dt, "integrate_step");
}

/// Absolute slack on the bound comparisons; absorbs the last-bit rounding of
/// magnitudes built as m * delta_u along unit directions.
inline constexpr double kBoundSlack = 1e-12;

/// Both bounds are inclusive.
inline bool is_feasible(const AgentState& predicted, const Vec2& input, const Bounds& bounds) {
  return input.norm() <= bounds.u_max + kBoundSlack && predicted.velocity.norm() <= bounds.v_max + kBoundSlack;
}

}  // namespace mrf_flock
