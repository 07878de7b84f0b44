#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"

namespace mrf_flock {

/// Energy-term parameters. Defaults are the simulation column of the
/// reference parameter table.
struct PotentialParams {
  double a = 8.0;     // attraction amplitude
  double b = 10.0;    // repulsion amplitude
  double k_a = 1.5;   // attraction length scale, m
  double k_r = 0.2;   // repulsion length scale, m
  double k_l = 4.0;   // alignment scale, m*rad
  double k_c = 7.0;   // input magnitude scale, m/s^2
  double k_d = 15.0;  // input turn scale, rad
  double k_v = 2.0;   // leader velocity scale, m/s
  double t_p = 0.15;  // planning horizon, s

  void validate() const {
    for (double v : {a, b, k_a, k_r, k_l, k_c, k_d, k_v, t_p}) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("potential parameters must be positive");
    }
    if (!(a * k_r < b * k_a)) throw std::invalid_argument("need a*k_r < b*k_a");
  }
};

/// Below this norm a velocity or input has no direction; angles against it are 0.
inline constexpr double kDirectionEpsilon = 1e-9;

/// Angle in [0, pi] between two vectors, 0 if either is (numerically) zero.
inline double angle_between(const Vec2& lhs, const Vec2& rhs, double eps = kDirectionEpsilon) {
  const double nl = lhs.norm();
  const double nr = rhs.norm();
  if (nl < eps || nr < eps) return 0.0;
  return std::acos(std::clamp(lhs.dot(rhs) / (nl * nr), -1.0, 1.0));
}

/// Attraction/repulsion energy at separation d: -a e^{-d/k_a} + b e^{-d/k_r}.
inline double psi_attract_repulse(double d, const PotentialParams& p) {
  if (!(d >= 0.0)) throw std::invalid_argument("psi_attract_repulse: distance must be >= 0");
  return -p.a * std::exp(-d / p.k_a) + p.b * std::exp(-d / p.k_r);
}

/// Separation that minimizes psi_attract_repulse.
inline double desired_distance(const PotentialParams& p) {
  if (!(p.a > 0.0 && p.b > 0.0 && p.k_a > 0.0 && p.k_r > 0.0) || !(p.a * p.k_r < p.b * p.k_a) || !(p.k_r < p.k_a)) {
    throw NoMinimum("attraction/repulsion potential has no minimum for these parameters");
  }
  return std::log(p.b * p.k_a / (p.a * p.k_r)) / (1.0 / p.k_r - 1.0 / p.k_a);
}

/// Alignment energy exp(|v_i| t_p * angle(v_i, v_j) / k_l).
inline double psi_align(const Vec2& v_i, const Vec2& v_j, const PotentialParams& p) {
  const double travel = v_i.norm() * p.t_p;
  return std::exp(travel * angle_between(v_i, v_j) / p.k_l);
}

/// Input cost: magnitude term plus turn against the previous input.
inline double psi_acc(const Vec2& u, const Vec2& u_last, const PotentialParams& p) {
  return std::exp(u.norm() / p.k_c) + std::exp(angle_between(u, u_last) / p.k_d);
}

/// Leader velocity tracking cost exp(|v - v_l| / k_v).
inline double psi_vel(const Vec2& v, const Vec2& v_leader, const PotentialParams& p) {
  return std::exp((v - v_leader).norm() / p.k_v);
}

}  // namespace mrf_flock
