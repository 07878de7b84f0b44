#pragma once

// Test-only reference computations. Nothing here may call into the
// controller's optimized paths (MeanFieldProblem, boltzmann, desired_distance).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "mrf_flock/control_space.hpp"
#include "mrf_flock/mrf_controller.hpp"
#include "mrf_flock/potentials.hpp"

namespace oracle {

/// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

/// Grid scan followed by golden-section refinement around the best cell.
inline double numeric_argmin(const std::function<double(double)>& f, double lo, double hi, int cells = 5000) {
  const double h = (hi - lo) / cells;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= cells; ++i) {
    const double v = f(lo + i * h);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return golden_section_min(f, std::max(lo, lo + (best - 1) * h), std::min(hi, lo + (best + 1) * h));
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// exp(-e) / sum exp(-e), computed in long double without shifting.
inline std::vector<double> direct_softmax(const std::vector<double>& energies) {
  long double z = 0.0L;
  for (double e : energies) z += std::exp(-static_cast<long double>(e));
  std::vector<double> p;
  p.reserve(energies.size());
  for (double e : energies) p.push_back(static_cast<double>(std::exp(-static_cast<long double>(e)) / z));
  return p;
}

/// Pair energy written out straight from the potential formulas.
inline double pair_terms(const mrf_flock::ControlCandidate& own, const mrf_flock::ControlCandidate& other,
                         const mrf_flock::PotentialParams& p, double w_a = 1.0, double w_align = 1.0) {
  const double d = (own.predicted.position - other.predicted.position).norm();
  const double attract = -p.a * std::exp(-d / p.k_a) + p.b * std::exp(-d / p.k_r);
  const auto& vi = own.predicted.velocity;
  const auto& vj = other.predicted.velocity;
  double angle = 0.0;
  if (vi.norm() >= 1e-9 && vj.norm() >= 1e-9) {
    angle = std::acos(std::clamp(vi.dot(vj) / (vi.norm() * vj.norm()), -1.0, 1.0));
  }
  return w_a * attract + w_align * std::exp(vi.norm() * p.t_p * angle / p.k_l);
}

inline double unary_terms(const mrf_flock::ControlCandidate& c, const mrf_flock::Vec2& u_last,
                          const mrf_flock::Vec2& v_leader, const mrf_flock::PotentialParams& p, double w_acc = 1.0,
                          double w_vel = 1.0) {
  double turn = 0.0;
  if (c.input.norm() >= 1e-9 && u_last.norm() >= 1e-9) {
    turn = std::acos(std::clamp(c.input.dot(u_last) / (c.input.norm() * u_last.norm()), -1.0, 1.0));
  }
  return w_acc * (std::exp(c.input.norm() / p.k_c) + std::exp(turn / p.k_d)) +
         w_vel * std::exp((c.predicted.velocity - v_leader).norm() / p.k_v);
}

}  // namespace oracle

namespace oracle {

/// Exhaustive joint energy of a two-follower problem in which each follower
/// neighbors the other follower and the leader (single fixed candidate).
struct TwoFollowerInstance {
  std::vector<mrf_flock::ControlCandidate> first, second;
  mrf_flock::ControlCandidate leader;
  mrf_flock::Vec2 u_last_first = mrf_flock::Vec2::Zero();
  mrf_flock::Vec2 u_last_second = mrf_flock::Vec2::Zero();
  mrf_flock::Vec2 v_leader = mrf_flock::Vec2::Zero();
};

struct JointEnergies {
  std::vector<std::vector<double>> table;  // table[c1][c2]
  double min = 0.0, max = 0.0, median = 0.0;
};

inline JointEnergies joint_energies(const TwoFollowerInstance& inst, const mrf_flock::PotentialParams& p,
                                    const mrf_flock::EnergyWeights& w) {
  JointEnergies out;
  std::vector<double> flat;
  out.table.assign(inst.first.size(), std::vector<double>(inst.second.size()));
  for (std::size_t a = 0; a < inst.first.size(); ++a) {
    for (std::size_t b = 0; b < inst.second.size(); ++b) {
      const auto& ca = inst.first[a];
      const auto& cb = inst.second[b];
      double e = unary_terms(ca, inst.u_last_first, inst.v_leader, p, w.acc, w.vel) +
                 unary_terms(cb, inst.u_last_second, inst.v_leader, p, w.acc, w.vel);
      e += pair_terms(ca, cb, p, w.attract_repulse, w.align) + pair_terms(ca, inst.leader, p, w.attract_repulse, w.align);
      e += pair_terms(cb, ca, p, w.attract_repulse, w.align) + pair_terms(cb, inst.leader, p, w.attract_repulse, w.align);
      out.table[a][b] = e;
      flat.push_back(e);
    }
  }
  std::sort(flat.begin(), flat.end());
  out.min = flat.front();
  out.max = flat.back();
  const std::size_t mid = flat.size() / 2;
  out.median = flat.size() % 2 == 1 ? flat[mid] : 0.5 * (flat[mid - 1] + flat[mid]);
  return out;
}

}  // namespace oracle
