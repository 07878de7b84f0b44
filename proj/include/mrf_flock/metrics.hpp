#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"
#include "mrf_flock/mrf_controller.hpp"
#include "mrf_flock/potentials.hpp"

namespace mrf_flock {

struct DistanceTriple {
  double d_min = 0.0;
  double d_max = 0.0;
  double d_avg = 0.0;
};

struct MetricsRecord {
  double t = 0.0;
  double order = 0.0;
  DistanceTriple distance;
  std::vector<double> input_magnitude;  // per agent, m/s^2
};

/// Cosine between two velocities; 0 if either has no direction.
inline double velocity_cosine(const Vec2& a, const Vec2& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDirectionEpsilon || nb < kDirectionEpsilon) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

/// Mean neighbor velocity correlation. Agents without neighbors (the
/// leader) are left out of the outer average.
inline double order_metric(std::span<const Vec2> velocities, const NeighborGraph& graph) {
  if (velocities.size() < 2) throw UndefinedMetric("order metric needs at least two agents");
  if (graph.size() != velocities.size()) throw std::invalid_argument("order_metric: graph/velocity size mismatch");
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    const auto& nbrs = graph[i];
    if (nbrs.empty()) continue;
    double sum = 0.0;
    for (std::size_t j : nbrs) sum += velocity_cosine(velocities[i], velocities[j]);
    total += sum / static_cast<double>(nbrs.size());
    ++counted;
  }
  if (counted == 0) throw UndefinedMetric("order metric: no agent has neighbors");
  return total / static_cast<double>(counted);
}

/// Nearest-neighbor distance statistics over all agents.
inline DistanceTriple distance_metrics(std::span<const Vec2> positions) {
  const std::size_t n = positions.size();
  if (n < 2) throw UndefinedMetric("distance metrics need at least two agents");
  DistanceTriple out{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) nearest = std::min(nearest, (positions[i] - positions[j]).norm());
    }
    out.d_min = std::min(out.d_min, nearest);
    out.d_max = std::max(out.d_max, nearest);
    out.d_avg += nearest;
  }
  out.d_avg /= static_cast<double>(n);
  return out;
}

/// Mean input magnitude over the recorded command ticks.
inline double control_efficiency(std::span<const Vec2> input_history) {
  if (input_history.empty()) throw UndefinedMetric("control efficiency of an empty history");
  double sum = 0.0;
  for (const auto& u : input_history) sum += u.norm();
  return sum / static_cast<double>(input_history.size());
}

inline double trajectory_length(std::span<const Vec2> position_history) {
  if (position_history.size() < 2) throw UndefinedMetric("trajectory length needs at least two samples");
  double length = 0.0;
  for (std::size_t t = 1; t < position_history.size(); ++t) {
    length += (position_history[t] - position_history[t - 1]).norm();
  }
  return length;
}

/// True iff no pair of agents is closer than 2 r_coll.
inline bool collision_check(std::span<const Vec2> positions, double r_coll) {
  if (!(r_coll > 0.0)) throw std::invalid_argument("collision_check: r_coll must be positive");
  const double limit = 2.0 * r_coll;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if ((positions[i] - positions[j]).norm() < limit) return false;
    }
  }
  return true;
}

}  // namespace mrf_flock
