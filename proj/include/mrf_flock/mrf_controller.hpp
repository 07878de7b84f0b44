#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "mrf_flock/control_space.hpp"
#include "mrf_flock/dynamics.hpp"
#include "mrf_flock/errors.hpp"
#include "mrf_flock/potentials.hpp"

namespace mrf_flock {

// ---------------------------------------------------------------------------
// Neighbor graph
// ---------------------------------------------------------------------------

/// Per-agent neighbor lists. Followers see their k nearest fellow followers
/// plus the leader; the leader sees nobody.
struct NeighborGraph {
  std::vector<std::vector<std::size_t>> neighbors;
  std::size_t leader_index = 0;

  std::size_t size() const { return neighbors.size(); }
  const std::vector<std::size_t>& operator[](std::size_t i) const { return neighbors[i]; }
};

inline NeighborGraph build_neighbor_graph(std::span<const Vec2> positions, std::size_t k, std::size_t leader_index) {
  const std::size_t n = positions.size();
  if (n == 0) throw std::invalid_argument("build_neighbor_graph: no agents");
  if (leader_index >= n) throw std::invalid_argument("build_neighbor_graph: leader index out of range");
  for (const auto& p : positions) {
    if (!is_finite(p)) throw std::invalid_argument("build_neighbor_graph: non-finite position");
  }

  NeighborGraph graph;
  graph.leader_index = leader_index;
  graph.neighbors.resize(n);

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == leader_index) continue;
    ranked.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || j == leader_index) continue;
      ranked.emplace_back((positions[i] - positions[j]).squaredNorm(), j);
    }
    // pair ordering: distance, then lower index
    const std::size_t take = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
    auto& out = graph.neighbors[i];
    out.reserve(take + 1);
    for (std::size_t r = 0; r < take; ++r) out.push_back(ranked[r].second);
    out.push_back(leader_index);
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Beliefs
// ---------------------------------------------------------------------------

/// Probability vector over one agent's candidate list.
struct Belief {
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }

  static Belief uniform(std::size_t count) {
    if (count == 0) throw std::invalid_argument("belief over zero candidates");
    return {std::vector<double>(count, 1.0 / static_cast<double>(count))};
  }

  static Belief delta(std::size_t count, std::size_t at) {
    Belief b{std::vector<double>(count, 0.0)};
    b.probabilities.at(at) = 1.0;
    return b;
  }
};

inline std::vector<Belief> init_beliefs(std::span<const std::size_t> candidate_counts) {
  std::vector<Belief> beliefs;
  beliefs.reserve(candidate_counts.size());
  for (std::size_t count : candidate_counts) beliefs.push_back(Belief::uniform(count));
  return beliefs;
}

// ---------------------------------------------------------------------------
// Energy model
// ---------------------------------------------------------------------------

/// Multipliers on the four energy terms. All ones reproduces the bare sum
/// of potentials.
struct EnergyWeights {
  double attract_repulse = 1.0;
  double align = 1.0;
  double acc = 1.0;
  double vel = 1.0;

  void validate() const {
    for (double w : {attract_repulse, align, acc, vel}) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("energy weights must be finite and >= 0");
    }
  }
};

/// Weights used by the default controller. With unit weights and the
/// reference parameters, the cost of the smallest nonzero input
/// (exp(0.14/7) - 1, about 0.02) outweighs the attraction gain it buys over
/// a 0.15 s horizon (about 1e-3), so followers never leave rest. Scaling
/// the interaction terms up restores flocking.
inline constexpr EnergyWeights kCalibratedWeights{300.0, 30.0, 1.0, 30.0};

struct EnergyModel {
  PotentialParams potentials;
  EnergyWeights weights;
};

/// Single-agent terms: input cost against the owner's previous input plus
/// leader-velocity tracking on the predicted velocity.
inline double unary_energy(const ControlCandidate& c, const Vec2& u_last, const Vec2& v_leader, const EnergyModel& m) {
  return m.weights.acc * psi_acc(c.input, u_last, m.potentials) +
         m.weights.vel * psi_vel(c.predicted.velocity, v_leader, m.potentials);
}

/// Pair terms between predicted states of agent i (own) and neighbor j.
inline double pairwise_energy(const ControlCandidate& own, const ControlCandidate& other, const EnergyModel& m) {
  const double d = (own.predicted.position - other.predicted.position).norm();
  return m.weights.attract_repulse * psi_attract_repulse(d, m.potentials) +
         m.weights.align * psi_align(own.predicted.velocity, other.predicted.velocity, m.potentials);
}

/// Mean-field energy of one candidate: unary terms plus, for every neighbor,
/// the expectation of the pair terms under that neighbor's belief.
inline double candidate_energy(const ControlCandidate& c, const Vec2& u_last,
                               std::span<const Belief> neighbor_beliefs,
                               std::span<const std::vector<ControlCandidate>> neighbor_candidates,
                               const Vec2& v_leader, const EnergyModel& model) {
  if (neighbor_beliefs.size() != neighbor_candidates.size()) {
    throw std::invalid_argument("candidate_energy: belief/candidate list count mismatch");
  }
  double energy = unary_energy(c, u_last, v_leader, model);
  for (std::size_t n = 0; n < neighbor_beliefs.size(); ++n) {
    const auto& q = neighbor_beliefs[n];
    const auto& cands = neighbor_candidates[n];
    if (q.size() != cands.size()) throw std::invalid_argument("candidate_energy: belief length mismatch");
    for (std::size_t cj = 0; cj < cands.size(); ++cj) {
      if (q[cj] == 0.0) continue;
      energy += q[cj] * pairwise_energy(c, cands[cj], model);
    }
  }
  return energy;
}

/// Boltzmann distribution exp(-E) / Z, shifted by min E for stability.
/// Non-finite energies get zero mass.
inline Belief boltzmann(std::span<const double> energies) {
  double lowest = std::numeric_limits<double>::infinity();
  for (double e : energies) {
    if (std::isfinite(e)) lowest = std::min(lowest, e);
  }
  if (!std::isfinite(lowest)) throw NumericFailure("all candidate energies are non-finite");

  Belief b{std::vector<double>(energies.size(), 0.0)};
  double z = 0.0;
  for (std::size_t c = 0; c < energies.size(); ++c) {
    if (!std::isfinite(energies[c])) continue;
    b.probabilities[c] = std::exp(-(energies[c] - lowest));
    z += b.probabilities[c];
  }
  for (double& p : b.probabilities) p /= z;
  return b;
}

// ---------------------------------------------------------------------------
// Mean-field inference
// ---------------------------------------------------------------------------

/// One tick's MRF: candidates of every agent, their unary energies and the
/// pair-energy tables along every graph edge. Agents marked `fixed` (the
/// leader) keep whatever belief they are given.
class MeanFieldProblem {
 public:
  MeanFieldProblem(std::vector<std::vector<ControlCandidate>> candidates, std::span<const Vec2> last_inputs,
                   NeighborGraph graph, const Vec2& v_leader, const EnergyModel& model, std::vector<bool> fixed = {})
      : candidates_(std::move(candidates)), graph_(std::move(graph)), fixed_(std::move(fixed)) {
    const std::size_t n = candidates_.size();
    if (graph_.size() != n || last_inputs.size() != n) {
      throw std::invalid_argument("MeanFieldProblem: agent count mismatch");
    }
    if (fixed_.empty()) fixed_.assign(n, false);
    if (fixed_.size() != n) throw std::invalid_argument("MeanFieldProblem: fixed mask size mismatch");

    // Per-candidate features reused across all pair tables.
    struct Features {
      Eigen::Matrix2Xd position;
      Eigen::VectorXd heading;  // atan2 of the velocity
      Eigen::VectorXd speed;
    };
    std::vector<Features> features(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& own = candidates_[i];
      if (own.empty()) throw std::invalid_argument("MeanFieldProblem: agent without candidates");
      const auto m = static_cast<Eigen::Index>(own.size());
      auto& f = features[i];
      f.position.resize(2, m);
      f.heading.resize(m);
      f.speed.resize(m);
      for (Eigen::Index c = 0; c < m; ++c) {
        const auto& v = own[static_cast<std::size_t>(c)].predicted.velocity;
        f.position.col(c) = own[static_cast<std::size_t>(c)].predicted.position;
        f.speed(c) = v.norm();
        f.heading(c) = std::atan2(v.y(), v.x());
      }
    }

    const auto& pp = model.potentials;
    const auto& w = model.weights;

    // The distance term is symmetric, so a mutual edge reuses the transpose.
    const auto distance_table = [&](std::size_t i, std::size_t j) {
      const auto& fi = features[i];
      const auto& fj = features[j];
      Eigen::MatrixXd table(fi.speed.size(), fj.speed.size());
      for (Eigen::Index cj = 0; cj < table.cols(); ++cj) {
        for (Eigen::Index c = 0; c < table.rows(); ++c) {
          const double d = (fi.position.col(c) - fj.position.col(cj)).norm();
          table(c, cj) = w.attract_repulse * (-pp.a * std::exp(-d / pp.k_a) + pp.b * std::exp(-d / pp.k_r));
        }
      }
      return table;
    };

    unary_.resize(n);
    pairwise_.resize(n);
    std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXd> distance_cache;
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed_[i]) continue;
      const auto& own = candidates_[i];
      unary_[i].resize(own.size());
      for (std::size_t c = 0; c < own.size(); ++c) unary_[i][c] = unary_energy(own[c], last_inputs[i], v_leader, model);

      const auto& fi = features[i];
      pairwise_[i].reserve(graph_[i].size());
      for (std::size_t j : graph_[i]) {
        if (j >= n || j == i) throw std::invalid_argument("MeanFieldProblem: bad neighbor index");
        const auto& fj = features[j];

        // Ordered so the pair (i, j) and (j, i) share one entry.
        Eigen::MatrixXd table;
        if (const auto hit = distance_cache.find({j, i}); hit != distance_cache.end()) {
          table = hit->second.transpose();
        } else {
          table = distance_table(i, j);
          distance_cache.emplace(std::pair{i, j}, table);
        }

        // Alignment: same algebra as pairwise_energy(), on cached features.
        for (Eigen::Index cj = 0; cj < table.cols(); ++cj) {
          const bool other_moving = fj.speed(cj) >= kDirectionEpsilon;
          for (Eigen::Index c = 0; c < table.rows(); ++c) {
            double angle = 0.0;
            if (other_moving && fi.speed(c) >= kDirectionEpsilon) {
              angle = std::abs(fi.heading(c) - fj.heading(cj));
              if (angle > std::numbers::pi) angle = 2.0 * std::numbers::pi - angle;
            }
            table(c, cj) += w.align * std::exp(fi.speed(c) * pp.t_p * angle / pp.k_l);
          }
        }
        pairwise_[i].push_back(std::move(table));
      }
    }
  }

  std::size_t agent_count() const { return candidates_.size(); }
  const std::vector<ControlCandidate>& candidates(std::size_t i) const { return candidates_[i]; }
  const NeighborGraph& graph() const { return graph_; }
  bool is_fixed(std::size_t i) const { return fixed_[i]; }

  /// Mean-field energies of every candidate of agent i given neighbor beliefs.
  std::vector<double> energies(std::size_t i, std::span<const Belief> beliefs) const {
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(unary_[i].data(), static_cast<Eigen::Index>(unary_[i].size()));
    const auto& nbrs = graph_[i];
    for (std::size_t n = 0; n < nbrs.size(); ++n) {
      const auto& q = beliefs[nbrs[n]].probabilities;
      if (q.size() != candidates_[nbrs[n]].size()) throw std::invalid_argument("belief length mismatch");
      e.noalias() += pairwise_[i][n] * Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    }
    return {e.data(), e.data() + e.size()};
  }

 private:
  std::vector<std::vector<ControlCandidate>> candidates_;
  NeighborGraph graph_;
  std::vector<bool> fixed_;
  std::vector<std::vector<double>> unary_;
  std::vector<std::vector<Eigen::MatrixXd>> pairwise_;
};

struct SweepResult {
  std::vector<Belief> beliefs;
  double max_change = 0.0;  // largest absolute change of any belief entry
};

/// Synchronous (Jacobi) update: every free agent's new belief is computed
/// from the previous sweep's beliefs only.
inline SweepResult mean_field_sweep(const MeanFieldProblem& problem, std::span<const Belief> beliefs) {
  if (beliefs.size() != problem.agent_count()) throw std::invalid_argument("mean_field_sweep: belief count mismatch");
  SweepResult out;
  out.beliefs.assign(beliefs.begin(), beliefs.end());
  for (std::size_t i = 0; i < problem.agent_count(); ++i) {
    if (problem.is_fixed(i)) continue;
    const auto e = problem.energies(i, beliefs);
    out.beliefs[i] = boltzmann(e);
    for (std::size_t c = 0; c < e.size(); ++c) {
      out.max_change = std::max(out.max_change, std::abs(out.beliefs[i][c] - beliefs[i][c]));
    }
  }
  return out;
}

/// Convenience overload building the problem on the fly.
inline SweepResult mean_field_sweep(std::span<const Belief> beliefs,
                                    const std::vector<std::vector<ControlCandidate>>& all_candidates,
                                    std::span<const Vec2> last_inputs, const NeighborGraph& graph,
                                    const Vec2& v_leader, const EnergyModel& model, std::vector<bool> fixed = {}) {
  return mean_field_sweep(MeanFieldProblem(all_candidates, last_inputs, graph, v_leader, model, std::move(fixed)),
                          beliefs);
}

/// Input of the most probable candidate; ties go to the lowest index.
inline Vec2 select_input(const Belief& belief, std::span<const ControlCandidate> candidates) {
  if (belief.size() != candidates.size() || candidates.empty()) {
    throw std::invalid_argument("select_input: belief does not match candidates");
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < belief.size(); ++c) {
    if (belief[c] > belief[best]) best = c;
  }
  return candidates[best].input;
}

/// First-order low-pass on the command: (1 - alpha) u_last + alpha u.
inline Vec2 smooth_input(const Vec2& u, const Vec2& u_last, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("smooth_input: alpha must lie in (0, 1]");
  if (alpha == 1.0) return u;
  return (1.0 - alpha) * u_last + alpha * u;
}

/// Acceleration command converted for velocity-tracking vehicles.
inline Vec2 velocity_command(const Vec2& v, const Vec2& u_star, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("velocity_command: dt must be positive");
  return v + u_star * dt;
}

// ---------------------------------------------------------------------------
// Per-tick controller
// ---------------------------------------------------------------------------

struct ControllerConfig {
  std::size_t k = 3;
  double alpha = 0.8;
  int iterations = 3;
  double epsilon_converge = 1e-4;
  DiscretizationConfig discretization;
  PotentialParams potentials;
  Bounds bounds;
  EnergyWeights weights = kCalibratedWeights;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (!(epsilon_converge >= 0.0)) throw std::invalid_argument("epsilon_converge must be >= 0");
    discretization.validate();
    potentials.validate();
    bounds.validate();
    weights.validate();
    if (std::abs(discretization.t_p - potentials.t_p) > 1e-15) throw std::invalid_argument("t_p mismatch");
    if (std::abs(discretization.u_max - bounds.u_max) > 1e-15) throw std::invalid_argument("u_max mismatch");
  }

  EnergyModel energy_model() const { return {potentials, weights}; }
};

struct ControlOutput {
  std::vector<Vec2> selected;  // argmax candidate input per agent (zero for the leader)
  std::vector<Vec2> commands;  // smoothed commands per agent (zero for the leader)
  int sweeps = 0;
};

/// The leader's single planned candidate: its state carried along v_leader for t_p.
inline ControlCandidate leader_candidate(const AgentState& leader, const Vec2& v_leader, double t_p) {
  AgentState cruising = leader;
  cruising.velocity = v_leader;
  ControlCandidate c{Vec2::Zero(), predict_state(cruising, Vec2::Zero(), t_p)};
  return c;
}

/// Screen candidates for every follower and return their smoothed commands.
inline ControlOutput control_step(std::span<const AgentState> states, const NeighborGraph& graph,
                                  const Vec2& v_leader, const ControllerConfig& config) {
  const std::size_t n = states.size();
  if (graph.size() != n) throw std::invalid_argument("control_step: graph/state size mismatch");
  for (const auto& s : states) {
    if (!is_finite(s)) throw std::invalid_argument("control_step: non-finite state");
  }
  const std::size_t leader = graph.leader_index;

  std::vector<std::vector<ControlCandidate>> candidates(n);
  std::vector<Vec2> last_inputs(n);
  std::vector<bool> fixed(n, false);
  std::vector<Belief> beliefs(n);
  for (std::size_t i = 0; i < n; ++i) {
    last_inputs[i] = states[i].last_input;
    if (i == leader) {
      candidates[i] = {leader_candidate(states[i], v_leader, config.discretization.t_p)};
      fixed[i] = true;
      beliefs[i] = Belief::delta(1, 0);
    } else {
      candidates[i] = generate_candidates(states[i], config.discretization, config.bounds);
      beliefs[i] = Belief::uniform(candidates[i].size());
    }
  }

  const MeanFieldProblem problem(std::move(candidates), last_inputs, graph, v_leader, config.energy_model(),
                                 std::move(fixed));
  ControlOutput out;
  for (out.sweeps = 1;; ++out.sweeps) {
    auto sweep = mean_field_sweep(problem, beliefs);
    beliefs = std::move(sweep.beliefs);
    if (out.sweeps >= config.iterations || sweep.max_change < config.epsilon_converge) break;
  }

  out.selected.assign(n, Vec2::Zero());
  out.commands.assign(n, Vec2::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    if (i == leader) continue;
    out.selected[i] = select_input(beliefs[i], problem.candidates(i));
    out.commands[i] = smooth_input(out.selected[i], states[i].last_input, config.alpha);
  }
  return out;
}

}  // namespace mrf_flock
