#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "mrf_flock/metrics.hpp"

using namespace mrf_flock;

namespace {

NeighborGraph fully_connected(std::size_t n) {
  NeighborGraph g;
  g.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) g.neighbors[i].push_back(j);
    }
  }
  return g;
}

}  // namespace

TEST(OrderMetric, Examples) {
  const std::vector<Vec2> same(4, Vec2(0.1, 0.2));
  EXPECT_NEAR(order_metric(same, fully_connected(4)), 1.0, 1e-15);

  const std::vector<Vec2> opposite{{1, 0}, {-1, 0}};
  EXPECT_NEAR(order_metric(opposite, fully_connected(2)), -1.0, 1e-15);

  const std::vector<Vec2> three{{1, 0}, {0, 1}, {1, 0}};
  EXPECT_NEAR(order_metric(three, fully_connected(3)), 1.0 / 3.0, 1e-15);
}

TEST(OrderMetric, LeaderWithoutNeighborsIsSkipped) {
  const std::vector<Vec2> v{{-1, 0}, {1, 0}, {1, 0}};
  NeighborGraph g{{{}, {2, 0}, {1, 0}}, 0};
  EXPECT_NEAR(order_metric(v, g), 0.0, 1e-15);  // each follower: (1 + -1) / 2
}

TEST(OrderMetric, RestingAgentsContributeZero) {
  const std::vector<Vec2> v{{0, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(order_metric(v, fully_connected(3)), 0.0);
}

TEST(OrderMetric, Errors) {
  EXPECT_THROW(order_metric(std::vector<Vec2>{{1, 0}}, fully_connected(1)), UndefinedMetric);
  EXPECT_THROW(order_metric(std::vector<Vec2>{{1, 0}, {1, 0}}, NeighborGraph{{{}, {}}, 0}), UndefinedMetric);
}

TEST(OrderMetric, BoundedOnRandomInputs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> v(6);
    for (auto& x : v) x = {u(rng), u(rng)};
    const double o = order_metric(v, fully_connected(6));
    EXPECT_GE(o, -1.0);
    EXPECT_LE(o, 1.0);
  }
}

TEST(DistanceMetrics, Examples) {
  const auto two = distance_metrics(std::vector<Vec2>{{0, 0}, {1, 0}});
  EXPECT_DOUBLE_EQ(two.d_min, 1.0);
  EXPECT_DOUBLE_EQ(two.d_max, 1.0);
  EXPECT_DOUBLE_EQ(two.d_avg, 1.0);

  const auto line = distance_metrics(std::vector<Vec2>{{0, 0}, {1, 0}, {3, 0}});
  EXPECT_DOUBLE_EQ(line.d_min, 1.0);
  EXPECT_DOUBLE_EQ(line.d_max, 2.0);
  EXPECT_NEAR(line.d_avg, 4.0 / 3.0, 1e-15);

  const auto permuted = distance_metrics(std::vector<Vec2>{{3, 0}, {0, 0}, {1, 0}});
  EXPECT_NEAR(permuted.d_avg, line.d_avg, 1e-15);
  EXPECT_THROW(distance_metrics(std::vector<Vec2>{{0, 0}}), UndefinedMetric);
}

TEST(DistanceMetrics, RigidMotionInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> p(7), q(7);
    for (auto& x : p) x = {u(rng), u(rng)};
    const Eigen::Rotation2Dd rot(u(rng));
    const Vec2 shift{u(rng), u(rng)};
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = rot * p[i] + shift;
    const auto a = distance_metrics(p);
    const auto b = distance_metrics(q);
    EXPECT_NEAR(a.d_min, b.d_min, 1e-12);
    EXPECT_NEAR(a.d_max, b.d_max, 1e-12);
    EXPECT_NEAR(a.d_avg, b.d_avg, 1e-12);
  }
}

TEST(ControlEfficiency, Examples) {
  EXPECT_NEAR(control_efficiency(std::vector<Vec2>(5, Vec2(0.12, 0.16))), 0.2, 1e-15);
  EXPECT_NEAR(control_efficiency(std::vector<Vec2>{{0, 0}, {0.4, 0}, {0, 0}, {0, -0.4}}), 0.2, 1e-15);
  EXPECT_EQ(control_efficiency(std::vector<Vec2>(3, Vec2::Zero())), 0.0);
  EXPECT_THROW(control_efficiency(std::vector<Vec2>{}), UndefinedMetric);
}

TEST(ControlEfficiency, ScalesLinearly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  std::vector<Vec2> h(40), doubled(40);
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = {u(rng), u(rng)};
    doubled[i] = 2.0 * h[i];
  }
  EXPECT_NEAR(control_efficiency(doubled), 2.0 * control_efficiency(h), 1e-14);
}

TEST(TrajectoryLength, Examples) {
  std::vector<Vec2> line;
  for (int i = 0; i <= 200; ++i) line.emplace_back(0.2 * 0.05 * i, 0.0);  // 10 s at 0.2 m/s
  EXPECT_NEAR(trajectory_length(line), 2.0, 1e-12);
  EXPECT_EQ(trajectory_length(std::vector<Vec2>(10, Vec2(1, 1))), 0.0);
  EXPECT_THROW(trajectory_length(std::vector<Vec2>{{0, 0}}), UndefinedMetric);
}

TEST(TrajectoryLength, TriangleInequalityAndAdditivity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> path(30);
  for (auto& p : path) p = {u(rng), u(rng)};
  EXPECT_GE(trajectory_length(path), (path.back() - path.front()).norm());
  const std::span<const Vec2> all(path);
  EXPECT_NEAR(trajectory_length(path), trajectory_length(all.first(12)) + trajectory_length(all.subspan(11)), 1e-12);
}

TEST(CollisionCheck, Boundary) {
  EXPECT_TRUE(collision_check(std::vector<Vec2>{{0, 0}, {0.24, 0}}, 0.12));
  EXPECT_FALSE(collision_check(std::vector<Vec2>{{0, 0}, {0.239, 0}}, 0.12));
  EXPECT_TRUE(collision_check(std::vector<Vec2>{{0, 0}}, 0.12));
  EXPECT_FALSE(collision_check(std::vector<Vec2>{{0, 0}, {5, 5}, {0.1, 0.1}}, 0.12));
  EXPECT_THROW(collision_check(std::vector<Vec2>{{0, 0}}, 0.0), std::invalid_argument);
}
