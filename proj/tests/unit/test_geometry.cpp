#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "builders.hpp"
#include "poseval/error.hpp"
#include "poseval/geometry.hpp"

using namespace poseval;
using namespace testsupport;

TEST(Transform, InverseAndCompose) {
  const auto m = planted_motion();
  const Vec3 p(1.5, -2.0, 0.25);
  EXPECT_LT((m.inverse().apply(m.apply(p)) - p).norm(), 1e-12);
  const auto twice = m.compose(m);
  EXPECT_LT((twice.apply(p) - m.apply(m.apply(p))).norm(), 1e-12);
  EXPECT_NEAR(m.rotation.determinant(), 1.0, 1e-12);
}

TEST(Kabsch, RecoversPlantedMotions) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 5 + trial % 20, 15.0);
    const auto motion = planted_motion(10.0 + 7.0 * trial, Vec3(1, trial % 5 - 2.0, 0.5), Vec3(trial, -3, 2));
    const auto moved = motion.apply(pts);
    const auto fit = kabsch(moved, pts);
    EXPECT_LT(fit.rmsd, 1e-9);
    EXPECT_NEAR(fit.transform.rotation.determinant(), 1.0, 1e-9);
    EXPECT_LT((fit.transform.compose(motion).rotation - Mat3::Identity()).norm(), 1e-9);
  }
}

TEST(Kabsch, NeverWorseThanIdentityAndProper) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> noise(0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_points(rng, 12, 10.0);
    auto b = a;
    for (auto& p : b) p += Vec3(noise(rng), noise(rng), noise(rng));
    // Mirror image: the best proper rotation still beats doing nothing but keeps det = +1.
    if (trial % 2) for (auto& p : b) p.x() = -p.x();
    const auto fit = kabsch(b, a);
    double before = 0;
    for (std::size_t i = 0; i < a.size(); ++i) before += (a[i] - b[i]).squaredNorm();
    const double after_direct = [&] {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (fit.transform.apply(b[i]) - a[i]).squaredNorm();
      return std::sqrt(s / a.size());
    }();
    EXPECT_NEAR(after_direct, fit.rmsd, 1e-9);
    EXPECT_LE(fit.rmsd, std::sqrt(before / a.size()) + 1e-12);
    EXPECT_NEAR(fit.transform.rotation.determinant(), 1.0, 1e-9);
  }
}

TEST(Kabsch, DegenerateInputs) {
  const Points two{{0, 0, 0}, {1, 0, 0}};
  EXPECT_THROW(kabsch(two, two), PreconditionError);
  const Points line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  EXPECT_THROW(kabsch(line, line), PreconditionError);
  const Points tri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_THROW(kabsch(tri, line), PreconditionError);
  EXPECT_NO_THROW(kabsch(tri, tri));
}

TEST(Centroid, Mean) {
  const Points p{{0, 0, 0}, {2, 0, 0}, {1, 3, 0}};
  EXPECT_LT((centroid(p) - Vec3(1, 1, 0)).norm(), 1e-15);
}

TEST(Neighbors, MatchesSerialOnRandomClouds) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 50 + 40 * trial, 30.0);
    const double r = 2.0 + trial % 7;
    const auto fast = neighbor_pairs(pts, r);
    const auto slow = serial::neighbor_pairs(pts, r);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      EXPECT_EQ(fast[k].i, slow[k].i);
      EXPECT_EQ(fast[k].j, slow[k].j);
      EXPECT_DOUBLE_EQ(fast[k].dist, slow[k].dist);
    }
  }
}

TEST(Neighbors, RadiusIsInclusiveAndOrdered) {
  const Points pts{{0, 0, 0}, {0, 0, 4.0}, {0, 4.5, 0}, {0, 0, 1.0}};
  const auto pairs = neighbor_pairs(pts, 4.0);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(std::make_pair(pairs[0].i, pairs[0].j), std::make_pair(0, 1));
  EXPECT_EQ(std::make_pair(pairs[1].i, pairs[1].j), std::make_pair(0, 3));
  EXPECT_EQ(std::make_pair(pairs[2].i, pairs[2].j), std::make_pair(1, 3));
  EXPECT_TRUE(neighbor_pairs(Points{}, 3.0).empty());
}

TEST(ScaledDistance, MatchesSerialWithArguments) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> radius(1.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_points(rng, 30, 20.0), b = random_points(rng, 400, 20.0);
    std::vector<double> ra(a.size()), rb(b.size());
    for (auto& r : ra) r = radius(rng);
    for (auto& r : rb) r = radius(rng);
    int ia = -1, ib = -1, sa = -1, sb = -1;
    const double fast = min_scaled_distance(a, ra, b, rb, &ia, &ib);
    const double slow = serial::min_scaled_distance(a, ra, b, rb, &sa, &sb);
    EXPECT_DOUBLE_EQ(fast, slow);
    EXPECT_EQ(ia, sa);
    EXPECT_EQ(ib, sb);
    EXPECT_DOUBLE_EQ(fast, (a[ia] - b[ib]).norm() / (ra[ia] + rb[ib]));
  }
  EXPECT_EQ(min_scaled_distance(Points{}, {}, Points{{0, 0, 0}}, std::vector<double>{1.0}),
            std::numeric_limits<double>::infinity());
}

TEST(Plane, Deviation) {
  const Points flat{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_LT(max_plane_deviation(flat), 1e-12);
  const Points tent{{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 0}, {1, 1, 1}};
  EXPECT_GT(max_plane_deviation(tent), 0.3);
}
