#include <gtest/gtest.h>

#include <bilevel/constraint_set.hpp>
#include <bilevel/errors.hpp>

#include "fixtures.hpp"

using namespace bilevel;
using fixtures::vec;

TEST(Projection, BoxClipsCoordinatewise) {
  const auto box = ConstraintSet::box(vec({0, 0}), vec({1, 1}));
  const Vector p = box.project(vec({1.7, -0.3}));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(Projection, SimplexSplitsSymmetricPoint) {
  const Vector p = ConstraintSet::simplex(2).project(vec({0.6, 0.6}));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Projection, BallScalesRadially) {
  const Vector p = ConstraintSet::ball(vec({0, 0}), 2.0).project(vec({3, 4}));
  EXPECT_NEAR(p[0], 1.2, 1e-15);
  EXPECT_NEAR(p[1], 1.6, 1e-15);
}

TEST(Projection, FullSpaceIsIdentity) {
  const Vector v = vec({-3.5, 1e8, 0.25});
  EXPECT_EQ(ConstraintSet::full_space(3).project(v), v);
}

TEST(Projection, IntervalClipsEveryCoordinate) {
  const Vector p = ConstraintSet::interval(0.0, 3.0, 3).project(vec({-1, 1.5, 7}));
  EXPECT_EQ(p, vec({0, 1.5, 3}));
}

TEST(Projection, SimplexScaleAndSparsity) {
  const Vector p = ConstraintSet::simplex(3, 2.0).project(vec({5, 0, -5}));
  EXPECT_NEAR(p[0], 2.0, 1e-14);
  EXPECT_NEAR(p[1], 0.0, 1e-14);
  EXPECT_NEAR(p[2], 0.0, 1e-14);
}

TEST(Projection, PointInsideBallUnchanged) {
  const Vector v = vec({0.3, -0.4});
  EXPECT_EQ(ConstraintSet::ball(vec({0, 0}), 1.0).project(v), v);
}

TEST(Projection, DimensionMismatchThrows) {
  EXPECT_THROW(ConstraintSet::box(vec({0, 0}), vec({1, 1})).project(vec({1, 2, 3})),
               InvalidArgument);
  EXPECT_THROW(ConstraintSet::full_space(2).project(vec({1})), InvalidArgument);
  EXPECT_THROW(ConstraintSet::simplex(3).project(vec({1, 2})), InvalidArgument);
}

TEST(Projection, InvalidConstructionThrows) {
  EXPECT_THROW(ConstraintSet::box(vec({1}), vec({0})), InvalidArgument);
  EXPECT_THROW(ConstraintSet::ball(vec({0}), -1.0), InvalidArgument);
  EXPECT_THROW(ConstraintSet::interval(2.0, 1.0), InvalidArgument);
  EXPECT_THROW(ConstraintSet::simplex(2, 0.0), InvalidArgument);
}

TEST(Projection, BoundsOfBoxLikeSets) {
  const auto full = ConstraintSet::full_space(2);
  EXPECT_TRUE(std::isinf(full.lower_bounds()[0]));
  EXPECT_TRUE(full.is_box_like());
  EXPECT_FALSE(full.bounded());
  const auto iv = ConstraintSet::interval(0.0, 2.0, 2);
  EXPECT_EQ(iv.upper_bounds(), vec({2, 2}));
  EXPECT_FALSE(ConstraintSet::ball(vec({0}), 1.0).is_box_like());
}

TEST(Projection, ProductProjectsEachBlock) {
  const Vector z = project_product(ConstraintSet::interval(0, 2), ConstraintSet::interval(0, 1),
                                   vec({3, -1}));
  EXPECT_EQ(z, vec({2, 0}));
}

class ProjectionProperties : public ::testing::TestWithParam<int> {
 protected:
  static std::vector<ConstraintSet> sets() {
    return {ConstraintSet::full_space(3),
            ConstraintSet::box(vec({-1, 0, 2}), vec({1, 0.5, 4})),
            ConstraintSet::ball(vec({1, -1, 0}), 1.5),
            ConstraintSet::simplex(3, 1.0),
            ConstraintSet::interval(-0.5, 0.5, 3)};
  }
};

TEST_P(ProjectionProperties, IdempotentMembershipNonexpansive) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  for (const ConstraintSet& set : sets()) {
    for (int i = 0; i < 200; ++i) {
      const Vector a = fixtures::random_vector(rng, 3, 6.0);
      const Vector b = fixtures::random_vector(rng, 3, 6.0);
      const Vector pa = set.project(a);
      const Vector pb = set.project(b);
      EXPECT_TRUE(set.contains(pa, 1e-10)) << set.describe();
      EXPECT_LE((set.project(pa) - pa).norm(), 1e-12) << set.describe();
      EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-12) << set.describe();
      // variational inequality <a - Pa, c - Pa> <= 0 for c in the set
      EXPECT_LE((a - pa).dot(pb - pa), 1e-9) << set.describe();
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ProjectionProperties, ::testing::Values(1, 2, 3, 4, 5));
