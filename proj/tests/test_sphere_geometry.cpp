#include "confbound/geometry_suite.hpp"
#include "confbound/sphere_geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace confbound {
namespace {

TEST(Mobius, KnownValue) {
  // T_{e1/2}(e2) = (2 x + (3/4) e2) / (5/4) = (0.8, 0.6, 0).
  const BallPoint x = BallPoint::make(Eigen::Vector3d(0.5, 0.0, 0.0));
  const SpherePoint y = SpherePoint::basis(2, 1);
  const Vec z = mobius_transform(x, y).coords();
  EXPECT_NEAR(z[0], 0.8, 1e-15);
  EXPECT_NEAR(z[1], 0.6, 1e-15);
  EXPECT_NEAR(z[2], 0.0, 1e-15);
}

TEST(Mobius, OriginIsIdentityAndMapsZeroToParameter) {
  std::mt19937_64 rng(11);
  for (int m : {2, 3}) {
    const SpherePoint y = test::random_sphere_point(rng, m);
    const Vec same = mobius_transform(BallPoint::origin(m), y).coords();
    EXPECT_LT((same - y.coords()).norm(), 1e-15);
    const BallPoint x = test::random_ball_point(rng, m, 0.9);
    const Vec image = mobius_transform(x, BallPoint::origin(m)).coords();
    EXPECT_LT((image - x.coords()).norm(), 1e-15);
  }
}

TEST(Mobius, FixesTheAxisEndpoints) {
  std::mt19937_64 rng(12);
  for (int m : {2, 3}) {
    const BallPoint x = test::random_ball_point(rng, m, 0.9);
    const Vec u = x.coords() / x.norm();
    for (double sign : {1.0, -1.0}) {
      const SpherePoint y = SpherePoint::normalized(sign * u);
      EXPECT_LT((mobius_transform(x, y).coords() - sign * u).norm(), 1e-14);
    }
  }
}

TEST(Mobius, PushesMassTowardsParameter) {
  // T_x(y) . x >= y . x: every point moves towards x/|x|.
  std::mt19937_64 rng(13);
  for (int k = 0; k < 200; ++k) {
    const BallPoint x = test::random_ball_point(rng, 2, 0.9);
    const SpherePoint y = test::random_sphere_point(rng, 2);
    EXPECT_GE(mobius_transform(x, y).coords().dot(x.coords()), y.coords().dot(x.coords()) - 1e-15);
  }
}

TEST(Reflection, FlipsPoleAndFixesEquator) {
  const SpherePoint p = SpherePoint::basis(3, 2);
  EXPECT_LT((reflect(p, p).coords() + p.coords()).norm(), 1e-15);
  const SpherePoint q = SpherePoint::basis(3, 0);
  EXPECT_LT((reflect(p, q).coords() - q.coords()).norm(), 1e-15);
}

TEST(Cap, ThresholdAndMembership) {
  const SpherePoint p = SpherePoint::basis(2, 2);
  const Cap half = Cap::make(p, 0.0);
  EXPECT_DOUBLE_EQ(half.threshold(), 0.0);
  EXPECT_TRUE(cap_contains(half, -p));
  EXPECT_FALSE(cap_contains(half, p));
  const Cap cap = Cap::make(p, 0.5);
  EXPECT_DOUBLE_EQ(cap.threshold(), 0.8);
  EXPECT_TRUE(cap_contains(cap, SpherePoint::normalized(Eigen::Vector3d(0.6, 0.0, 0.8))));
  EXPECT_FALSE(cap_contains(cap, SpherePoint::normalized(Eigen::Vector3d(0.59, 0.0, 0.81))));
}

TEST(Cap, ReflectionFixesBoundaryAndSwapsSides) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 100; ++k) {
    const SpherePoint p = test::random_sphere_point(rng, 2);
    const Cap cap = Cap::make(p, 0.7 * std::uniform_real_distribution<double>()(rng));
    // A boundary point: y.p = threshold.
    const double h = cap.threshold();
    Eigen::Vector3d w = test::random_sphere_point(rng, 2).coords();
    w -= w.dot(p.coords()) * p.coords();
    const SpherePoint y = SpherePoint::normalized(h * p.coords() + std::sqrt(1.0 - h * h) * w.normalized());
    EXPECT_LT((cap_reflect(cap, y).coords() - y.coords()).norm(), 1e-12);

    const SpherePoint outside = SpherePoint::normalized(p.coords() + 0.05 * w.normalized());
    ASSERT_FALSE(cap_contains(cap, outside));
    EXPECT_TRUE(cap_contains(cap, cap_reflect(cap, outside)));
    EXPECT_TRUE(cap_contains(cap, fold(cap, outside)));
  }
}

TEST(Fold, WholeSphereChoiceIsIdentity) {
  std::mt19937_64 rng(15);
  const SpherePoint y = test::random_sphere_point(rng, 3);
  EXPECT_EQ(fold(CapChoice{}, y).coords(), y.coords());
}

class IdentitySuite : public ::testing::TestWithParam<int> {};

TEST_P(IdentitySuite, AllResidualsAtRoundoff) {
  const IdentityResiduals r = geometry_identity_suite(GetParam(), 10000, 2024);
  EXPECT_EQ(r.samples, 10000);
  EXPECT_LE(r.mobius_inverse, 1e-12);
  EXPECT_LE(r.unit_norm, 1e-12);
  EXPECT_LE(r.conjugation, 1e-12);
  EXPECT_LE(r.cap_involution, 1e-12);
  EXPECT_LE(r.fold_idempotence, 1e-12);
  EXPECT_LE(r.fold_reflection, 1e-12);
  EXPECT_EQ(r.max(), std::max({r.mobius_inverse, r.unit_norm, r.conjugation, r.cap_involution,
                               r.fold_idempotence, r.fold_reflection}));
}

INSTANTIATE_TEST_SUITE_P(Dimensions, IdentitySuite, ::testing::Values(2, 3));

TEST(Geometry, RejectsInvalidInput) {
  EXPECT_THROW(check_dimension(1), GeometryError);
  EXPECT_THROW(check_dimension(kMaxAmbient), GeometryError);
  EXPECT_THROW(SpherePoint::normalized(Eigen::Vector3d::Zero()), GeometryError);
  EXPECT_THROW(SpherePoint::from_unit(Eigen::Vector3d(1.0, 1.0, 0.0)), GeometryError);
  EXPECT_THROW(BallPoint::make(Eigen::Vector3d(1.0, 0.0, 0.0)), GeometryError);
  EXPECT_THROW(Cap::make(SpherePoint::basis(2, 0), 1.0), GeometryError);
  EXPECT_THROW(Cap::make(SpherePoint::basis(2, 0), -0.1), GeometryError);
  EXPECT_THROW(mobius_transform(BallPoint::origin(3), SpherePoint::basis(2, 0)), GeometryError);
  EXPECT_THROW(geometry_identity_suite(2, 0, 1), GeometryError);
}

}  // namespace
}  // namespace confbound
