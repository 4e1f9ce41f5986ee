#include "confbound/constants.hpp"
#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/mesh.hpp"
#include "confbound/verify.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <numbers>

namespace confbound {
namespace {

struct DegreeCase {
  int m;
  int level;
};

class DegreeAtResolution : public ::testing::TestWithParam<DegreeCase> {
 protected:
  DegreeOptions options() const {
    DegreeOptions o;
    o.level = GetParam().level;
    o.max_level = GetParam().level + 2;
    return o;
  }
};

TEST_P(DegreeAtResolution, Identity) {
  const auto r = degree(GetParam().m, [](const Vec& y) { return y; }, options());
  EXPECT_EQ(r.degree, 1);
  EXPECT_EQ(r.level, GetParam().level);
}

TEST_P(DegreeAtResolution, AntipodalHasDegreeMinusOneToTheMPlusOne) {
  const int m = GetParam().m;
  EXPECT_EQ(degree(m, [](const Vec& y) { return Vec(-y); }, options()).degree, m % 2 == 0 ? -1 : 1);
}

TEST_P(DegreeAtResolution, Reflection) {
  const auto r = degree(GetParam().m, [](const Vec& y) {
    Vec z = y;
    z[0] = -z[0];
    return z;
  }, options());
  EXPECT_EQ(r.degree, -1);
}

TEST_P(DegreeAtResolution, Constant) {
  const int m = GetParam().m;
  EXPECT_EQ(degree(m, [m](const Vec&) { return Vec(SpherePoint::basis(m, 0).coords()); }, options()).degree, 0);
}

INSTANTIATE_TEST_SUITE_P(Meshes, DegreeAtResolution,
                         ::testing::Values(DegreeCase{2, 2}, DegreeCase{2, 3}, DegreeCase{3, 2}, DegreeCase{3, 3}),
                         [](const ::testing::TestParamInfo<DegreeCase>& info) {
                           return "m" + std::to_string(info.param.m) + "_level" + std::to_string(info.param.level);
                         });

TEST(Degree, DegreeTwoMapNeedsRefinement) {
  // z -> z^2 on the Riemann sphere, via stereographic coordinates.
  auto square = [](const Vec& y) {
    const double den = 1.0 - y[2];
    if (den < 1e-12) {
      return Vec(SpherePoint::basis(2, 2).coords());
    }
    const std::complex<double> z(y[0] / den, y[1] / den);
    const std::complex<double> w = z * z;
    const double n = std::norm(w);
    Vec out(3);
    out << 2.0 * w.real() / (1.0 + n), 2.0 * w.imag() / (1.0 + n), (n - 1.0) / (n + 1.0);
    return out;
  };
  DegreeOptions o;
  o.level = 1;
  o.max_level = 5;
  const auto r = degree(2, square, o);
  EXPECT_EQ(r.degree, 2);
}

TEST(Degree, FailsWhenStarConditionNeverHolds) {
  DegreeOptions o;
  o.level = 0;
  o.max_level = 1;
  // Degree 1, but its direction turns through a full circle within 0.05 of the north pole.
  EXPECT_THROW(degree(2, [](const Vec& y) {
    Vec z = y;
    z[2] -= 0.999;
    return z;
  }, o), DegreeError);
  EXPECT_THROW(degree(2, [](const Vec&) { return Vec(Vec::Zero(3)); }, o), DegreeError);
}

TEST(Energy, IdentityEnergyOfTheTwoSphere) {
  const Mesh mesh = build_mesh(2, 5);
  const double e = dirichlet_m_energy(mesh, mesh.vertices);
  EXPECT_NEAR(e, identity_m_energy(2), 0.01 * identity_m_energy(2));
}

TEST(Energy, TwoDimensionalMetricEnergyIsDiscretelyInvariant) {
  const Mesh mesh = build_mesh(2, 3);
  const Eigen::VectorXd phi = ConformalMetric::random(2, 4, 0.5, 3).sample(mesh);
  Eigen::MatrixXd F(2, mesh.vertex_count());
  F.row(0) = mesh.vertices.row(0).array().square();
  F.row(1) = mesh.vertices.row(1).array() * mesh.vertices.row(2).array();
  const double round = dirichlet_m_energy(mesh, F);
  EXPECT_NEAR(metric_m_energy(mesh, F, phi), round, 1e-12 * round);
}

TEST(Energy, RegionSplitsAdditively) {
  const Mesh mesh = build_mesh(3, 2);
  const CapChoice cap = Cap::make(SpherePoint::basis(3, 1), 0.3);
  const CellRegion in = cap_region(cap);
  const CellRegion out = [&](const Vec& z) { return !in(z); };
  const double whole = dirichlet_m_energy(mesh, mesh.vertices);
  EXPECT_NEAR(dirichlet_m_energy(mesh, mesh.vertices, in) + dirichlet_m_energy(mesh, mesh.vertices, out), whole,
              1e-12 * whole);
  EXPECT_FALSE(static_cast<bool>(cap_region(CapChoice{})));
}

TEST(Energy, ConformalInvarianceResiduals) {
  const Mesh coarse = build_mesh(2, 4);
  const Mesh fine = build_mesh(2, 5);
  const AmbientMap F = [](const Vec& y) {
    Eigen::VectorXd v(3);
    v << y[0], y[1] * y[1], y[0] * y[2];
    return v;
  };
  const BallPoint x = BallPoint::make(Eigen::Vector3d(0.2, -0.3, 0.1));
  const SpherePoint p = SpherePoint::normalized(Eigen::Vector3d(0.3, 0.4, -0.5));
  const Cap omega = Cap::make(SpherePoint::normalized(Eigen::Vector3d(1.0, 0.5, 0.2)), 0.2);
  const auto a = conformal_invariance_check(coarse, F, x, p, omega, ConformalMetric::random(2, 3, 0.4, 8).sample(coarse));
  const auto b = conformal_invariance_check(fine, F, x, p, omega, ConformalMetric::random(2, 3, 0.4, 8).sample(fine));
  EXPECT_LE(b.mobius, 0.01);
  EXPECT_LE(b.reflection, 0.01);
  EXPECT_LE(b.metric, 1e-12);
  EXPECT_LT(b.mobius, a.mobius);
}

TEST(Energy, RejectsMismatchedMaps) {
  const Mesh mesh = build_mesh(2, 1);
  EXPECT_THROW(dirichlet_m_energy(mesh, Eigen::MatrixXd::Zero(3, 5)), VerifyError);
  EXPECT_THROW(metric_m_energy(mesh, mesh.vertices, Eigen::VectorXd::Zero(3)), VerifyError);
}

}  // namespace
}  // namespace confbound
