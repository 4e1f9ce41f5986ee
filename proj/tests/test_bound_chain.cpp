#include "confbound/constants.hpp"
#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/mesh.hpp"
#include "confbound/verify.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <numeric>

namespace confbound {
namespace {

struct Chain {
  std::shared_ptr<const Discretization> d;
  SpectrumResult spectrum;
  ChainReport report;
};

Chain run_chain(const ConformalMetric& g, int m, int level, ChainOptions options = {}) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(m, level));
  Chain c;
  c.d = std::make_shared<const Discretization>(discretize(g, mesh));
  c.spectrum = solve_bottom(c.d->pair);
  options.zero.grid_points = 128;
  options.zero.t_steps = 17;
  c.report = bound_chain(c.d, c.spectrum, options);
  return c;
}

TEST(BoundChain, RandomMetricOnTheTwoSphere) {
  const Chain c = run_chain(ConformalMetric::random(2, 4, 0.5, 21), 2, 3);
  const ChainReport& r = c.report;
  EXPECT_TRUE(r.all_hold());
  EXPECT_EQ(r.links.size(), 3u + 6u);
  EXPECT_TRUE(r.zero_converged);
  EXPECT_LE(r.field_residual, 1e-6);
  EXPECT_LE(r.orthogonality, 1e-10);
  EXPECT_NEAR(std::accumulate(r.denominators.begin(), r.denominators.end(), 0.0), r.volume, 1e-9 * r.volume);
  EXPECT_DOUBLE_EQ(r.bound, 16.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(r.slack, 0.02);
  EXPECT_LT(r.normalized_lambda2, r.bound);
  // Links follow the chain order, each right side feeding the next left side.
  EXPECT_EQ(r.links[3].name, "averaging");
  EXPECT_EQ(r.links.back().name, "bound");
  for (std::size_t k = 4; k + 1 < r.links.size(); ++k) {
    EXPECT_DOUBLE_EQ(r.links[k].lhs, r.links[k - 1].rhs) << r.links[k].name;
  }
}

TEST(BoundChain, RoundMetricValues) {
  const Chain c = run_chain(ConformalMetric::round(2), 2, 3);
  EXPECT_TRUE(c.report.all_hold());
  EXPECT_NEAR(c.report.normalized_lambda1, 8.0 * std::numbers::pi, 0.01 * 8.0 * std::numbers::pi);
  EXPECT_NEAR(c.report.normalized_lambda2, 8.0 * std::numbers::pi, 0.01 * 8.0 * std::numbers::pi);
}

TEST(BoundChain, WholeSphereBranchUsesTheFirstEigenvalueEstimate) {
  ChainOptions options;
  options.force_whole_sphere = true;
  const Chain c = run_chain(ConformalMetric::random(2, 2, 0.3, 22), 2, 3, options);
  EXPECT_TRUE(c.report.whole_sphere);
  EXPECT_DOUBLE_EQ(c.report.estimate, first_eigenvalue_bound(2));
  // Without a fold the recentered identity is the trial map itself.
  EXPECT_NEAR(c.report.folded_cap, c.report.post_holder, 1e-12 * c.report.post_holder);
  EXPECT_TRUE(c.report.all_hold());
}

TEST(BoundChain, ThreeSphere) {
  const Chain c = run_chain(ConformalMetric::random(3, 2, 0.4, 23), 3, 2);
  EXPECT_TRUE(c.report.all_hold());
  EXPECT_DOUBLE_EQ(c.report.slack, 0.03);
  EXPECT_EQ(c.report.links.size(), 4u + 6u);
}

TEST(BoundChain, JsonCarriesEveryLink) {
  const Chain c = run_chain(ConformalMetric::random(2, 2, 0.3, 24), 2, 2);
  const nlohmann::json doc = to_json(c.report);
  EXPECT_EQ(doc["links"].size(), c.report.links.size());
  EXPECT_EQ(doc["all_hold"].get<bool>(), c.report.all_hold());
  EXPECT_DOUBLE_EQ(doc["normalized_lambda2"].get<double>(), c.report.normalized_lambda2);
}

TEST(BoundChain, TrialFamilyIsOrthogonalToConstants) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 3));
  const Discretization d = discretize(ConformalMetric::random(2, 4, 0.5, 25), mesh);
  const CapChoice cap = Cap::make(SpherePoint::normalized(Eigen::Vector3d(0.2, 0.9, -0.1)), 0.4);
  const TrialFamily family = trial_family(d, cap);
  EXPECT_LE(family.means.cwiseAbs().maxCoeff(), 1e-12 * d.volume());
  for (Eigen::Index i = 0; i < family.values.cols(); ++i) {
    EXPECT_NEAR(family.values.col(i).norm(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace confbound
