#include "confbound/constants.hpp"
#include "confbound/mesh.hpp"
#include "confbound/optimize.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

namespace confbound {
namespace {

TEST(TwoBubble, ConcentrationRadius) {
  EXPECT_DOUBLE_EQ(concentration_radius(0.0), 0.0);
  EXPECT_DOUBLE_EQ(concentration_radius(1.0), 0.5);
  EXPECT_DOUBLE_EQ(concentration_radius(3.0), 0.75);
  EXPECT_THROW(concentration_radius(-1.0), OptimizeError);
}

TEST(TwoBubble, VolumeIsTwiceTheSphere) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 5));
  for (double s : {0.0, 1.0, 2.0}) {
    const double vol = volume_measure(two_bubble(s, SpherePoint::basis(2, 2), mesh), *mesh).total_mass();
    EXPECT_NEAR(vol, 2.0 * sphere_volume(2), 0.01 * 2.0 * sphere_volume(2)) << "s = " << s;
  }
}

TEST(TwoBubble, SymmetricUnderAntipodalMap) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 3));
  const SpherePoint axis = SpherePoint::normalized(Eigen::Vector3d(1.0, 2.0, 2.0));
  const ConformalMetric g = two_bubble(1.5, axis, mesh);
  for (int k = 0; k < 20; ++k) {
    const SpherePoint y = SpherePoint::normalized(mesh->vertices.col(k * 7));
    EXPECT_NEAR(interpolate(g, y), interpolate(g, -y), 1e-12);
  }
}

TEST(TwoBubble, SecondEigenvalueGrowsWithConcentration) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 4));
  double previous = 0.0;
  for (double s : {0.0, 1.0, 2.0, 4.0}) {
    const Objective obj = evaluate_objective(*mesh, two_bubble(s, SpherePoint::basis(2, 2), mesh).values());
    EXPECT_GT(obj.lambda2, previous) << "s = " << s;
    EXPECT_LT(obj.lambda2, second_eigenvalue_bound(2));
    previous = obj.lambda2;
  }
}

TEST(TwoBubble, RejectsBadInput) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 1));
  EXPECT_THROW(two_bubble(1.0, SpherePoint::basis(3, 0), mesh), OptimizeError);
  EXPECT_THROW(two_bubble(1.0, SpherePoint::basis(2, 0), nullptr), OptimizeError);
}

TEST(Objective, ScaleInvariant) {
  const Mesh mesh = build_mesh(2, 3);
  const Eigen::VectorXd phi = ConformalMetric::random(2, 3, 0.4, 6).sample(mesh);
  const Objective a = evaluate_objective(mesh, phi);
  const Objective b = evaluate_objective(mesh, phi.array() + 2.0);
  EXPECT_NEAR(a.lambda2, b.lambda2, 1e-10 * a.lambda2);
  EXPECT_NEAR(b.volume, a.volume * std::exp(4.0), 1e-10 * b.volume);
}

class Maximize : public ::testing::Test {
 protected:
  static OptimizationRun run(int workers, int budget = 20) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(2, 2));
    MaximizeOptions o;
    o.degree = 2;
    o.budget = budget;
    o.seed = 9;
    o.workers = workers;
    return maximize(ConformalMetric::round(2), mesh, o);
  }
};

TEST_F(Maximize, AscentAndBookkeeping) {
  const OptimizationRun r = run(1);
  ASSERT_EQ(r.history.size(), 20u);
  EXPECT_EQ(r.history.front().coeffs, std::vector<double>(8, 0.0));  // L = 2 without degree 0
  double best = -1.0;
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    const Iterate& it = r.history[k];
    EXPECT_EQ(it.index, static_cast<int>(k));
    best = std::max(best, it.objective);
    EXPECT_DOUBLE_EQ(it.best_so_far, best);
    EXPECT_LE(it.objective, second_eigenvalue_bound(2) * 1.02);
  }
  EXPECT_DOUBLE_EQ(r.best, best);
  EXPECT_GE(r.best, r.history.front().objective);
  EXPECT_EQ(r.termination, "budget exhausted");
}

TEST_F(Maximize, DeterministicAcrossWorkerCounts) {
  const OptimizationRun a = run(1, 12);
  const OptimizationRun b = run(3, 12);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    EXPECT_EQ(a.history[k].coeffs, b.history[k].coeffs);
    EXPECT_EQ(a.history[k].objective, b.history[k].objective);
  }
}

TEST_F(Maximize, LogHasOneLinePerEvaluation) {
  const OptimizationRun r = run(1, 7);
  std::ostringstream log;
  write_run_jsonl(log, r);
  std::istringstream in(log.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto doc = nlohmann::json::parse(line);
    EXPECT_TRUE(doc.contains("objective"));
    EXPECT_TRUE(doc.contains("best_so_far"));
    ++lines;
  }
  EXPECT_EQ(lines, 7);
}

TEST_F(Maximize, RejectsBadOptions) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, 1));
  MaximizeOptions o;
  o.budget = 0;
  EXPECT_THROW(maximize(ConformalMetric::round(2), mesh, o), OptimizeError);
  o.budget = 5;
  o.degree = 0;
  EXPECT_THROW(maximize(ConformalMetric::round(2), mesh, o), OptimizeError);
}

}  // namespace
}  // namespace confbound
