#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/mesh.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace confbound {
namespace {

TEST(Eigensolve, RoundTwoSphereMultiplets) {
  const Mesh mesh = build_mesh(2, 4);
  const SpectrumResult s = solve_bottom(assemble(ConformalMetric::round(2), mesh));
  ASSERT_EQ(s.eigenvalues.size(), 10);
  EXPECT_NEAR(s.eigenvalues[0], 0.0, 1e-9);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(s.eigenvalues[k], 2.0, 0.01 * 2.0) << k;
  }
  for (int k = 4; k <= 8; ++k) {
    EXPECT_NEAR(s.eigenvalues[k], 6.0, 0.01 * 6.0) << k;
  }
  EXPECT_GT(s.eigenvalues[9], 11.0);  // l = 3 starts at 12
  EXPECT_LE(s.residuals.maxCoeff(), 1e-8);
}

TEST(Eigensolve, RoundThreeSphereFirstEigenvalue) {
  const SpectrumResult s = solve_bottom(assemble(ConformalMetric::round(3), build_mesh(3, 3)));
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(s.eigenvalues[k], 3.0, 0.03 * 3.0) << k;
  }
}

TEST(Eigensolve, EigenvectorsAreMassOrthonormal) {
  const GalerkinPair pair = assemble(ConformalMetric::random(2, 4, 0.5, 3), build_mesh(2, 3));
  const SpectrumResult s = solve_bottom(pair);
  const Eigen::MatrixXd gram = s.eigenvectors.transpose() * pair.mass * s.eigenvectors;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(s.volume, Eigen::MatrixXd(pair.mass).sum(), 1e-12);
  for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) {
    EXPECT_GE(s.eigenvalues[k], s.eigenvalues[k - 1]);
  }
}

TEST(Eigensolve, IterativeAgreesWithDense) {
  const GalerkinPair pair = assemble(ConformalMetric::random(2, 4, 0.5, 4), build_mesh(2, 3));
  EigenOptions dense;
  EigenOptions iterative;
  iterative.dense_threshold = 0;
  const SpectrumResult a = solve_bottom(pair, dense);
  const SpectrumResult b = solve_bottom(pair, iterative);
  ASSERT_TRUE(a.dense);
  ASSERT_FALSE(b.dense);
  EXPECT_LT((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Eigensolve, ScaleInvarianceOfNormalizedEigenvalues) {
  const Mesh mesh = build_mesh(2, 3);
  const ConformalMetric g = ConformalMetric::random(2, 4, 0.5, 5);
  const SpectrumResult base = solve_bottom(assemble(g, mesh));
  for (double shift : {-1.0, 0.5, 2.0}) {
    const SpectrumResult s = solve_bottom(assemble(g.shifted(shift), mesh));
    for (int k = 1; k <= 5; ++k) {
      const double a = normalized_eigenvalue(base, k, 2);
      EXPECT_NEAR(normalized_eigenvalue(s, k, 2), a, 1e-10 * a) << "shift " << shift << " k " << k;
    }
  }
}

TEST(Eigensolve, SpectrumCsvHasHeaderAndRows) {
  const Mesh mesh = build_mesh(2, 1);
  const SpectrumResult s = solve_bottom(assemble(ConformalMetric::round(2), mesh));
  std::ostringstream csv;
  write_spectrum_csv(csv, s, 2, 1);
  std::istringstream in(csv.str());
  std::string line;
  int comments = 0;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) == 0) {
      ++comments;
    } else if (!header) {
      EXPECT_EQ(line, "k,lambda,residual");
      header = true;
    } else {
      ++rows;
    }
  }
  EXPECT_EQ(comments, 3);
  EXPECT_EQ(rows, s.eigenvalues.size());
}

TEST(Eigensolve, RejectsBadOptions) {
  const GalerkinPair pair = assemble(ConformalMetric::round(2), build_mesh(2, 1));
  EigenOptions bad;
  bad.count = 0;
  EXPECT_THROW(solve_bottom(pair, bad), EigenError);
  bad.count = 100;  // more eigenpairs than unknowns
  EXPECT_THROW(solve_bottom(pair, bad), EigenError);
}

}  // namespace
}  // namespace confbound
