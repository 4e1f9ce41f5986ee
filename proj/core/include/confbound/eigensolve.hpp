#pragma once

#include "confbound/discretize.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>

namespace confbound {

class EigenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenOptions {
  /// Highest index K; the solve returns lambda_0 .. lambda_K.
  int count = 9;
  /// Residual target |K v - lambda M v|_{M^{-1}} <= tol for M-normalized v.
  double tol = 1e-8;
  std::uint64_t seed = 0x5eedULL;
  /// Pencils smaller than this are solved densely.
  Eigen::Index dense_threshold = 2000;
  int max_iterations = 1000;
  /// Extra block columns beyond count + 1; -1 picks max(5, count + 1).
  int guard = -1;
};

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending, lambda_0 .. lambda_K
  Eigen::MatrixXd eigenvectors;  // columns, mass-orthonormal
  Eigen::VectorXd residuals;     // |K v - lambda M v|_{M^{-1}}
  double volume = 0.0;           // 1^T M 1
  int iterations = 0;
  bool dense = false;
};

/// Bottom of the spectrum of the pencil (stiffness, mass).
///
/// Large pencils use a block LOBPCG iteration preconditioned by a sparse
/// Cholesky factorization of stiffness + sigma mass, with an explicitly
/// mass-orthonormalized search basis [X, W, P]. The starting block is drawn
/// from `seed`.
SpectrumResult solve_bottom(const GalerkinPair& pair, const EigenOptions& options = {});

/// lambda_k Vol^{2/m}.
double normalized_eigenvalue(const SpectrumResult& result, int k, int m);

/// "# m=..", "# level=..", "# volume=.." header lines, then "k,lambda,residual".
void write_spectrum_csv(std::ostream& out, const SpectrumResult& result, int m, int level);

}  // namespace confbound
