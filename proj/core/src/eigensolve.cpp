#include "confbound/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace confbound {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// M-orthonormalize the columns of V against the M-orthonormal block Q and
// among themselves. Columns that are numerically inside span(Q) are dropped.
MatrixXd m_orthonormalize(MatrixXd V, const MatrixXd& Q, const MatrixXd& MQ, const SparseMatrix& M) {
  if (V.cols() == 0) {
    return V;
  }
  {
    const VectorXd norms = (V.transpose() * (M * V)).diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Index j = 0; j < V.cols(); ++j) {
      if (norms[j] > 0.0) {
        V.col(j) /= norms[j];
      }
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    if (Q.cols() > 0) {
      V -= Q * (MQ.transpose() * V);
    }
    MatrixXd gram = V.transpose() * (M * V);
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
    const VectorXd& d = es.eigenvalues();
    std::vector<Index> keep;
    for (Index k = 0; k < d.size(); ++k) {
      if (d[k] > 1e-10) {
        keep.push_back(k);
      }
    }
    MatrixXd basis(V.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      basis.col(static_cast<Index>(k)) = V * es.eigenvectors().col(keep[k]) / std::sqrt(d[keep[k]]);
    }
    V = std::move(basis);
    if (V.cols() == 0) {
      break;
    }
  }
  return V;
}

VectorXd dual_norms(const MatrixXd& R, const Eigen::SimplicialLDLT<SparseMatrix>& mass_solver) {
  const MatrixXd MinvR = mass_solver.solve(R);
  return (R.cwiseProduct(MinvR)).colwise().sum().transpose().cwiseMax(0.0).cwiseSqrt();
}

SpectrumResult finish(const GalerkinPair& pair, VectorXd values, MatrixXd vectors,
                      const Eigen::SimplicialLDLT<SparseMatrix>& mass_solver) {
  SpectrumResult out;
  const MatrixXd R = pair.stiffness * vectors - (pair.mass * vectors) * values.asDiagonal();
  out.residuals = dual_norms(R, mass_solver);
  out.eigenvalues = std::move(values);
  out.eigenvectors = std::move(vectors);
  out.volume = (pair.mass * VectorXd::Ones(pair.mass.cols())).sum();
  return out;
}

SpectrumResult solve_dense(const GalerkinPair& pair, int nev, const Eigen::SimplicialLDLT<SparseMatrix>& mass_solver) {
  const MatrixXd K = MatrixXd(pair.stiffness);
  const MatrixXd M = MatrixXd(pair.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(K, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) {
    throw EigenError("dense generalized eigensolve failed (mass matrix not positive definite?)");
  }
  SpectrumResult out = finish(pair, ges.eigenvalues().head(nev), ges.eigenvectors().leftCols(nev), mass_solver);
  out.dense = true;
  return out;
}

}  // namespace

SpectrumResult solve_bottom(const GalerkinPair& pair, const EigenOptions& options) {
  const SparseMatrix& K = pair.stiffness;
  const SparseMatrix& M = pair.mass;
  const Index n = K.rows();
  if (options.count < 3) {
    throw EigenError("solve_bottom needs count >= 3");
  }
  if (K.cols() != n || M.rows() != n || M.cols() != n) {
    throw EigenError("stiffness and mass matrices must be square and of equal size");
  }
  const int nev = options.count + 1;
  if (nev > n) {
    throw EigenError("requested more eigenpairs than unknowns");
  }

  Eigen::SimplicialLDLT<SparseMatrix> mass_solver(M);
  if (mass_solver.info() != Eigen::Success || (mass_solver.vectorD().array() <= 0.0).any()) {
    throw EigenError("mass matrix is not positive definite");
  }

  const int guard = options.guard >= 0 ? options.guard : std::max(5, nev);
  const Index block = std::min<Index>(nev + guard, n);
  if (n < options.dense_threshold || 3 * block >= n) {
    return solve_dense(pair, nev, mass_solver);
  }

  const double sigma = 1e-4 * K.diagonal().sum() / M.diagonal().sum();
  const SparseMatrix shifted = K + sigma * M;
  Eigen::SimplicialLDLT<SparseMatrix> precond(shifted);
  if (precond.info() != Eigen::Success) {
    throw EigenError("factorization of the shifted stiffness matrix failed");
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd X(n, block);
  for (Index j = 0; j < block; ++j) {
    for (Index i = 0; i < n; ++i) {
      X(i, j) = normal(rng);
    }
  }
  const MatrixXd empty(n, 0);
  X = m_orthonormalize(std::move(X), empty, empty, M);
  if (X.cols() < nev) {
    throw EigenError("starting block is rank deficient");
  }

  VectorXd lambda;
  {
    MatrixXd A = X.transpose() * (K * X);
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    X = X * es.eigenvectors();
    lambda = es.eigenvalues();
  }

  MatrixXd P(n, 0);
  VectorXd residuals;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const MatrixXd MX = M * X;
    const MatrixXd R = K * X - MX * lambda.asDiagonal();
    residuals = dual_norms(R, mass_solver);

    std::vector<Index> active;
    bool wanted_done = true;
    for (Index j = 0; j < X.cols(); ++j) {
      const bool ok = residuals[j] <= options.tol;
      if (!ok) {
        active.push_back(j);
        if (j < nev) {
          wanted_done = false;
        }
      }
    }
    if (wanted_done) {
      break;
    }

    MatrixXd W(n, static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      W.col(static_cast<Index>(k)) = precond.solve(R.col(active[k]));
    }
    W = m_orthonormalize(std::move(W), X, MX, M);
    MatrixXd XW(n, X.cols() + W.cols());
    XW << X, W;
    if (P.cols() > 0) {
      P = m_orthonormalize(std::move(P), XW, M * XW, M);
    }
    MatrixXd S(n, XW.cols() + P.cols());
    S << XW, P;

    MatrixXd A = S.transpose() * (K * S);
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    const Index keep = std::min<Index>(block, S.cols());
    const MatrixXd C = es.eigenvectors().leftCols(keep);
    lambda = es.eigenvalues().head(keep);
    const Index nx = X.cols();
    P = S.rightCols(S.cols() - nx) * C.bottomRows(S.cols() - nx);
    X = S * C;
  }

  const bool converged = iter < options.max_iterations;
  if (!converged) {
    std::ostringstream msg;
    msg << "eigensolver did not converge in " << options.max_iterations << " iterations; residuals:";
    for (int j = 0; j < nev; ++j) {
      msg << ' ' << residuals[j];
    }
    throw EigenError(msg.str());
  }
  SpectrumResult out = finish(pair, lambda.head(nev), X.leftCols(nev), mass_solver);
  out.iterations = iter;
  return out;
}

double normalized_eigenvalue(const SpectrumResult& result, int k, int m) {
  if (k < 0 || k >= result.eigenvalues.size()) {
    throw EigenError("eigenvalue index out of range");
  }
  return result.eigenvalues[k] * std::pow(result.volume, 2.0 / m);
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& result, int m, int level) {
  const auto old_precision = out.precision(17);
  out << "# m=" << m << '\n';
  out << "# level=" << level << '\n';
  out << "# volume=" << result.volume << '\n';
  out << "k,lambda,residual\n";
  for (Eigen::Index k = 0; k < result.eigenvalues.size(); ++k) {
    out << k << ',' << result.eigenvalues[k] << ',' << result.residuals[k] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace confbound
