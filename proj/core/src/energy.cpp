#include "confbound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace confbound {

CellRegion cap_region(const CapChoice& cap) {
  if (!cap) {
    return {};
  }
  const kernel::FoldMap fold_map(cap);
  return [fold_map](const Vec& z) { return fold_map.contains(z); };
}

namespace {

// sum_j |grad F_j|^2 on one cell.
double cell_energy_density(const Mesh& mesh, const Eigen::MatrixXd& F, Eigen::Index c, const CellGeometry& geom) {
  const int d = mesh.m + 1;
  Eigen::MatrixXd local(F.rows(), d);
  for (int k = 0; k < d; ++k) {
    local.col(k) = F.col(mesh.cells(k, c));
  }
  return (local * geom.gradients.transpose()).squaredNorm();
}

void check_map(const Mesh& mesh, const Eigen::MatrixXd& F) {
  if (F.cols() != mesh.vertex_count()) {
    throw VerifyError("nodal map has " + std::to_string(F.cols()) + " columns for " +
                      std::to_string(mesh.vertex_count()) + " vertices");
  }
}

}  // namespace

double dirichlet_m_energy(const Mesh& mesh, const Eigen::MatrixXd& F, const CellRegion& region) {
  check_map(mesh, F);
  const double half_m = 0.5 * mesh.m;
  double total = 0.0;
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    if (region && !region(mesh.cell_center(c))) {
      continue;
    }
    const CellGeometry geom = cell_geometry(mesh, c);
    total += geom.volume * std::pow(cell_energy_density(mesh, F, c, geom), half_m);
  }
  return total;
}

double metric_m_energy(const Mesh& mesh, const Eigen::MatrixXd& F, const Eigen::VectorXd& phi,
                       const CellRegion& region) {
  check_map(mesh, F);
  if (phi.size() != mesh.vertex_count()) {
    throw VerifyError("nodal conformal factor does not match the mesh");
  }
  const int m = mesh.m;
  const int d = m + 1;
  double total = 0.0;
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    if (region && !region(mesh.cell_center(c))) {
      continue;
    }
    const CellGeometry geom = cell_geometry(mesh, c);
    // stiffness weight: |grad u|_g^2 dv_g ~ rho |grad u|^2 dv_0;
    // mass weight: dv_g ~ mu dv_0.
    double rho = 0.0;
    double mu = 0.0;
    for (int k = 0; k < d; ++k) {
      const double p = phi[mesh.cells(k, c)];
      rho += std::exp((m - 2) * p);
      mu += std::exp(m * p);
    }
    rho /= d;
    mu /= d;
    const double density_g = cell_energy_density(mesh, F, c, geom) * rho / mu;
    total += geom.volume * mu * std::pow(density_g, 0.5 * m);
  }
  return total;
}

Eigen::MatrixXd sample_map(const Mesh& mesh, const AmbientMap& F) {
  if (mesh.vertex_count() == 0) {
    return {};
  }
  const Eigen::VectorXd first = F(mesh.vertices.col(0));
  Eigen::MatrixXd out(first.size(), mesh.vertex_count());
  out.col(0) = first;
  for (Eigen::Index i = 1; i < mesh.vertex_count(); ++i) {
    const Eigen::VectorXd v = F(mesh.vertices.col(i));
    if (v.size() != first.size()) {
      throw VerifyError("test map returned vectors of different lengths");
    }
    out.col(i) = v;
  }
  return out;
}

namespace {

double relative_gap(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

}  // namespace

InvarianceResiduals conformal_invariance_check(const Mesh& mesh, const AmbientMap& F, const BallPoint& x,
                                               const SpherePoint& p, const Cap& omega,
                                               const Eigen::VectorXd& phi) {
  if (x.dim() != mesh.m || p.dim() != mesh.m || omega.dim() != mesh.m) {
    throw VerifyError("invariance check arguments do not match the mesh dimension");
  }
  const kernel::FoldMap in_omega(omega);
  const CellRegion omega_region = [&](const Vec& z) { return in_omega.contains(z); };
  const Eigen::MatrixXd plain = sample_map(mesh, F);
  const double plain_energy = dirichlet_m_energy(mesh, plain, omega_region);

  InvarianceResiduals out;
  {
    const Vec xv = x.coords();
    const Vec neg_x = -xv;
    const Eigen::MatrixXd composed =
        sample_map(mesh, [&](const Vec& y) { return F(kernel::mobius(xv, y)); });
    const double lhs = dirichlet_m_energy(mesh, composed, omega_region);
    const double rhs =
        dirichlet_m_energy(mesh, plain, [&](const Vec& z) { return in_omega.contains(kernel::mobius(neg_x, z)); });
    out.mobius = relative_gap(lhs, rhs);
  }
  {
    const Vec pv = p.coords();
    const Eigen::MatrixXd composed =
        sample_map(mesh, [&](const Vec& y) { return F(kernel::reflect(pv, y)); });
    const double lhs = dirichlet_m_energy(mesh, composed, omega_region);
    const double rhs =
        dirichlet_m_energy(mesh, plain, [&](const Vec& z) { return in_omega.contains(kernel::reflect(pv, z)); });
    out.reflection = relative_gap(lhs, rhs);
  }
  out.metric = relative_gap(metric_m_energy(mesh, plain, phi, omega_region), plain_energy);
  return out;
}

}  // namespace confbound
