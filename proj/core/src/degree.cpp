#include "confbound/verify.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

namespace confbound {

namespace {

using Square = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient>;

bool star_condition(const Mesh& mesh, const Eigen::MatrixXd& images, double min_cos) {
  const int d = mesh.m + 1;
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        if (images.col(mesh.cells(a, c)).dot(images.col(mesh.cells(b, c))) < min_cos) {
          return false;
        }
      }
    }
  }
  return true;
}

// Signed count of cells whose image cone contains q; nullopt when q lies too
// close to the boundary of some image cone.
std::optional<int> signed_count(const Mesh& mesh, const Eigen::MatrixXd& images, const Vec& q) {
  const int d = mesh.m + 1;
  Square corners(d, d);
  int total = 0;
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    for (int k = 0; k < d; ++k) {
      corners.col(k) = images.col(mesh.cells(k, c));
    }
    const double det = corners.determinant();
    if (std::abs(det) < 1e-14) {
      // Collapsed image: its cone has no interior.
      continue;
    }
    const Vec coeffs = corners.partialPivLu().solve(q);
    const double lowest = coeffs.minCoeff();
    if (std::abs(lowest) < 1e-10) {
      return std::nullopt;
    }
    if (lowest > 0.0) {
      total += det > 0.0 ? 1 : -1;
    }
  }
  return total;
}

}  // namespace

DegreeResult degree(int m, const SphereVectorMap& map, const DegreeOptions& options) {
  if (options.level < 0 || options.max_level < options.level) {
    throw DegreeError("invalid degree mesh levels");
  }
  const double min_cos = std::cos(options.star_angle);
  for (int level = options.level; level <= options.max_level; ++level) {
    const Mesh mesh = build_mesh(m, level);
    Eigen::MatrixXd images(m + 1, mesh.vertex_count());
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
      const Vec v = map(mesh.vertices.col(i));
      const double n = v.norm();
      if (v.size() != m + 1 || !(n > 0.0) || !std::isfinite(n)) {
        throw DegreeError("map value at a mesh vertex cannot be normalized");
      }
      images.col(i) = v / n;
    }
    if (!star_condition(mesh, images, min_cos)) {
      continue;
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 32; ++attempt) {
      Vec q(m + 1);
      for (int k = 0; k <= m; ++k) {
        q[k] = normal(rng);
      }
      q /= q.norm();
      if (const auto count = signed_count(mesh, images, q)) {
        return DegreeResult{*count, level, q};
      }
    }
    throw DegreeError("no regular value found for the simplicial approximation");
  }
  std::ostringstream msg;
  msg << "simplicial star condition still fails at mesh level " << options.max_level
      << "; the map varies too fast for this resolution";
  throw DegreeError(msg.str());
}

DegreeResult reflection_symmetry_degree_check(const VectorField& field, const DegreeOptions& options) {
  const double floor = 1e-12 * field.volume();
  return degree(
      field.dim(),
      [&](const Vec& y) {
        const Vec v = field(Cap::make(SpherePoint::from_unit(y, 1e-9), 0.0));
        if (v.norm() <= floor) {
          throw DegreeError("the t = 0 vector field vanishes at a degree mesh vertex");
        }
        return v;
      },
      options);
}

}  // namespace confbound
