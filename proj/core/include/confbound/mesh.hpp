#pragma once

#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <stdexcept>

namespace confbound {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A flat-simplex triangulation of S^m with vertices on the sphere.
///
/// m = 2: subdivided icosahedron. m = 3: subdivided boundary of the 16-cell.
/// Every cell is oriented so that det[v_0, ..., v_m] > 0 (outward).
struct Mesh {
  int m = 2;
  int level = 0;
  Eigen::MatrixXd vertices;       // (m+1) x V
  Eigen::MatrixXi cells;          // (m+1) x C, vertex indices
  Eigen::VectorXd cell_volumes;   // flat simplex volume
  Eigen::VectorXd vertex_weights; // sum of incident cell volumes / (m+1)

  Eigen::Index vertex_count() const { return vertices.cols(); }
  Eigen::Index cell_count() const { return cells.cols(); }
  double total_weight() const { return vertex_weights.sum(); }
  Vec vertex(Eigen::Index i) const { return vertices.col(i); }
  /// Normalized centroid of a cell.
  Vec cell_center(Eigen::Index c) const;
};

Mesh build_mesh(int m, int level);

/// Per-cell flat geometry: volume and the ambient gradients of the m+1
/// barycentric hat functions (columns).
struct CellGeometry {
  double volume = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient> gradients;
};

/// Throws MeshError naming the cell if it is degenerate.
CellGeometry cell_geometry(const Mesh& mesh, Eigen::Index cell);

/// Barycentric coordinates of the cell containing y (after radial projection),
/// as (cell index, weights summing to 1). Throws if no cell contains y.
std::pair<Eigen::Index, Vec> locate(const Mesh& mesh, const Vec& y);

/// OFF export. m = 2 writes "OFF" with triangles; m = 3 writes "4OFF" with
/// 4-dimensional coordinates and tetrahedral cells.
void write_off(std::ostream& out, const Mesh& mesh);

}  // namespace confbound
