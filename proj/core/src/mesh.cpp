#include "confbound/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace confbound {

namespace {

using Cell = std::array<int, 4>;

struct Builder {
  int m;
  std::vector<Vec> vertices;
  std::vector<Cell> cells;
  std::map<std::pair<int, int>, int> midpoints;

  int add_vertex(const Vec& v) {
    vertices.push_back(v / v.norm());
    return static_cast<int>(vertices.size()) - 1;
  }

  int midpoint(int a, int b) {
    const auto key = std::minmax(a, b);
    if (auto it = midpoints.find(key); it != midpoints.end()) {
      return it->second;
    }
    const int idx = add_vertex(Vec(vertices[static_cast<std::size_t>(a)] + vertices[static_cast<std::size_t>(b)]));
    midpoints.emplace(key, idx);
    return idx;
  }

  double dist(int a, int b) const {
    return (vertices[static_cast<std::size_t>(a)] - vertices[static_cast<std::size_t>(b)]).norm();
  }

  void subdivide() {
    midpoints.clear();
    std::vector<Cell> next;
    next.reserve(cells.size() * (m == 2 ? 4 : 8));
    for (const Cell& c : cells) {
      if (m == 2) {
        const int a = c[0], b = c[1], d = c[2];
        const int ab = midpoint(a, b), bd = midpoint(b, d), da = midpoint(d, a);
        next.push_back({a, ab, da, -1});
        next.push_back({b, bd, ab, -1});
        next.push_back({d, da, bd, -1});
        next.push_back({ab, bd, da, -1});
        continue;
      }
      const int a = c[0], b = c[1], cc = c[2], d = c[3];
      const int ab = midpoint(a, b), ac = midpoint(a, cc), ad = midpoint(a, d);
      const int bc = midpoint(b, cc), bd = midpoint(b, d), cd = midpoint(cc, d);
      next.push_back({a, ab, ac, ad});
      next.push_back({b, ab, bc, bd});
      next.push_back({cc, ac, bc, cd});
      next.push_back({d, ad, bd, cd});
      // Split the inner octahedron along its shortest diagonal. Each option
      // lists the diagonal followed by the equator in cyclic order.
      const std::array<std::array<int, 6>, 3> options{{
          {ab, cd, ac, ad, bd, bc},
          {ac, bd, ab, ad, cd, bc},
          {ad, bc, ab, ac, cd, bd},
      }};
      std::size_t best = 0;
      for (std::size_t k = 1; k < options.size(); ++k) {
        if (dist(options[k][0], options[k][1]) < dist(options[best][0], options[best][1])) {
          best = k;
        }
      }
      const auto& o = options[best];
      for (int k = 0; k < 4; ++k) {
        next.push_back({o[0], o[1], o[2 + k], o[2 + (k + 1) % 4]});
      }
    }
    cells = std::move(next);
  }
};

Builder icosahedron() {
  Builder b{2, {}, {}, {}};
  const double g = 0.5 * (1.0 + std::sqrt(5.0));
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      b.add_vertex(Vec(Eigen::Vector3d(0.0, s1, s2 * g)));
      b.add_vertex(Vec(Eigen::Vector3d(s1, s2 * g, 0.0)));
      b.add_vertex(Vec(Eigen::Vector3d(s2 * g, 0.0, s1)));
    }
  }
  // Faces are the triples of mutually adjacent vertices.
  double shortest = 10.0;
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) {
      shortest = std::min(shortest, b.dist(i, j));
    }
  }
  auto adjacent = [&](int i, int j) { return std::abs(b.dist(i, j) - shortest) < 1e-9; };
  for (int i = 0; i < 12; ++i) {
    for (int j = i + 1; j < 12; ++j) {
      for (int k = j + 1; k < 12; ++k) {
        if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) {
          b.cells.push_back({i, j, k, -1});
        }
      }
    }
  }
  return b;
}

Builder cross_polytope() {
  Builder b{3, {}, {}, {}};
  for (int axis = 0; axis < 4; ++axis) {
    for (double s : {1.0, -1.0}) {
      Vec v = Vec::Zero(4);
      v[axis] = s;
      b.add_vertex(v);
    }
  }
  for (int signs = 0; signs < 16; ++signs) {
    Cell c{};
    for (int axis = 0; axis < 4; ++axis) {
      c[static_cast<std::size_t>(axis)] = 2 * axis + ((signs >> axis) & 1);
    }
    b.cells.push_back(c);
  }
  return b;
}

double orientation(const Builder& b, const Cell& c) {
  const int d = b.m + 1;
  Eigen::MatrixXd mat(d, d);
  for (int k = 0; k < d; ++k) {
    mat.col(k) = b.vertices[static_cast<std::size_t>(c[static_cast<std::size_t>(k)])];
  }
  return mat.determinant();
}

}  // namespace

Vec Mesh::cell_center(Eigen::Index c) const {
  Vec sum = Vec::Zero(m + 1);
  for (int k = 0; k <= m; ++k) {
    sum += vertices.col(cells(k, c));
  }
  return sum / sum.norm();
}

CellGeometry cell_geometry(const Mesh& mesh, Eigen::Index cell) {
  const int m = mesh.m;
  const int d = m + 1;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient> edges(d, m);
  const Vec v0 = mesh.vertices.col(mesh.cells(0, cell));
  for (int k = 1; k <= m; ++k) {
    edges.col(k - 1) = mesh.vertices.col(mesh.cells(k, cell)) - v0;
  }
  const auto gram = (edges.transpose() * edges).eval();
  const double det = gram.determinant();
  double factorial = 1.0;
  for (int k = 2; k <= m; ++k) {
    factorial *= k;
  }
  if (!(det > 1e-30)) {
    throw MeshError("degenerate cell " + std::to_string(cell) + " (zero volume)");
  }
  CellGeometry geom;
  geom.volume = std::sqrt(det) / factorial;
  // Gradients of barycentric coordinates 1..m are the columns of E G^{-1};
  // coordinate 0 is minus their sum.
  const auto dual = (edges * gram.inverse()).eval();
  geom.gradients.resize(d, d);
  geom.gradients.col(0) = -dual.rowwise().sum();
  geom.gradients.rightCols(m) = dual;
  return geom;
}

Mesh build_mesh(int m, int level) {
  if (m != 2 && m != 3) {
    throw MeshError("meshes are available for m = 2 and m = 3 only, got m=" + std::to_string(m));
  }
  if (level < 0) {
    throw MeshError("refinement level must be non-negative");
  }
  Builder b = m == 2 ? icosahedron() : cross_polytope();
  for (int l = 0; l < level; ++l) {
    b.subdivide();
  }
  for (Cell& c : b.cells) {
    if (orientation(b, c) < 0.0) {
      std::swap(c[0], c[1]);
    }
  }

  Mesh mesh;
  mesh.m = m;
  mesh.level = level;
  mesh.vertices.resize(m + 1, static_cast<Eigen::Index>(b.vertices.size()));
  for (std::size_t i = 0; i < b.vertices.size(); ++i) {
    mesh.vertices.col(static_cast<Eigen::Index>(i)) = b.vertices[i];
  }
  mesh.cells.resize(m + 1, static_cast<Eigen::Index>(b.cells.size()));
  for (std::size_t c = 0; c < b.cells.size(); ++c) {
    for (int k = 0; k <= m; ++k) {
      mesh.cells(k, static_cast<Eigen::Index>(c)) = b.cells[c][static_cast<std::size_t>(k)];
    }
  }
  mesh.cell_volumes.resize(mesh.cell_count());
  mesh.vertex_weights = Eigen::VectorXd::Zero(mesh.vertex_count());
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    const double vol = cell_geometry(mesh, c).volume;
    mesh.cell_volumes[c] = vol;
    for (int k = 0; k <= m; ++k) {
      mesh.vertex_weights[mesh.cells(k, c)] += vol / (m + 1);
    }
  }
  return mesh;
}

std::pair<Eigen::Index, Vec> locate(const Mesh& mesh, const Vec& y) {
  const int d = mesh.m + 1;
  if (y.size() != d) {
    throw MeshError("point has the wrong ambient dimension for this mesh");
  }
  Eigen::Index best_cell = -1;
  Vec best;
  double best_min = -1e300;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient> corners(d, d);
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    // A cell containing y has every vertex within 90 degrees of it.
    if (mesh.vertices.col(mesh.cells(0, c)).dot(y) < -1e-9) {
      continue;
    }
    for (int k = 0; k < d; ++k) {
      corners.col(k) = mesh.vertices.col(mesh.cells(k, c));
    }
    const Vec bary = corners.partialPivLu().solve(y);
    const double lowest = bary.minCoeff();
    if (lowest > best_min) {
      best_min = lowest;
      best_cell = c;
      best = bary;
    }
  }
  if (best_cell < 0 || best_min < -1e-10) {
    throw MeshError("point location failed: no cell contains the query point");
  }
  return {best_cell, Vec(best / best.sum())};
}

void write_off(std::ostream& out, const Mesh& mesh) {
  const auto old_precision = out.precision(17);
  out << (mesh.m == 2 ? "OFF" : "4OFF") << '\n';
  out << mesh.vertex_count() << ' ' << mesh.cell_count() << " 0\n";
  for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
    for (int r = 0; r <= mesh.m; ++r) {
      out << mesh.vertices(r, i) << (r == mesh.m ? '\n' : ' ');
    }
  }
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    out << mesh.m + 1;
    for (int k = 0; k <= mesh.m; ++k) {
      out << ' ' << mesh.cells(k, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace confbound
