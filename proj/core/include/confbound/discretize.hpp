#pragma once

#include "confbound/measures.hpp"
#include "confbound/mesh.hpp"
#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace confbound {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// g = e^{2 phi} g_0 on S^m, with phi either a spherical-harmonic series or
/// nodal values on a mesh (barycentric interpolation between vertices).
class ConformalMetric {
 public:
  enum class Kind { harmonic, nodal };

  static ConformalMetric round(int m);
  static ConformalMetric constant(int m, double phi);
  static ConformalMetric harmonic(int m, std::vector<double> coeffs);
  static ConformalMetric nodal(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values);
  /// Harmonic series of degree L with coefficients drawn uniformly from
  /// [-amplitude, amplitude] by a generator seeded with `seed`.
  static ConformalMetric random(int m, int L, double amplitude, std::uint64_t seed);

  int dim() const { return m_; }
  Kind kind() const { return kind_; }
  /// Harmonic degree L of the series (harmonic kind only).
  int degree() const;
  const std::vector<double>& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& values() const { return values_; }
  const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }

  /// phi + s.
  ConformalMetric shifted(double s) const;

  /// phi at every vertex of `mesh`. Nodal metrics on the same mesh return
  /// their stored values.
  Eigen::VectorXd sample(const Mesh& mesh) const;

 private:
  ConformalMetric() = default;
  int m_ = 2;
  Kind kind_ = Kind::harmonic;
  std::vector<double> coeffs_;
  Eigen::VectorXd values_;
  std::shared_ptr<const Mesh> mesh_;
};

/// phi(y): harmonic evaluation or barycentric interpolation.
double interpolate(const ConformalMetric& g, const SpherePoint& y);

/// Atoms at the mesh vertices with weights w_i e^{m phi(y_i)}.
DiscreteMeasure volume_measure(const ConformalMetric& g, const Mesh& mesh);
DiscreteMeasure volume_measure_nodal(const Mesh& mesh, const Eigen::VectorXd& phi);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-linear Galerkin matrices of the weak Laplace-Beltrami problem
/// for g. Both use the m+1 cell vertices as quadrature points for the
/// conformal weights: the stiffness carries e^{(m-2) phi} (so for m = 2 it is
/// the round cotangent matrix) and the mass carries e^{m phi}, which makes the
/// mass matrix diagonal with entries w_i e^{m phi_i}.
struct GalerkinPair {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

GalerkinPair assemble(const ConformalMetric& g, const Mesh& mesh);
GalerkinPair assemble_nodal(const Mesh& mesh, const Eigen::VectorXd& phi);

/// {"m": int, "type": "harmonic"|"nodal", "coeffs"|"values": [...]}. Nodal
/// documents may carry a "level" key naming the mesh they live on.
nlohmann::json to_json(const ConformalMetric& g);
/// `mesh` is required for nodal documents; its vertex count must match.
ConformalMetric metric_from_json(const nlohmann::json& doc, std::shared_ptr<const Mesh> mesh = nullptr);

}  // namespace confbound
