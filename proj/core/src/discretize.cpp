#include "confbound/discretize.hpp"

#include "confbound/constants.hpp"
#include "confbound/harmonics.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>

namespace confbound {

ConformalMetric ConformalMetric::round(int m) { return constant(m, 0.0); }

ConformalMetric ConformalMetric::constant(int m, double phi) {
  // Y_0 = 1 / sqrt(sigma_m).
  return harmonic(m, {phi * std::sqrt(sphere_volume(m))});
}

ConformalMetric ConformalMetric::harmonic(int m, std::vector<double> coeffs) {
  check_dimension(m);
  if (harmonic_degree_for_count(m, static_cast<int>(coeffs.size())) < 0) {
    throw MetricError("coefficient count " + std::to_string(coeffs.size()) +
                      " is not a complete harmonic basis for m=" + std::to_string(m));
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw MetricError("harmonic coefficients must be finite");
    }
  }
  ConformalMetric g;
  g.m_ = m;
  g.kind_ = Kind::harmonic;
  g.coeffs_ = std::move(coeffs);
  return g;
}

ConformalMetric ConformalMetric::nodal(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values) {
  if (!mesh) {
    throw MetricError("nodal metric needs a mesh");
  }
  if (values.size() != mesh->vertex_count()) {
    throw MetricError("nodal metric has " + std::to_string(values.size()) + " values for " +
                      std::to_string(mesh->vertex_count()) + " vertices");
  }
  if (!values.allFinite()) {
    throw MetricError("nodal metric values must be finite");
  }
  ConformalMetric g;
  g.m_ = mesh->m;
  g.kind_ = Kind::nodal;
  g.values_ = std::move(values);
  g.mesh_ = std::move(mesh);
  return g;
}

ConformalMetric ConformalMetric::random(int m, int L, double amplitude, std::uint64_t seed) {
  check_dimension(m);
  if (L < 0) {
    throw MetricError("harmonic degree must be non-negative");
  }
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw MetricError("random metric amplitude must be finite and non-negative");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-amplitude, amplitude);
  std::vector<double> coeffs(static_cast<std::size_t>(harmonic_count(m, L)));
  for (double& c : coeffs) {
    c = uniform(rng);
  }
  return harmonic(m, std::move(coeffs));
}

int ConformalMetric::degree() const {
  if (kind_ != Kind::harmonic) {
    throw MetricError("nodal metrics have no harmonic degree");
  }
  return harmonic_degree_for_count(m_, static_cast<int>(coeffs_.size()));
}

ConformalMetric ConformalMetric::shifted(double s) const {
  ConformalMetric g = *this;
  if (kind_ == Kind::harmonic) {
    g.coeffs_[0] += s * std::sqrt(sphere_volume(m_));
  } else {
    g.values_.array() += s;
  }
  return g;
}

Eigen::VectorXd ConformalMetric::sample(const Mesh& mesh) const {
  if (mesh.m != m_) {
    throw MetricError("metric and mesh dimensions differ");
  }
  if (kind_ == Kind::nodal && (mesh_.get() == &mesh ||
                               (mesh_->level == mesh.level && mesh_->vertex_count() == mesh.vertex_count()))) {
    return values_;
  }
  Eigen::VectorXd out(mesh.vertex_count());
  if (kind_ == Kind::harmonic) {
    const int L = degree();
    const Eigen::Map<const Eigen::VectorXd> c(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
      out[i] = harmonic_basis(m_, L, mesh.vertex(i)).dot(c);
    }
    return out;
  }
  for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
    out[i] = interpolate(*this, SpherePoint::from_unit(mesh.vertices.col(i)));
  }
  return out;
}

double interpolate(const ConformalMetric& g, const SpherePoint& y) {
  if (y.dim() != g.dim()) {
    throw MetricError("point and metric dimensions differ");
  }
  if (g.kind() == ConformalMetric::Kind::harmonic) {
    return evaluate_harmonic_series(g.dim(), g.coeffs(), y.coords());
  }
  const Mesh& mesh = *g.mesh();
  const auto [cell, bary] = locate(mesh, y.coords());
  double value = 0.0;
  for (int k = 0; k <= mesh.m; ++k) {
    value += bary[k] * g.values()[mesh.cells(k, cell)];
  }
  return value;
}

DiscreteMeasure volume_measure_nodal(const Mesh& mesh, const Eigen::VectorXd& phi) {
  const Eigen::VectorXd weights = mesh.vertex_weights.array() * (mesh.m * phi.array()).exp();
  return DiscreteMeasure(mesh.m, mesh.vertices, weights);
}

DiscreteMeasure volume_measure(const ConformalMetric& g, const Mesh& mesh) {
  return volume_measure_nodal(mesh, g.sample(mesh));
}

GalerkinPair assemble_nodal(const Mesh& mesh, const Eigen::VectorXd& phi) {
  const int m = mesh.m;
  const int d = m + 1;
  if (phi.size() != mesh.vertex_count()) {
    throw MetricError("nodal conformal factor does not match the mesh");
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(mesh.cell_count() * d * d));
  for (Eigen::Index c = 0; c < mesh.cell_count(); ++c) {
    const CellGeometry geom = cell_geometry(mesh, c);
    double weight = 0.0;
    for (int k = 0; k < d; ++k) {
      weight += std::exp((m - 2) * phi[mesh.cells(k, c)]);
    }
    weight *= geom.volume / d;
    const auto local = (geom.gradients.transpose() * geom.gradients).eval();
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        entries.emplace_back(mesh.cells(a, c), mesh.cells(b, c), weight * local(a, b));
      }
    }
  }
  GalerkinPair pair;
  const Eigen::Index n = mesh.vertex_count();
  pair.stiffness.resize(n, n);
  pair.stiffness.setFromTriplets(entries.begin(), entries.end());
  // Symmetrize exactly; the triplet sums are symmetric up to summation order.
  SparseMatrix transposed = pair.stiffness.transpose();
  pair.stiffness = 0.5 * (pair.stiffness + transposed);

  const Eigen::VectorXd lumped = mesh.vertex_weights.array() * (m * phi.array()).exp();
  pair.mass.resize(n, n);
  std::vector<Eigen::Triplet<double>> diag;
  diag.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    diag.emplace_back(i, i, lumped[i]);
  }
  pair.mass.setFromTriplets(diag.begin(), diag.end());
  return pair;
}

GalerkinPair assemble(const ConformalMetric& g, const Mesh& mesh) { return assemble_nodal(mesh, g.sample(mesh)); }

nlohmann::json to_json(const ConformalMetric& g) {
  nlohmann::json doc;
  doc["m"] = g.dim();
  if (g.kind() == ConformalMetric::Kind::harmonic) {
    doc["type"] = "harmonic";
    doc["coeffs"] = g.coeffs();
  } else {
    doc["type"] = "nodal";
    doc["level"] = g.mesh()->level;
    doc["values"] = std::vector<double>(g.values().data(), g.values().data() + g.values().size());
  }
  return doc;
}

ConformalMetric metric_from_json(const nlohmann::json& doc, std::shared_ptr<const Mesh> mesh) {
  if (!doc.is_object()) {
    throw MetricError("metric document must be a JSON object");
  }
  static const std::set<std::string> allowed{"m", "type", "coeffs", "values", "level"};
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) {
      throw MetricError("unknown key in metric document: " + key);
    }
  }
  if (!doc.contains("m") || !doc["m"].is_number_integer()) {
    throw MetricError("metric document needs integer key \"m\"");
  }
  if (!doc.contains("type") || !doc["type"].is_string()) {
    throw MetricError("metric document needs string key \"type\"");
  }
  const int m = doc["m"].get<int>();
  const std::string type = doc["type"].get<std::string>();
  auto read_numbers = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw MetricError(std::string("metric document needs array key \"") + key + "\"");
    }
    std::vector<double> out;
    for (const auto& v : doc[key]) {
      if (!v.is_number()) {
        throw MetricError(std::string("non-numeric entry in \"") + key + "\"");
      }
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (type == "harmonic") {
    if (doc.contains("values") || doc.contains("level")) {
      throw MetricError("harmonic metric documents take \"coeffs\" only");
    }
    return ConformalMetric::harmonic(m, read_numbers("coeffs"));
  }
  if (type == "nodal") {
    if (doc.contains("coeffs")) {
      throw MetricError("nodal metric documents take \"values\" only");
    }
    if (!mesh) {
      if (!doc.contains("level") || !doc["level"].is_number_integer()) {
        throw MetricError("nodal metric document needs a mesh or a \"level\" key");
      }
      mesh = std::make_shared<const Mesh>(build_mesh(m, doc["level"].get<int>()));
    }
    if (mesh->m != m) {
      throw MetricError("nodal metric dimension does not match its mesh");
    }
    const std::vector<double> values = read_numbers("values");
    return ConformalMetric::nodal(mesh, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                          static_cast<Eigen::Index>(values.size())));
  }
  throw MetricError("metric type must be \"harmonic\" or \"nodal\", got \"" + type + "\"");
}

}  // namespace confbound
