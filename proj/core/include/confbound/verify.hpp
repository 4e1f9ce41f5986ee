#pragma once

#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/measures.hpp"
#include "confbound/mesh.hpp"
#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace confbound {

class VerifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Center-of-mass settings used by the proof engine: tighter than the solver
/// default so that symmetry residuals sit well below the checked tolerances.
CenterOptions precise_center_options();

/// One conformal metric restricted to a mesh: nodal log-factor, the volume
/// measure (atoms at vertices) and the Galerkin pair.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd phi;
  DiscreteMeasure measure;
  GalerkinPair pair;

  int dim() const { return mesh->m; }
  double volume() const { return measure.total_mass(); }
};

Discretization discretize(const ConformalMetric& g, std::shared_ptr<const Mesh> mesh);
Discretization discretize_nodal(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd phi);

/// u_j(y_i) = (T_{-c_H}(F_H(y_i)))_j for all vertices. Every column has unit
/// norm and every row has vanishing mass-weighted mean.
struct TrialFamily {
  CapChoice cap;
  BallPoint center;
  Eigen::MatrixXd values;  // (m+1) x V
  Eigen::VectorXd means;   // sum_i a_i u_j(y_i)
};

TrialFamily trial_family(const Discretization& d, const CapChoice& cap,
                         const CenterOptions& options = precise_center_options());

/// The lambda_1 eigenvector (index 1), mass-normalized, with its first
/// component of magnitude above 1e-12 made positive.
Eigen::VectorXd first_excited(const SpectrumResult& spectrum);

struct VectorFieldSample {
  Vec p;
  double t = 0.0;
  Vec value;
  double norm() const { return value.norm(); }
};

/// V(p,t) = sum_i a_i T_{-c_H}(F_H(y_i)) f(y_i) for a fixed discretization and f.
/// t = 1 is the whole-sphere limit, V(g), independent of p.
class VectorField {
 public:
  VectorField(std::shared_ptr<const Discretization> d, Eigen::VectorXd f,
              CenterOptions options = precise_center_options());

  const Discretization& discretization() const { return *d_; }
  const Eigen::VectorXd& f() const { return f_; }
  int dim() const { return d_->dim(); }
  double volume() const { return d_->volume(); }

  struct Value {
    Vec value;
    Vec center;  // c_H
  };
  /// V for one cap; `start` seeds the center-of-mass solve.
  Value evaluate(const CapChoice& cap, const std::optional<Vec>& start = std::nullopt) const;
  Vec operator()(const CapChoice& cap) const { return evaluate(cap).value; }
  VectorFieldSample sample(const SpherePoint& p, double t) const;
  /// V(g).
  const Vec& whole_sphere() const { return whole_; }

 private:
  std::shared_ptr<const Discretization> d_;
  Eigen::VectorXd f_;
  CenterOptions options_;
  Vec whole_;
};

/// n nearly uniform points on S^m: the Fibonacci lattice for m = 2 and a
/// super-Fibonacci spiral for m = 3.
std::vector<SpherePoint> sphere_lattice(int m, int n);

struct ZeroSearchOptions {
  int grid_points = 512;
  int t_steps = 33;  // t = k / (t_steps - 1), the last one being the t = 1 limit
  double tol = 1e-6;  // relative to Vol
  int candidates = 8;
  int max_refine_iterations = 100;
  int workers = 0;
};

struct ZeroSearchResult {
  bool whole_sphere = false;  // the t = 1 limit qualifies: V(g) is already small
  bool converged = false;
  VectorFieldSample best;
  double relative_norm = 0.0;  // |V| / Vol at `best`
  std::vector<VectorFieldSample> grid;
  std::vector<std::size_t> candidates;  // grid indices tried, best first
  int evaluations = 0;
};

/// Coarse grid over S^m x [0,1] followed by a Levenberg-Marquardt refinement
/// with finite-difference Jacobians (a compass search takes over when it
/// stalls). The first candidate reaching tol wins; otherwise the best point
/// seen is returned with converged = false.
ZeroSearchResult find_zero(const VectorField& field, const ZeroSearchOptions& options = {});

/// Vector-field grid as CSV: p_1..p_{m+1}, t, V_1..V_{m+1}, |V|.
void write_field_csv(std::ostream& out, const std::vector<VectorFieldSample>& grid);

/// A map S^m -> R^{m+1} \ {0}; degree() normalizes its values.
using SphereVectorMap = std::function<Vec(const Vec&)>;

class DegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DegreeOptions {
  int level = 2;
  int max_level = 5;
  /// Images of the vertices of every cell must be pairwise within this angle.
  double star_angle = 1.0471975511965976;  // 60 degrees
  std::uint64_t seed = 0xdeadULL;
};

struct DegreeResult {
  int degree = 0;
  int level = 0;  // mesh level at which the star condition held
  Vec regular_value;
};

/// Brouwer degree of y -> map(y)/|map(y)| from the simplicial approximation on
/// the level-L mesh: the signed count of cells whose image cone contains a
/// random regular value. The mesh is refined until every cell satisfies the
/// star condition.
DegreeResult degree(int m, const SphereVectorMap& map, const DegreeOptions& options = {});

/// Degree of p -> V(p,0) / |V(p,0)|. Throws DegreeError when V(p,0) vanishes on
/// a degree mesh vertex.
DegreeResult reflection_symmetry_degree_check(const VectorField& field, const DegreeOptions& options = {});

/// Cell predicate on normalized cell centroids; an empty function selects every cell.
using CellRegion = std::function<bool(const Vec&)>;

CellRegion cap_region(const CapChoice& cap);

/// sum over selected cells of |T| (sum_j |grad F_j|^2)^{m/2} for the
/// piecewise-linear interpolant of the nodal map F (k x V, any k).
double dirichlet_m_energy(const Mesh& mesh, const Eigen::MatrixXd& F, const CellRegion& region = {});

/// The same m-energy measured in g = e^{2 phi} g_0. The gradient norm uses the
/// stiffness quadrature and the volume element the mass quadrature, so for
/// m = 2 this equals dirichlet_m_energy identically.
double metric_m_energy(const Mesh& mesh, const Eigen::MatrixXd& F, const Eigen::VectorXd& phi,
                       const CellRegion& region = {});

/// Nodal samples F(y_i), one column per vertex.
using AmbientMap = std::function<Eigen::VectorXd(const Vec&)>;
Eigen::MatrixXd sample_map(const Mesh& mesh, const AmbientMap& F);

struct InvarianceResiduals {
  double mobius = 0.0;      // energy of F o T_x over Omega vs F over T_x(Omega)
  double reflection = 0.0;  // energy of F o R_p over Omega vs F over R_p(Omega)
  double metric = 0.0;      // g-energy vs round energy of F over Omega
};

/// Relative residuals of the change-of-variables identities for the m-energy.
InvarianceResiduals conformal_invariance_check(const Mesh& mesh, const AmbientMap& F, const BallPoint& x,
                                               const SpherePoint& p, const Cap& omega,
                                               const Eigen::VectorXd& phi);

struct ChainLink {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs * (1 + slack)
};

/// Every quantity of the Rayleigh / Hölder / fold estimate for one metric.
/// All bounds are on the lambda_2 Vol^{2/m} scale.
struct ChainReport {
  int m = 2;
  int level = 0;
  double volume = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double normalized_lambda1 = 0.0;
  double normalized_lambda2 = 0.0;

  bool whole_sphere = false;
  bool zero_converged = false;
  Vec p;
  double t = 1.0;
  Vec center;
  double field_residual = 0.0;  // |V(p,t)| / Vol
  double orthogonality = 0.0;   // max_j |<u_j, 1>| / Vol

  std::vector<double> numerators;    // u_j^T K u_j
  std::vector<double> denominators;  // u_j^T M u_j, summing to Vol
  std::vector<double> rayleigh;

  double averaged_rayleigh = 0.0;    // (sum_j N_j) Vol^{2/m - 1}
  double post_holder = 0.0;          // (sum_T |T| E_T^{m/2})^{2/m}
  double folded_cap = 0.0;           // 2^{2/m} (E_H(T_{-c}))^{2/m}; whole sphere: E^{2/m}
  double change_of_variables = 0.0;  // same with the identity over T_{-c}(H)
  double estimate = 0.0;             // m sigma_m^{2/m} (whole sphere) or m (2 sigma_m)^{2/m}
  double bound = 0.0;                // m (2 sigma_m)^{2/m}
  double slack = 0.0;

  std::vector<ChainLink> links;
  bool all_hold() const;
};

struct ChainOptions {
  ZeroSearchOptions zero;
  /// Negative selects 2% for m = 2 and 3% otherwise.
  double slack = -1.0;
  /// Skip the zero search and use the whole-sphere trial family.
  bool force_whole_sphere = false;
  CenterOptions center = precise_center_options();
};

double default_slack(int m);

ChainReport bound_chain(std::shared_ptr<const Discretization> d, const SpectrumResult& spectrum,
                        const ChainOptions& options = {});

nlohmann::json to_json(const ChainReport& report);

}  // namespace confbound
