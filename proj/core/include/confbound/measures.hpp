#pragma once

#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace confbound {

class MeasureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CenterOfMassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finitely many weighted atoms on S^m. Points are the columns of `points()`.
class DiscreteMeasure {
 public:
  DiscreteMeasure(int m, Eigen::MatrixXd points, Eigen::VectorXd weights);

  int dim() const { return m_; }
  Eigen::Index size() const { return weights_.size(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_mass() const { return total_; }
  Vec atom(Eigen::Index i) const { return points_.col(i); }

  /// Largest mass carried by a single location, as a fraction of the total.
  /// Coincident atoms are merged.
  double max_point_fraction() const;

 private:
  int m_;
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  double total_;
};

using SphereMap = std::function<SpherePoint(const SpherePoint&)>;

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const SphereMap& map);
/// (F_H)_* mu without the per-atom std::function overhead.
DiscreteMeasure pushforward_fold(const DiscreteMeasure& mu, const CapChoice& cap);
/// (T_x)_* mu.
DiscreteMeasure pushforward_mobius(const DiscreteMeasure& mu, const BallPoint& x);

struct CenterOptions {
  /// Stop when |sum_i w_i T_{-c}(y_i)| <= tol * total mass.
  double tol = 1e-10;
  int max_iterations = 10000;
  std::optional<Vec> start;
};

struct CenterOfMass {
  BallPoint c;
  double residual;  // |sum_i w_i T_{-c}(y_i)|, absolute
  int iterations;
};

/// sum_i w_i T_{-c}(y_i), evaluated directly.
Vec center_residual(const DiscreteMeasure& mu, const BallPoint& c);

/// The Möbius (Hersch) center of mass: the unique c in the ball with
/// sum_i w_i T_{-c}(y_i) = 0. Requires every location to carry less than half
/// the total mass.
///
/// Each step recenters the current pushed measure z_i = T_{-c}(y_i) with the
/// linearized correction delta = (I - S)^{-1} u / 2, where u and S are the
/// first and second moments of z, and composes c <- T_c(s delta) with a
/// backtracking step s. When backtracking stalls the plain moment step
/// (m+1)/(2m) u is tried instead.
CenterOfMass center_of_mass(const DiscreteMeasure& mu, const CenterOptions& options = {});

/// c_H: the center of mass of (F_H)_* mu. For the whole-sphere choice this is c(mu).
CenterOfMass folded_center(const DiscreteMeasure& mu, const CapChoice& cap, const CenterOptions& options = {});

/// c_{p,t} along a path; t == 1 selects the whole-sphere limit.
std::vector<BallPoint> center_continuity_probe(const DiscreteMeasure& mu,
                                               const std::vector<std::pair<SpherePoint, double>>& path,
                                               const CenterOptions& options = {});

/// Cap for parameter t in [0,1); t == 1 maps to the whole-sphere choice.
CapChoice cap_choice(const SpherePoint& p, double t);

/// One "y_1 ... y_{m+1} weight" row per atom, full precision.
void write_atoms(std::ostream& out, const DiscreteMeasure& mu);
DiscreteMeasure read_atoms(std::istream& in);

}  // namespace confbound
