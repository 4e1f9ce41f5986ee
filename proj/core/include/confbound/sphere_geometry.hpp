#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>

namespace confbound {

// Ambient vectors live on the stack; m + 1 <= kMaxAmbient.
inline constexpr int kMaxAmbient = 8;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;

// Largest admissible |x| for a Möbius parameter. Beyond this the denominator
// of T_x(y) can lose all significant digits.
inline constexpr double kMaxBallRadius = 1.0 - 1e-9;

// Closed-inequality slack for cap membership.
inline constexpr double kBoundaryTolerance = 1e-12;

class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

void check_dimension(int m);

/// A point on the unit sphere S^m in R^{m+1}.
class SpherePoint {
 public:
  /// Normalizes `v`; rejects the zero vector and unsupported lengths.
  static SpherePoint normalized(const Eigen::Ref<const Eigen::VectorXd>& v);
  /// Accepts `v` only if it is already unit length within `tol`, then renormalizes.
  static SpherePoint from_unit(const Eigen::Ref<const Eigen::VectorXd>& v, double tol = 1e-10);
  /// Standard basis vector e_j (0-based) in R^{m+1}.
  static SpherePoint basis(int m, int j);

  int dim() const { return static_cast<int>(v_.size()) - 1; }
  int ambient() const { return static_cast<int>(v_.size()); }
  const Vec& coords() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  SpherePoint operator-() const { return SpherePoint(-v_); }

 private:
  explicit SpherePoint(Vec v) : v_(std::move(v)) {}
  Vec v_;
};

/// A point of the open unit ball B^{m+1}.
class BallPoint {
 public:
  static BallPoint make(const Eigen::Ref<const Eigen::VectorXd>& v);
  static BallPoint origin(int m);

  int dim() const { return static_cast<int>(v_.size()) - 1; }
  int ambient() const { return static_cast<int>(v_.size()); }
  const Vec& coords() const { return v_; }
  double norm() const { return v_.norm(); }
  BallPoint operator-() const { return BallPoint(-v_); }

 private:
  explicit BallPoint(Vec v) : v_(std::move(v)) {}
  Vec v_;
};

/// The spherical cap H_{p,t} = T_{pt}(H_p) = { y : y.p <= 2t/(1+t^2) }.
class Cap {
 public:
  static Cap make(const SpherePoint& p, double t);

  const SpherePoint& pole() const { return p_; }
  double t() const { return t_; }
  int dim() const { return p_.dim(); }
  double threshold() const { return 2.0 * t_ / (1.0 + t_ * t_); }
  /// The Möbius parameter p*t.
  BallPoint center_parameter() const;

 private:
  Cap(SpherePoint p, double t) : p_(std::move(p)), t_(t) {}
  SpherePoint p_;
  double t_;
};

/// A cap, or the whole-sphere limit t = 1 (fold = identity).
using CapChoice = std::optional<Cap>;

// Typed operations. All are pure.
SpherePoint mobius_transform(const BallPoint& x, const SpherePoint& y);
/// T_{-x}(T_x(y)); equals y.
SpherePoint mobius_inverse_check(const BallPoint& x, const SpherePoint& y);
/// T_x extended to the open ball (T_x(0) = x). Used to compose centers.
BallPoint mobius_transform(const BallPoint& x, const BallPoint& z);
SpherePoint reflect(const SpherePoint& p, const SpherePoint& y);
BallPoint reflect(const SpherePoint& p, const BallPoint& x);
bool cap_contains(const Cap& cap, const SpherePoint& y);
SpherePoint cap_reflect(const Cap& cap, const SpherePoint& y);
SpherePoint fold(const Cap& cap, const SpherePoint& y);
SpherePoint fold(const CapChoice& cap, const SpherePoint& y);

/// |T_{R_p x}(R_p y) - R_p T_x(y)|.
double conjugation_identity_check(const SpherePoint& p, const BallPoint& x, const SpherePoint& y);
/// |F_{-p,0}(y) - R_p(F_{p,0}(y))|.
double fold_reflection_identity_check(const SpherePoint& p, const SpherePoint& y);

// Raw kernels on ambient vectors. No domain checks; callers validate once and
// then run these over many atoms.
namespace kernel {

inline Vec mobius(const Vec& x, const Vec& y) {
  const double xy = x.dot(y);
  const double xx = x.squaredNorm();
  const double yy = y.squaredNorm();
  const double denom = 1.0 + 2.0 * xy + xx * yy;
  return ((1.0 + 2.0 * xy + yy) * x + (1.0 - xx) * y) / denom;
}

inline Vec reflect(const Vec& p, const Vec& y) { return y - 2.0 * y.dot(p) * p; }

/// Precomputed fold map F_H for one cap, or the identity for the t = 1 limit.
class FoldMap {
 public:
  explicit FoldMap(const CapChoice& cap);

  bool identity() const { return identity_; }
  bool contains(const Vec& y) const { return identity_ || y.dot(p_) <= threshold_ + kBoundaryTolerance; }
  Vec reflect_across(const Vec& y) const { return mobius(pt_, reflect(p_, mobius(neg_pt_, y))); }
  Vec operator()(const Vec& y) const { return contains(y) ? y : reflect_across(y); }

 private:
  bool identity_ = true;
  Vec p_;
  Vec pt_;
  Vec neg_pt_;
  double threshold_ = 1.0;
};

}  // namespace kernel
}  // namespace confbound
