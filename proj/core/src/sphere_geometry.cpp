#include "confbound/sphere_geometry.hpp"

#include <cmath>
#include <string>

namespace confbound {

void check_dimension(int m) {
  if (m < 2 || m + 1 > kMaxAmbient) {
    throw GeometryError("sphere dimension m=" + std::to_string(m) + " outside supported range [2, " +
                        std::to_string(kMaxAmbient - 1) + "]");
  }
}

namespace {

void check_same_ambient(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw GeometryError("ambient dimension mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
  }
}

void check_mobius_parameter(const Vec& x) {
  if (x.norm() > kMaxBallRadius) {
    throw GeometryError("Möbius parameter |x|=" + std::to_string(x.norm()) + " too close to the unit sphere");
  }
}

}  // namespace

SpherePoint SpherePoint::normalized(const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dimension(static_cast<int>(v.size()) - 1);
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw GeometryError("cannot normalize a zero or non-finite vector onto the sphere");
  }
  return SpherePoint(Vec(v / n));
}

SpherePoint SpherePoint::from_unit(const Eigen::Ref<const Eigen::VectorXd>& v, double tol) {
  check_dimension(static_cast<int>(v.size()) - 1);
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > tol) {
    throw GeometryError("vector is not on the unit sphere: |v|=" + std::to_string(n));
  }
  return SpherePoint(Vec(v / n));
}

SpherePoint SpherePoint::basis(int m, int j) {
  check_dimension(m);
  if (j < 0 || j > m) {
    throw GeometryError("basis index out of range");
  }
  Vec e = Vec::Zero(m + 1);
  e[j] = 1.0;
  return SpherePoint(e);
}

BallPoint BallPoint::make(const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dimension(static_cast<int>(v.size()) - 1);
  const double n = v.norm();
  if (!std::isfinite(n) || n >= 1.0) {
    throw GeometryError("ball point must satisfy |x| < 1, got " + std::to_string(n));
  }
  return BallPoint(Vec(v));
}

BallPoint BallPoint::origin(int m) {
  check_dimension(m);
  return BallPoint(Vec::Zero(m + 1));
}

Cap Cap::make(const SpherePoint& p, double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw GeometryError("cap parameter t must lie in [0,1), got " + std::to_string(t));
  }
  return Cap(p, t);
}

BallPoint Cap::center_parameter() const { return BallPoint::make(t_ * p_.coords()); }

SpherePoint mobius_transform(const BallPoint& x, const SpherePoint& y) {
  check_same_ambient(x.coords(), y.coords());
  check_mobius_parameter(x.coords());
  return SpherePoint::from_unit(kernel::mobius(x.coords(), y.coords()), 1e-9);
}

SpherePoint mobius_inverse_check(const BallPoint& x, const SpherePoint& y) {
  return mobius_transform(-x, mobius_transform(x, y));
}

BallPoint mobius_transform(const BallPoint& x, const BallPoint& z) {
  check_same_ambient(x.coords(), z.coords());
  check_mobius_parameter(x.coords());
  return BallPoint::make(kernel::mobius(x.coords(), z.coords()));
}

SpherePoint reflect(const SpherePoint& p, const SpherePoint& y) {
  check_same_ambient(p.coords(), y.coords());
  return SpherePoint::from_unit(kernel::reflect(p.coords(), y.coords()), 1e-9);
}

BallPoint reflect(const SpherePoint& p, const BallPoint& x) {
  check_same_ambient(p.coords(), x.coords());
  return BallPoint::make(kernel::reflect(p.coords(), x.coords()));
}

bool cap_contains(const Cap& cap, const SpherePoint& y) {
  check_same_ambient(cap.pole().coords(), y.coords());
  return kernel::FoldMap(cap).contains(y.coords());
}

SpherePoint cap_reflect(const Cap& cap, const SpherePoint& y) {
  check_same_ambient(cap.pole().coords(), y.coords());
  check_mobius_parameter(cap.center_parameter().coords());
  return SpherePoint::from_unit(kernel::FoldMap(cap).reflect_across(y.coords()), 1e-9);
}

SpherePoint fold(const Cap& cap, const SpherePoint& y) { return fold(CapChoice(cap), y); }

SpherePoint fold(const CapChoice& cap, const SpherePoint& y) {
  if (!cap) {
    return y;
  }
  check_same_ambient(cap->pole().coords(), y.coords());
  check_mobius_parameter(cap->center_parameter().coords());
  return SpherePoint::from_unit(kernel::FoldMap(cap)(y.coords()), 1e-9);
}

double conjugation_identity_check(const SpherePoint& p, const BallPoint& x, const SpherePoint& y) {
  const SpherePoint lhs = mobius_transform(reflect(p, x), reflect(p, y));
  const SpherePoint rhs = reflect(p, mobius_transform(x, y));
  return (lhs.coords() - rhs.coords()).norm();
}

double fold_reflection_identity_check(const SpherePoint& p, const SpherePoint& y) {
  const SpherePoint lhs = fold(Cap::make(-p, 0.0), y);
  const SpherePoint rhs = reflect(p, fold(Cap::make(p, 0.0), y));
  return (lhs.coords() - rhs.coords()).norm();
}

namespace kernel {

FoldMap::FoldMap(const CapChoice& cap) {
  if (!cap) {
    return;
  }
  identity_ = false;
  p_ = cap->pole().coords();
  pt_ = cap->t() * p_;
  neg_pt_ = -pt_;
  threshold_ = cap->threshold();
}

}  // namespace kernel
}  // namespace confbound
