#include "confbound/geometry_suite.hpp"

#include "confbound/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace confbound {

double IdentityResiduals::max() const {
  return std::max({mobius_inverse, unit_norm, conjugation, cap_involution, fold_idempotence, fold_reflection});
}

IdentityResiduals geometry_identity_suite(int m, int samples, std::uint64_t seed, double radius) {
  check_dimension(m);
  if (samples < 1) {
    throw GeometryError("identity suite needs at least one sample");
  }
  if (!(radius > 0.0) || radius > kMaxBallRadius) {
    throw GeometryError("identity suite radius must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  const int n = m + 1;
  auto sphere_point = [&] {
    Eigen::VectorXd v(n);
    do {
      for (int k = 0; k < n; ++k) {
        v[k] = gauss(rng);
      }
    } while (v.norm() < 1e-3);
    return SpherePoint::normalized(v);
  };
  auto ball_point = [&] {
    const double r = radius * std::pow(unit(rng), 1.0 / n);
    return BallPoint::make(r * sphere_point().coords());
  };

  IdentityResiduals out;
  out.m = m;
  out.samples = samples;
  auto keep = [](double& slot, double value) { slot = std::max(slot, value); };
  for (int s = 0; s < samples; ++s) {
    const SpherePoint y = sphere_point();
    const SpherePoint p = sphere_point();
    const BallPoint x = ball_point();
    const Cap cap = Cap::make(p, radius * unit(rng));

    keep(out.mobius_inverse, (mobius_inverse_check(x, y).coords() - y.coords()).norm());
    keep(out.unit_norm, std::abs(kernel::mobius(x.coords(), y.coords()).norm() - 1.0));
    keep(out.conjugation, conjugation_identity_check(p, x, y));
    keep(out.cap_involution, (cap_reflect(cap, cap_reflect(cap, y)).coords() - y.coords()).norm());
    const SpherePoint folded = fold(cap, y);
    keep(out.fold_idempotence, (fold(cap, folded).coords() - folded.coords()).norm());
    keep(out.fold_reflection, fold_reflection_identity_check(p, y));
  }
  return out;
}

}  // namespace confbound
