#pragma once

#include <cstdint>

namespace confbound {

/// Largest residual of each geometric identity over a random sample.
struct IdentityResiduals {
  int m = 2;
  int samples = 0;
  double mobius_inverse = 0.0;    // |T_{-x} T_x y - y|
  double unit_norm = 0.0;         // ||T_x y| - 1|
  double conjugation = 0.0;       // |T_{R_p x} R_p y - R_p T_x y|
  double cap_involution = 0.0;    // |R_H R_H y - y|
  double fold_idempotence = 0.0;  // |F_H F_H y - F_H y|
  double fold_reflection = 0.0;   // |F_{-p,0} y - R_p F_{p,0} y|

  double max() const;
};

/// Draws `samples` tuples (y, p uniform on S^m, x uniform in the ball of radius
/// `radius`, t uniform in [0, radius]) from a generator seeded with `seed`.
IdentityResiduals geometry_identity_suite(int m, int samples, std::uint64_t seed, double radius = 0.9);

}  // namespace confbound
