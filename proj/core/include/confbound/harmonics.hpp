#pragma once

#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>

#include <span>

namespace confbound {

/// Number of real orthonormal spherical harmonics of degree <= L on S^m (m = 2, 3).
int harmonic_count(int m, int L);

/// Inverse of harmonic_count; -1 when `count` is not a full set of degrees.
int harmonic_degree_for_count(int m, int count);

/// All orthonormal real spherical harmonics of degree <= L at unit vector y.
///
/// S^2 ordering: index l^2 + l + k for k = -l..l (cos for k > 0, sin for k < 0).
/// S^3 ordering: grouped by degree n; inside a degree by l = 0..n and then by the
/// S^2 index of (l, k). The S^3 basis is sin^l(chi) C^{(l+1)}_{n-l}(cos chi) Y_{l,k}
/// with cos chi = y_4, normalized against the round measure.
Eigen::VectorXd harmonic_basis(int m, int L, const Vec& y);

/// sum_k coeffs[k] Y_k(y).
double evaluate_harmonic_series(int m, std::span<const double> coeffs, const Vec& y);

}  // namespace confbound
