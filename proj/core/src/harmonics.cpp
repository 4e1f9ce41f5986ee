#include "confbound/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace confbound {

int harmonic_count(int m, int L) {
  if (L < 0) {
    throw GeometryError("harmonic degree must be non-negative");
  }
  if (m == 2) {
    return (L + 1) * (L + 1);
  }
  if (m == 3) {
    int total = 0;
    for (int n = 0; n <= L; ++n) {
      total += (n + 1) * (n + 1);
    }
    return total;
  }
  throw GeometryError("spherical harmonics are implemented for m = 2 and m = 3 only, got m=" + std::to_string(m));
}

int harmonic_degree_for_count(int m, int count) {
  for (int L = 0; harmonic_count(m, L) <= count; ++L) {
    if (harmonic_count(m, L) == count) {
      return L;
    }
  }
  return -1;
}

namespace {

// Real orthonormal harmonics on S^2 at the direction (x, y, z)/r, scaled by r^l
// (solid harmonics), so the result is polynomial and well defined at r = 0.
void solid_harmonics_s2(int L, double x, double y, double z, double* out) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r < 1e-300) {
    out[0] = 0.5 / std::sqrt(std::numbers::pi);
    for (int k = 1; k < (L + 1) * (L + 1); ++k) {
      out[k] = 0.0;
    }
    return;
  }
  const double theta = std::acos(std::clamp(z / r, -1.0, 1.0));
  const double phi = std::atan2(y, x);
  for (int l = 0; l <= L; ++l) {
    const double rl = std::pow(r, l);
    const int base = l * l + l;
    out[base] = rl * std::sph_legendre(static_cast<unsigned>(l), 0u, theta);
    for (int k = 1; k <= l; ++k) {
      const double p = std::numbers::sqrt2 * rl * std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(k), theta);
      out[base + k] = p * std::cos(k * phi);
      out[base - k] = p * std::sin(k * phi);
    }
  }
}

double gegenbauer(int n, double lambda, double x) {
  if (n == 0) {
    return 1.0;
  }
  double prev = 1.0;
  double cur = 2.0 * lambda * x;
  for (int k = 2; k <= n; ++k) {
    const double next = (2.0 * x * (k + lambda - 1.0) * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

// 1 / sqrt( int_0^pi sin^{2l+2}(chi) [C^{(l+1)}_{n-l}(cos chi)]^2 dchi ).
double s3_radial_normalization(int n, int l) {
  const double lambda = l + 1.0;
  const int k = n - l;
  const double log_norm = std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::log(2.0) +
                          std::lgamma(k + 2.0 * lambda) - std::lgamma(k + 1.0) - std::log(k + lambda) -
                          2.0 * std::lgamma(lambda);
  return std::exp(-0.5 * log_norm);
}

}  // namespace

Eigen::VectorXd harmonic_basis(int m, int L, const Vec& y) {
  const int count = harmonic_count(m, L);
  if (y.size() != m + 1) {
    throw GeometryError("harmonic evaluation point has the wrong ambient dimension");
  }
  Eigen::VectorXd out(count);
  if (m == 2) {
    solid_harmonics_s2(L, y[0], y[1], y[2], out.data());
    return out;
  }
  std::vector<double> solid(static_cast<std::size_t>((L + 1) * (L + 1)));
  solid_harmonics_s2(L, y[0], y[1], y[2], solid.data());
  const double cos_chi = std::clamp(y[3] / y.norm(), -1.0, 1.0);
  int idx = 0;
  for (int n = 0; n <= L; ++n) {
    for (int l = 0; l <= n; ++l) {
      const double radial = s3_radial_normalization(n, l) * gegenbauer(n - l, l + 1.0, cos_chi);
      for (int k = -l; k <= l; ++k) {
        out[idx++] = radial * solid[static_cast<std::size_t>(l * l + l + k)];
      }
    }
  }
  return out;
}

double evaluate_harmonic_series(int m, std::span<const double> coeffs, const Vec& y) {
  const int L = harmonic_degree_for_count(m, static_cast<int>(coeffs.size()));
  if (L < 0) {
    throw GeometryError("coefficient count " + std::to_string(coeffs.size()) +
                        " is not a complete harmonic basis for m=" + std::to_string(m));
  }
  const Eigen::VectorXd basis = harmonic_basis(m, L, y);
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum += coeffs[k] * basis[static_cast<Eigen::Index>(k)];
  }
  return sum;
}

}  // namespace confbound
