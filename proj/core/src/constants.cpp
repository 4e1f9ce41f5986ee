#include "confbound/constants.hpp"

#include <cmath>
#include <numbers>

namespace confbound {

double sphere_volume(int m) {
  const double half = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double first_eigenvalue_bound(int m) { return m * std::pow(sphere_volume(m), 2.0 / m); }

double second_eigenvalue_bound(int m) { return m * std::pow(2.0 * sphere_volume(m), 2.0 / m); }

double identity_m_energy(int m) { return sphere_volume(m) * std::pow(static_cast<double>(m), 0.5 * m); }

}  // namespace confbound
