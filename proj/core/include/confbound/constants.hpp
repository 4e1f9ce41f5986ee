#pragma once

namespace confbound {

/// Volume of the unit sphere S^m: 2 pi^{(m+1)/2} / Gamma((m+1)/2).
double sphere_volume(int m);

/// m sigma_m^{2/m}: the round-sphere value of lambda_1 Vol^{2/m}.
double first_eigenvalue_bound(int m);

/// m (2 sigma_m)^{2/m}: the sharp bound on lambda_2 Vol^{2/m}.
double second_eigenvalue_bound(int m);

/// sigma_m m^{m/2}: m-energy of the identity map of the round sphere.
double identity_m_energy(int m);

}  // namespace confbound
