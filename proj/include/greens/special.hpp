#pragma once

#include <vector>

#include "greens/complex.hpp"

namespace greens::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

double bessel_j0(double x);
double bessel_j1(double x);

/// Modified Bessel I0 for complex argument.
cplx bessel_i0(cplx w);

/// Modified Bessel K0 on Re(w) > 0 (plus the positive real axis).
/// Throws DomainError at w = 0 or for Re(w) <= 0.
cplx bessel_k0(cplx w);
double bessel_k0(double x);

/// Legendre polynomial P_l(x), |x| <= 1.
double legendre_p(int l, double x);

/// P_0(x) .. P_lmax(x) by the three-term recurrence.
std::vector<double> legendre_p_all(int lmax, double x);

}  // namespace greens::special
