#pragma once

#include <complex>
#include <numbers>

namespace greens {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = std::numbers::pi;

/// Square root on the branch Im(w) >= 0. Positive reals map to the positive
/// root; the negative real axis is reached as the limit from above the cut.
inline cplx sqrt_upper(cplx z) {
    if (z == cplx{0.0, 0.0}) return {0.0, 0.0};
    cplx w = std::sqrt(z);
    if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
    return w;
}

/// Spectral parameter with its square root cached on the upper branch.
class ComplexEnergy {
public:
    ComplexEnergy() = default;
    ComplexEnergy(cplx z) : z_(z), sqrt_z_(sqrt_upper(z)) {}  // NOLINT: implicit by intent
    ComplexEnergy(double re, double im) : ComplexEnergy(cplx{re, im}) {}

    cplx value() const { return z_; }
    cplx sqrt() const { return sqrt_z_; }
    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }

    ComplexEnergy shifted(cplx dz) const { return ComplexEnergy(z_ + dz); }

private:
    cplx z_{0.0, 0.0};
    cplx sqrt_z_{0.0, 0.0};
};

}  // namespace greens
