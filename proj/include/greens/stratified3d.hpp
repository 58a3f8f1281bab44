#pragma once

#include <vector>

#include "greens/complex.hpp"
#include "greens/fit.hpp"
#include "greens/potential.hpp"
#include "greens/quadrature.hpp"

namespace greens {

struct StratifiedOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double ode_tol = 1e-11;
    int max_tail_panels = 600;
};

/// int_0^inf f(k) dk: head on [0, 2 k_peak + 2 period] by adaptive Gauss-Kronrod,
/// tail in panels of width `period` with Wynn acceleration.
/// Throws TailNotConverged tagged with `op`.
cplx k_transform(const CFunc& f, double k_peak, double period, const StratifiedOptions& opt, const char* op);

/// pi / rho off the axis, 2 / |x - x'| on it.
double panel_period(double x, double xp, double rho);

/// Free half-space: -(1/4pi) [e^{ik R1}/R1 - e^{ik R2}/R2], R1^2 = (x-x')^2 + rho^2,
/// R2^2 = (x+x')^2 + rho^2.
cplx green3d_free_halfspace(const ComplexEnergy& z, double x, double xp, double rho);

/// (1/2pi) int_0^inf k G1D_{z-k^2}(x, x') J0(k rho) dk for a potential of the
/// wall-normal coordinate on the half-line.
cplx green3d_stratified(const Potential1D& u, const ComplexEnergy& z, double x, double xp, double rho,
                        const StratifiedOptions& opt = {});

struct SplitRemainder {
    cplx free;
    cplx delta;
    cplx total;
};

/// The remainder is integrated directly from G1D - G1D_free, which keeps its
/// small-x x' structure free of cancellation.
SplitRemainder split_remainder(const Potential1D& u, const ComplexEnergy& z, double x, double xp, double rho,
                               const StratifiedOptions& opt = {});

struct AxisValue {
    cplx total;
    cplx free_static;   // -x< / (2 pi |x-x'| (x+x'))
    cplx delta_static;  // potential part of the z = 0 value
    cplx contour;       // (1/4pi) int_0^z G1D_s ds
};

/// On-axis (rho = 0) form built from the z = 0 value plus a contour integral
/// in the energy along the segment [0, z].
AxisValue green3d_axis(const Potential1D& u, const ComplexEnergy& z, double x, double xp,
                       const StratifiedOptions& opt = {});

cplx axis_leading(double x, double xp);
cplx axis_subleading(const ComplexEnergy& z, double x, double xp);

/// nu_z(x) = n^{1D}_z(x) on the half-line.
cplx nu_stratified(const Potential1D& u, const ComplexEnergy& z, double x, double tol = 1e-11);

struct AxisFit {
    cplx leading;     // multiple of -x< / (2 pi |x-x'| (x+x'))
    cplx subleading;  // multiple of -z x< / (4 pi)
    ExpansionFit fit;
    double remainder_slope = 0.0;  // log-log slope of what is left after both terms
};

/// Fits G(x, ratio*x) on geometric x in [lo, hi] with {x^-1, x, x^2 ln x, x^2, x^3}.
AxisFit fit_axis_universal(const Potential1D& u, const ComplexEnergy& z, double lo, double hi, int samples,
                           double ratio = 2.0, const StratifiedOptions& opt = {});

}  // namespace greens
