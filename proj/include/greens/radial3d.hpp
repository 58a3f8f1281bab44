#pragma once

#include <vector>

#include "greens/complex.hpp"
#include "greens/fit.hpp"
#include "greens/inverse1d.hpp"
#include "greens/ode.hpp"
#include "greens/potential.hpp"
#include "greens/stratified3d.hpp"

namespace greens {

struct RadialOptions {
    double tol = 1e-11;              // ODE tolerance
    double seed_rel = 1e-3;          // Frobenius offsets relative to the local scale
    int seed_degree = 10;
    double decay = 40.0;             // start large-l channels where r^(2l+1) has dropped by e^-decay
    double eigen_threshold = 1e-10;  // |wR - wL| relative to |wR| + |wL|
    double tail_rel = 1e-9;          // partial-wave tail acceptance
    int max_l = 20000;
};

/// One angular-momentum channel on the ball of radius R,
/// H = -d^2/dr^2 + l(l+1)/r^2 + u(r), Dirichlet at r = 0 (regular solution)
/// and at r = R. Both solutions are carried as log-derivatives
/// w = psi'/psi together with v = dw/dz and, on the right, log psi.
class RadialChannel {
public:
    /// Evaluation is valid on [r_min, r_max]; the off-diagonal value only
    /// needs r_min <= r<. r_max = 0 means r_min.
    RadialChannel(const Potential1D& u, double R, const ComplexEnergy& z, int l, double r_min, double r_max = 0.0,
                  const RadialOptions& opt = {});

    cplx w_left(double r) const;
    cplx w_right(double r) const;

    /// G(r, r') = psi_L(r<) psi_R(r>) / W.
    cplx green(double r, double rp) const;
    /// n(r) = G(r, r) = 1 / (wR - wL).
    cplx n(double r) const;
    /// n' = n (wL + wR).
    cplx dn(double r) const;
    /// dn/dz from the Riccati sensitivities.
    cplx dz_n(double r) const;

    int l() const { return l_; }
    double radius() const { return R_; }
    double r_min() const { return r_min_; }

private:
    State<3> left(double r) const;
    State<3> right(double r) const;

    int l_;
    double R_, r_min_;
    OdeSolution<3> left_;   // w, v, unused
    OdeSolution<3> right_;  // w, v, log psi
    double eigen_threshold_;
};

cplx green_radial_l(const Potential1D& u, double R, const ComplexEnergy& z, int l, double r, double rp,
                    const RadialOptions& opt = {});

struct PartialWaveSum {
    cplx value;
    double tail_estimate = 0.0;
    int terms = 0;  // channels summed
};

/// sum_{l <= L_max} (2l+1)/(4 pi r r') P_l(cos omega) G^(l)(r, r').
/// L_max = 0 chooses the cutoff adaptively. Throws TailNotConverged if the
/// estimated tail exceeds tail_rel |value|.
PartialWaveSum sum_partial_waves(const Potential1D& u, double R, const ComplexEnergy& z, double r, double rp,
                                 double omega, int L_max = 0, const RadialOptions& opt = {});

/// Angle between two points at radii r, r' with wall distances x = R - r and
/// perpendicular separation rho, |r - r'|^2 = (x - x')^2 + rho^2.
double ball_angle(double R, double x, double xp, double rho);

/// The free ball value at wall distances (x, x') and perpendicular separation rho.
PartialWaveSum ball_green(const Potential1D& u, double R, const ComplexEnergy& z, double x, double xp, double rho,
                          const RadialOptions& opt = {});

/// Taylor data of n^(l) at the center.
struct CenterExpansion {
    int l = 0;
    ExpansionFit fit;            // r, r^2, ..., r^N fitted to the channel diagonal
    std::vector<cplx> fitted;    // fitted[k] = c_k, k = 1..N
    BoundarySeries series;       // order-by-order solution, free coefficient from the fit
    double relation_residual = 0.0;  // max |radial inverse relation| of the series on the fit window
};

CenterExpansion center_expansion(const Potential1D& u, double R, const ComplexEnergy& z, int l, int N,
                                 const RadialOptions& opt = {});

/// c_3^(l) at u = 0: -2z / ((2l-1)(2l+1)(2l+3)).
cplx center_c3(const ComplexEnergy& z, int l);

struct NuRadial {
    cplx value;
    double tail_estimate = 0.0;
    int channels = 0;
};

/// nu_z(r) = sum_l (2l+1) dn^(l)/dz (r) / r^2, differentiated channel by channel.
/// The sum is cut where the wall image is below e^-decay and the bulk tail
/// is added from an even expansion in 1/(l + 1/2).
NuRadial nu_radial(const Potential1D& u, double R, const ComplexEnergy& z, double r, const RadialOptions& opt = {});

/// Fit of nu_z(x), x = R - r, with {x, x^2 ln(x/x0), x^2} and the next two
/// orders in the same log-then-power pattern; x0 = i/sqrt(z).
ExpansionFit nu_boundary_fit(const Potential1D& u, double R, const ComplexEnergy& z, double lo, double hi,
                             int samples, const RadialOptions& opt = {});

struct CurvatureTerms {
    cplx first;   // (x+x')/(2pi) int k G J0
    cplx second;  // -rho (x+x')/(4pi) int k^2 G J1
    cplx third;   // (1/pi) int k^3 J0 int y G G dy
    cplx total() const { return first + second + third; }
};

/// Leading 1/R correction of the ball Green's function at zero potential.
CurvatureTerms curvature_correction(const ComplexEnergy& z, double x, double xp, double rho,
                                    const StratifiedOptions& opt = {});

/// int_0^inf G(x, y) y G(y, x') dy for the free half-line at energy s.
cplx free_halfline_moment(const ComplexEnergy& s, double x, double xp);

/// (z/4pi) K0(-i sqrt(z) rho): coefficient of x x' off the axis.
cplx curvature_offaxis_coefficient(const ComplexEnergy& z, double rho);

struct CurvatureFit {
    cplx value;     // fitted coefficient
    cplx expected;  // closed form
    ExpansionFit fit;
    double rel_error() const { return std::abs(value - expected) / std::abs(expected); }
};

/// Coefficient of x x' at small x = x' off the axis, fitted from
/// G/(x x') = A + B x + C x^2 on geometric x in [lo, hi].
CurvatureFit curvature_offaxis_fit(const ComplexEnergy& z, double rho, double lo, double hi, int samples,
                                   const StratifiedOptions& opt = {});

/// On the axis with x' = ratio x: the constant x x'/(4pi (x+x')^2) and the
/// x^2 ln x coefficient -ratio z/(4pi), fitted with {1, x^2 ln x, x^2} and the
/// next two orders.
struct CurvatureAxisFit {
    CurvatureFit constant;
    CurvatureFit log;
};
CurvatureAxisFit curvature_axis_fit(const ComplexEnergy& z, double ratio, double lo, double hi, int samples,
                                    const StratifiedOptions& opt = {});

}  // namespace greens
