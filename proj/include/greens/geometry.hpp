#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "greens/complex.hpp"
#include "greens/potential.hpp"

namespace greens {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Boundary phi(r0) = C0 of a domain whose interior has phi < C0.
/// phi carries the dimension of length.
class ImplicitSurface {
public:
    /// |r - c| = R
    static ImplicitSurface sphere(double R, Vec3 center = {0.0, 0.0, 0.0});
    /// sqrt(x^2 + y^2) = R, axis along e3
    static ImplicitSurface cylinder(double R);
    /// n.r = c; n need not be normalized
    static ImplicitSurface plane(Vec3 n, double c = 0.0);
    /// m sqrt(x^2/a^2 + y^2/b^2 + z^2/c^2) = m with m = (abc)^(1/3)
    static ImplicitSurface ellipsoid(double a, double b, double c);
    /// s phi, s C0
    static ImplicitSurface scaled(const ImplicitSurface& base, double s);
    /// f(phi) = f(C0) with f(t) = t + t^2 / (2 L), increasing where t > -L
    static ImplicitSurface reparametrized(const ImplicitSurface& base, double L);

    double operator()(const Vec3& r) const { return phi_(r); }
    Vec3 gradient(const Vec3& r) const { return grad_(r); }
    Mat3 hessian(const Vec3& r) const { return hess_(r); }
    double level() const { return c0_; }
    const std::string& name() const { return name_; }

    double laplacian(const Vec3& r) const;
    /// central-difference Laplacian of phi alone
    double laplacian_fd(const Vec3& r, double h = 1e-4) const;

private:
    std::function<double(const Vec3&)> phi_;
    std::function<Vec3(const Vec3&)> grad_;
    std::function<Mat3(const Vec3&)> hess_;
    double c0_ = 0.0;
    std::string name_;
};

struct FootPoint {
    Vec3 r{}, r0{};
    double xi = 0.0;   // C0 - phi(r)
    double tau = 0.0;  // |r - r0|
    Vec3 u1{}, u2{};
};

/// Foot point along the orthogonal trajectory dr/dC = grad phi / |grad phi|^2,
/// integrated from phi(r) to C0 and polished by Newton steps along the gradient.
/// Throws NonConvergence where the gradient degenerates.
FootPoint foot_point(const ImplicitSurface& s, const Vec3& r);

/// r = r0 + u1 xi + u2 xi^2 + O(xi^3)
std::pair<Vec3, Vec3> expansion_vectors(const ImplicitSurface& s, const Vec3& r0);

/// |grad phi|^2 - 2 xi (g.Hg) / |g|^2 at r0.
double metric_expansion(const ImplicitSurface& s, const Vec3& r0, double xi);

struct BoundaryPrediction {
    double c1 = 0.0;        // -1/|grad phi|
    double d1 = 0.0;
    double d2 = 0.0;        // -(D phi - g.Hg/|g|^2) / (2 |g|^3)
    double d2_laplacian_only = 0.0;  // -D phi / (2 |g|^3)
    cplx xi0;               // i / sqrt(z)
    double tau_c1 = -1.0;
    double tau_d2 = 0.0;    // coefficient of tau^2 ln(tau/tau0)
    cplx tau0;              // xi0 / |g|
    double curvature = 0.0; // (D phi - g.Hg/|g|^2) / (2 |g|), 1/R on the sphere
};

BoundaryPrediction boundary_prediction(const ImplicitSurface& s, const Vec3& r0, const ComplexEnergy& z);

/// Half-space value at wall distances (tau, tau') on the common normal plus
/// curvature [tau tau'/(4pi (tau+tau')^2) - (tau tau' z/4pi) ln(-i sqrt(z)(tau+tau'))].
cplx curved_green_conjecture(const ImplicitSurface& s, const Vec3& r0, const ComplexEnergy& z, double tau,
                             double taup);

/// The bracket alone, for unit curvature.
cplx curvature_bracket(const ComplexEnergy& z, double tau, double taup);

struct ConjectureSample {
    double R, tau, taup;
    cplx scaled_difference;  // R (G_ball - G_half)
    cplx bracket;
};

struct ConjectureFit {
    std::vector<ConjectureSample> samples;
    cplx a, b, c;                // D / (tau tau') = a + b / R + c (tau + tau')
    double residual = 0.0;       // max |fit - data| / (tau tau')
    double bracket_scale = 0.0;  // max |bracket| / (tau tau')
    double difference_scale = 0.0;  // max |D| / (tau tau'), D = scaled difference - bracket
};

/// Free sphere on the axis: D = R (G_ball - G_half) - bracket, fitted as
/// D / (tau tau') = a + b/R + c (tau + tau'), decaying in both 1/R and tau.
ConjectureFit conjecture_harness(const ComplexEnergy& z, const std::vector<double>& radii,
                                 const std::vector<double>& taus, double ratio);

}  // namespace greens
