#pragma once

#include <vector>

#include "greens/complex.hpp"
#include "greens/ode.hpp"
#include "greens/potential.hpp"

namespace greens {

/// Taylor coefficients of a diagonal profile n(x) = sum_{k>=1} c_k x^k at a
/// Dirichlet wall. For angular momentum l the centrifugal term l(l+1)/x^2 is
/// included and the free coefficient is c_{2l+2}.
struct BoundarySeries {
    std::vector<cplx> c;  // c[0] = 0, c[1] .. c[N]
    cplx free_value{0.0, 0.0};
    int free_index = 2;
    int l = 0;
    ComplexEnergy z;
    std::vector<double> u;  // u_0 .. u_{N}
    // Left-over of the order that leaves the free coefficient undetermined.
    // Nonzero signals that the pure power ansatz needs logarithmic terms.
    cplx obstruction{0.0, 0.0};

    int degree() const { return static_cast<int>(c.size()) - 1; }
    cplx operator[](int k) const { return c[k]; }
    cplx eval(double x) const;
    cplx deriv(double x) const;
    cplx deriv2(double x) const;
    /// log n continued from ln x + i*pi at the wall.
    cplx log_n(double x) const;
    /// Primitive of 1/(2n) with the constant fixed by -ln(x)/2 as x -> 0.
    cplx half_inverse_primitive(double x) const;
};

/// Order-by-order solution of n'^2 - 2 n n'' - 1 - 4 n^2 (z - u) + 4 l(l+1) n^2/x^2 = 0
/// with c_1 = -1/(2l+1). `u_taylor` holds u_0, u_1, ...; u_0 enters as z - u_0.
BoundarySeries series_coefficients(const std::vector<double>& u_taylor, const ComplexEnergy& z,
                                   cplx free_value, int N, int l = 0);

/// The 1D wall series (l = 0) with c_2 given.
BoundarySeries boundary_coeffs(const std::vector<double>& u_taylor, const ComplexEnergy& z, cplx c2, int N);

/// z - u + (1 - n'^2 + 2 n n'') / (4 n^2): vanishes on exact profiles.
cplx profile_residual(cplx n, cplx dn, cplx d2n, cplx z, double u);

struct ProfileOptions {
    double tol = 1e-12;          // ODE tolerance for the profile
    double newton_tol = 1e-12;   // relative step size at convergence
    int max_newton = 60;
    double seed_rel = 1e-4;      // seeding offset relative to the domain scale
    int seed_degree = 5;
    double reach = 4.0;          // half-line extent, capped at 3 / Im sqrt(z)
    double node_threshold = 1e-10;
};

/// Diagonal profile obtained from the inverse relation. On an interval the
/// profile is shot from both walls and matched at X/2; on the half-line the
/// far condition is the decaying solution's log-derivative.
class ProfileField {
public:
    struct Point {
        cplx n, dn, log_n, q;  // q = primitive of 1/(2n), continuous on the domain
    };

    Point at(double x) const;
    cplx n(double x) const { return at(x).n; }
    cplx dn(double x) const { return at(x).dn; }
    cplx d2n(double x) const;

    cplx c2() const { return left_.free_value; }
    cplx c2_right() const { return right_.free_value; }
    const BoundarySeries& left_series() const { return left_; }
    const BoundarySeries& right_series() const { return right_; }
    const ComplexEnergy& energy() const { return z_; }
    const DomainSpec& domain() const { return domain_; }
    double extent() const { return extent_; }
    int newton_iterations() const { return iterations_; }

    /// Sampled profile and the max |relation residual| on the interior samples
    /// (second derivative by central differences of n').
    std::vector<double> grid;
    std::vector<cplx> values;
    double residual = 0.0;

private:
    friend ProfileField solve_profile(const Potential1D&, const DomainSpec&, const ComplexEnergy&,
                                      const ProfileOptions&);
    Potential1D u_;
    DomainSpec domain_;
    ComplexEnergy z_;
    double extent_ = 0.0, x_seed_ = 0.0, x_match_ = 0.0;
    BoundarySeries left_, right_;
    OdeSolution<4> left_sol_, right_sol_;
    cplx log_offset_{0.0, 0.0}, q_offset_{0.0, 0.0};
    int iterations_ = 0;
};

ProfileField solve_profile(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z,
                           const ProfileOptions& opt = {});

/// G(x, x') = sqrt(n(x)) sqrt(n(x')) exp(int_{x<}^{x>} ds / (2 n(s))).
cplx offdiag_reconstruct(const ProfileField& profile, double x, double xp);

/// -x< + c2 x x' + (z/6) x< (x<^2 + 3 x>^2)
cplx boundary_green_2pt(cplx c2, const ComplexEnergy& z, double x, double xp);

}  // namespace greens
