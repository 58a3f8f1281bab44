#pragma once

#include <vector>

#include "greens/complex.hpp"
#include "greens/ode.hpp"
#include "greens/potential.hpp"

namespace greens {

struct Green1DOptions {
    double tol = 1e-11;
    // Half-line: largest coordinate that will be evaluated. The right
    // solution is seeded further out, where it has decayed by 1e-12.
    double reach = 10.0;
    double eigen_threshold = 1e-10;
};

/// psi_L(0) = 0, psi_L'(0) = 1; psi_R vanishes at X (psi_R'(X) = -1) or is
/// the decaying solution on the half-line. W = psi_L psi_R' - psi_L' psi_R.
struct HomogeneousPair {
    Ode2Solution left;
    Ode2Solution right;
    double x_end = 0.0;        // X, or the seeding point on the half-line
    cplx w_scaled{0.0, 0.0};   // W = w_scaled * exp(w_log)
    cplx w_log{0.0, 0.0};

    cplx wronskian() const { return w_scaled * std::exp(w_log); }
    /// Wronskian evaluated at x; constant up to integration error.
    cplx wronskian_at(double x) const;
};

/// Point beyond `reach` where exp(-int Im sqrt(z - u)) has fallen to 1e-12.
double decay_point(const Potential1D& u, const ComplexEnergy& z, double reach);

HomogeneousPair homogeneous_pair(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z,
                                 const Green1DOptions& opt = {});

/// Value and first two derivatives of the diagonal n(x) = G(x, x).
struct DiagonalJet {
    cplx n, dn, d2n;
};

class Green1D {
public:
    Green1D(Potential1D u, DomainSpec domain, ComplexEnergy z, const Green1DOptions& opt = {});

    cplx operator()(double x, double xp) const;
    cplx diagonal(double x) const { return (*this)(x, x); }
    DiagonalJet diagonal_jet(double x) const;
    /// d/dx G(x, xp) from below and above xp; their difference is the unit jump.
    std::pair<cplx, cplx> jump(double xp) const;

    cplx wronskian() const { return pair_.wronskian(); }
    const HomogeneousPair& pair() const { return pair_; }
    const DomainSpec& domain() const { return domain_; }
    const ComplexEnergy& energy() const { return z_; }
    const Potential1D& potential() const { return u_; }
    double right_end() const { return pair_.x_end; }
    double reach() const;

private:
    Potential1D u_;
    DomainSpec domain_;
    ComplexEnergy z_;
    HomogeneousPair pair_;
};

cplx green_direct(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z, double x,
                  double xp, const Green1DOptions& opt = {});

/// G(x, x') without keeping solution records: integrates psi_L to x< and
/// psi_R down to x< only. Cheap enough for use inside quadratures.
cplx green1d_point(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z, double x,
                   double xp, double tol = 1e-11);

/// Free half-line: (e^{ik|x-x'|} - e^{ik(x+x')}) / (2ik), k = sqrt_upper(z).
cplx free_halfline_green(const ComplexEnergy& z, double x, double xp);
/// Free box (0, X).
cplx free_box_green(const ComplexEnergy& z, double X, double x, double xp);

/// Finite-difference eigenpairs of -d^2/dx^2 + u on (0, X) with Dirichlet
/// ends; `grid` counts both boundary nodes.
class SpectralOracle {
public:
    SpectralOracle(const Potential1D& u, double X, int grid);

    int size() const { return static_cast<int>(lambda_.size()); }
    double spacing() const { return h_; }
    double node(int j) const { return j * h_; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    /// psi_k at grid node j (0 and grid-1 are the walls), normalized on the grid.
    double eigenvector(int k, int j) const;

    struct Value {
        cplx value;
        double tail_estimate;  // |last term| * K, the 1/K tail scale
    };
    /// Truncated spectral sum with the K lowest modes. x, x' must be grid nodes.
    Value green(const ComplexEnergy& z, double x, double xp, int K) const;

private:
    int node_index(double x) const;
    double X_, h_;
    int grid_;
    std::vector<double> lambda_;
    std::vector<double> vec_;  // column-major (grid-2) x (grid-2)
};

/// Richardson combination of full spectral sums on grids N and 2N-1.
cplx spectral_oracle_extrapolated(const Potential1D& u, double X, const ComplexEnergy& z, double x,
                                  double xp, int grid);

cplx spectral_oracle(const Potential1D& u, double X, const ComplexEnergy& z, double x, double xp, int K,
                     int grid);

}  // namespace greens
