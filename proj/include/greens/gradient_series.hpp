#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "greens/complex.hpp"
#include "greens/potential.hpp"

namespace greens {

using Rational = boost::multiprecision::cpp_rational;

/// a + b i with a, b rational.
struct GaussRational {
    Rational re{0}, im{0};

    GaussRational() = default;
    GaussRational(Rational a, Rational b = 0) : re(std::move(a)), im(std::move(b)) {}
    static GaussRational i() { return {0, 1}; }

    bool is_zero() const { return re == 0 && im == 0; }
    cplx value() const;
    std::string str() const;

    GaussRational operator-() const { return {-re, -im}; }
    GaussRational& operator+=(const GaussRational& o);
    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a += -b; }
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b);
    friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }
};

/// (-i)^p for any integer p.
GaussRational minus_i_power(int p);

/// coeff * prod_f (d^f u) * k1^a k2^b k3^c
struct DiffPolyTerm {
    GaussRational coeff;
    std::vector<MultiIndex> factors;  // sorted
    MultiIndex kmono{0, 0, 0};

    int k_degree() const { return kmono[0] + kmono[1] + kmono[2]; }
    int derivative_count() const;
    std::string str() const;
};

struct AlphaSeries {
    int n = 1;
    std::vector<DiffPolyTerm> terms;

    bool is_zero() const { return terms.empty(); }
    /// k-degree + derivative count + 2 (number of u factors) = 2(n - 1) for every term.
    bool homogeneous() const;
    std::string str() const;
};

/// alpha_1 .. alpha_nmax in dim active coordinates (1..3).
std::vector<AlphaSeries> alpha_series(int nmax, int dim = 3);
AlphaSeries alpha_terms(int n, int dim = 3);

/// Values of u and its derivatives at one point.
struct UPointData {
    double u = 0.0;
    std::map<MultiIndex, double> derivs;

    static UPointData from_field(const Field3D& f, const Vec3& r, int max_order);
    double factor(const MultiIndex& a) const;
};

/// int_0^inf k^(2q) / (w - k^2)^m dk for m > q + 1/2, closed form; w = z - u.
cplx radial_k_integral(int q, int m, cplx w);

/// Contribution of the given alpha_n to i nu_z at one point (three dimensions).
/// Throws BranchPointHit when z - u is real and nonnegative.
cplx k_reduce_diagonal(const std::vector<AlphaSeries>& series, const UPointData& data, const ComplexEnergy& z);

/// coeff * prod_f (d^f u) * (z - u)^(two_s / 2)
struct PowerTerm {
    GaussRational coeff;
    std::vector<MultiIndex> factors;
    int two_s = -1;
    std::string str() const;
};

/// Direct series after the k reduction. In three dimensions the sum is i nu_z,
/// in one dimension it is the diagonal n(x) = G(x, x).
struct DirectSeries {
    int dim = 3;
    std::vector<PowerTerm> terms;

    cplx evaluate(const UPointData& data, const ComplexEnergy& z) const;
    std::string str() const;
};

/// All terms with (z - u)^(-p/2), p <= order.
DirectSeries direct_series(int order, int dim = 3);
/// All terms with at most max_weight derivatives in total.
DirectSeries direct_series_by_weight(int max_weight, int dim = 3);
/// Reduce the given alpha_n without truncation.
DirectSeries reduce_series(const std::vector<AlphaSeries>& series, int dim = 3);

/// i nu_z = lead/sqrt(z-u) + laplacian Du/(z-u)^(5/2) + (grad_sq |grad u|^2 + bilaplacian D^2 u)/(z-u)^(7/2)
struct CoefficientTable {
    GaussRational lead, laplacian, grad_sq, bilaplacian;
    bool complete = false;  // the series is exactly this combination
    std::vector<GaussRational> values() const { return {lead, laplacian, grad_sq, bilaplacian}; }
};
CoefficientTable coefficient_table(const DirectSeries& s);

struct NuDirect {
    cplx nu;
    cplx i_nu;
    CoefficientTable table;
};

/// nu_z(r) from the direct series through (z - u)^(-order/2), order odd <= 7.
NuDirect nu_direct_series(const Field3D& u, const ComplexEnergy& z, const Vec3& r, int order = 7);

/// Restrict to one coordinate, insert the direct series for n into
/// -(1 - n'^2 + 2 n n'') / (4 n^2) and expand; returns the terms that differ
/// from z - u up to max_weight derivatives (empty when the 1D relation holds).
std::vector<std::string> verify_1d_reduction(int max_weight);

/// nu_z sampled on a uniform lattice. Derivatives by tensor-product central
/// stencils on five points per axis: first and second order are O(h^4),
/// third and fourth order O(h^2). A margin of two nodes is excluded.
class NuField3D {
public:
    NuField3D(Vec3 origin, double h, std::array<int, 3> dims, std::vector<cplx> values);
    static NuField3D sample(const std::function<cplx(const Vec3&)>& f, Vec3 origin, double h,
                            std::array<int, 3> dims);

    double spacing() const { return h_; }
    const std::array<int, 3>& dims() const { return dims_; }
    Vec3 point(int i, int j, int k) const;
    cplx at(int i, int j, int k) const;
    cplx derivative(int i, int j, int k, const MultiIndex& a) const;
    static constexpr int margin = 2;

private:
    Vec3 origin_;
    double h_;
    std::array<int, 3> dims_;
    std::vector<cplx> values_;
};

struct InverseTerms {
    cplx nu;
    cplx lead;  // -(1 - |grad nu|^2 + 2 nu D nu) / (4 nu^2)
    cplx phi1, phi2;
    cplx rhs() const { return lead - phi1 - phi2; }
};

/// Terms of the inverse relation from the 34 derivatives of order <= 4.
/// d[alpha] holds the derivative with multi-index alpha.
InverseTerms inverse_terms(cplx nu, const std::map<MultiIndex, cplx>& d);
InverseTerms inverse_terms(const NuField3D& f, int i, int j, int k);

struct InverseResidual {
    std::array<int, 3> dims{};         // interior lattice
    std::vector<cplx> residual;        // rhs - (z - u), row-major over the interior
    std::vector<cplx> phi1, phi2;
    std::vector<char> masked;          // |nu| below the floor
    double max_residual = 0.0;         // over unmasked interior points
    double max_phi1 = 0.0, max_phi2 = 0.0;
    int masked_count = 0;
};

/// rhs of the inverse relation minus (z - u) on the interior of the lattice.
InverseResidual inverse_rhs(const NuField3D& field, const Field3D& u, const ComplexEnergy& z,
                            double nu_floor = 1e-8);

}  // namespace greens
