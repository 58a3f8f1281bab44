#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "greens/complex.hpp"

namespace greens {

enum class PotentialKind { zero, constant, polynomial, harmonic, gaussian, bump, analytic, tabulated };

/// Real potential of one coordinate. Analytic kinds also evaluate at
/// complex arguments, which is how Taylor coefficients are obtained.
class Potential1D {
public:
    Potential1D();

    static Potential1D zero();
    static Potential1D constant(double c);
    /// sum_k a[k] x^k
    static Potential1D polynomial(std::vector<double> a);
    static Potential1D linear(double slope, double offset = 0.0);
    /// k (x - c)^2
    static Potential1D harmonic(double k, double center);
    /// a exp(-((x - c)/w)^2)
    static Potential1D gaussian(double a, double center, double width);
    /// a x exp(-(x/w)^2): vanishes at the wall with slope a
    static Potential1D bump(double a, double width);
    /// Entire or analytic f; `radius` bounds the Cauchy contour used for Taylor data.
    static Potential1D analytic(std::function<cplx(cplx)> f, std::string name, double radius);
    /// Natural cubic spline through (xs, ys).
    static Potential1D tabulated(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    cplx at(cplx x) const;

    /// u_0 .. u_{n-1} with u(x_ref + y) = sum u_k y^k.
    std::vector<double> taylor(double x_ref, int n) const;
    /// Coefficients of u(x_ref - y) in powers of y.
    std::vector<double> taylor_reflected(double x_ref, int n) const;
    /// k-th derivative at x.
    double derivative(double x, int k) const;

    /// u + c (the gauge transformation is a constant shift).
    Potential1D shifted(double c) const;

    PotentialKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool is_zero() const { return kind_ == PotentialKind::zero; }
    bool is_analytic() const { return kind_ != PotentialKind::tabulated; }

private:
    PotentialKind kind_ = PotentialKind::zero;
    std::string name_ = "zero";
    std::vector<double> poly_;
    std::function<cplx(cplx)> f_;
    double radius_ = 1.0;
    double offset_ = 0.0;
    struct Spline;
    std::shared_ptr<const Spline> spline_;
};

struct GaugeShifted {
    Potential1D u;
    ComplexEnergy z;
    double u0 = 0.0;
};

/// Moves u(x_ref) from the potential into the energy: (u - u0, z - u0).
GaugeShifted gauge_shift(const Potential1D& u, const ComplexEnergy& z, double x_ref = 0.0);

using Vec3 = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Scalar field in three dimensions with derivatives of any order.
class Field3D {
public:
    static Field3D zero();
    static Field3D constant(double c);
    /// sum_i k_i (x_i - c_i)^2
    static Field3D quadratic(Vec3 k, Vec3 center);
    /// a exp(-|r - c|^2 / s^2)
    static Field3D gaussian(double a, Vec3 center, double s);
    /// u(r_axis)
    static Field3D stratified(Potential1D u, int axis);
    /// u(|r - c|)
    static Field3D radial(Potential1D u, Vec3 center = {0.0, 0.0, 0.0});

    double operator()(const Vec3& r) const;
    double derivative(const Vec3& r, const MultiIndex& alpha) const;
    const std::string& name() const { return name_; }

private:
    enum class Kind { zero, constant, quadratic, gaussian, stratified, radial } kind_ = Kind::zero;
    std::string name_ = "zero";
    double a_ = 0.0, s_ = 1.0;
    Vec3 k_{}, c_{};
    int axis_ = 0;
    std::shared_ptr<const Potential1D> u_;
};

enum class DomainKind { interval, half_line, ball, half_space, cylinder, implicit };

struct DomainSpec {
    DomainKind kind = DomainKind::half_line;
    double extent = 0.0;  // X for intervals, R for balls and cylinders

    static DomainSpec interval(double X);
    static DomainSpec half_line();
    static DomainSpec ball(double R);
    static DomainSpec half_space();
    static DomainSpec cylinder(double R);

    bool bounded() const { return kind == DomainKind::interval || kind == DomainKind::ball; }
    std::string describe() const;
};

}  // namespace greens
