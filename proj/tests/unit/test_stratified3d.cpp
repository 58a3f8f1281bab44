#include <cmath>
#include <vector>

#include "doctest.h"
#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/inverse1d.hpp"
#include "greens/stratified3d.hpp"

using namespace greens;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = std::log(xs[i]), b = std::log(ys[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    const double n = double(xs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// independent image-charge form
cplx image_form(cplx z, double x, double xp, double rho) {
    const cplx k = std::sqrt(z);
    const double r1 = std::hypot(x - xp, rho), r2 = std::hypot(x + xp, rho);
    return -(std::exp(I * k * r1) / r1 - std::exp(I * k * r2) / r2) / (4.0 * pi);
}
}  // namespace

TEST_CASE("free half-space closed form") {
    const ComplexEnergy z(2.0, 1.0);
    CHECK(rel(green3d_free_halfspace(z, 0.3, 0.8, 0.4), image_form(z.value(), 0.3, 0.8, 0.4)) < 1e-14);
    for (double x : {0.2, 1.1})
        for (double rho : {0.3, 1.5}) {
            const cplx g = green3d_stratified(Potential1D::zero(), z, x, 0.7, rho);
            CHECK(rel(g, image_form(z.value(), x, 0.7, rho)) < 1e-8);
        }
}

TEST_CASE("stratified symmetry and wall") {
    const ComplexEnergy z(1.0, 2.0);
    const auto u = Potential1D::bump(2.0, 0.5);
    const cplx a = green3d_stratified(u, z, 0.3, 0.9, 0.6);
    const cplx b = green3d_stratified(u, z, 0.9, 0.3, 0.6);
    CHECK(rel(a, b) < 1e-9);
    const cplx far = std::abs(green3d_stratified(u, z, 1e-1, 0.9, 0.6));
    const cplx near = std::abs(green3d_stratified(u, z, 1e-4, 0.9, 0.6));
    CHECK(std::abs(near) < 2e-3 * std::abs(far));
    CHECK_THROWS_AS(green3d_stratified(u, ComplexEnergy(1.0, 0.0), 0.3, 0.9, 0.6), DomainError);
}

TEST_CASE("split remainder") {
    const ComplexEnergy z(2.0, 1.0);
    const auto s0 = split_remainder(Potential1D::zero(), z, 0.4, 0.4, 0.5);
    CHECK(std::abs(s0.delta) < 1e-11);
    CHECK(rel(s0.free, image_form(z.value(), 0.4, 0.4, 0.5)) < 1e-12);

    const auto u = Potential1D::bump(2.0, 0.5);
    std::vector<double> xs, ds;
    for (double x : {0.005, 0.01, 0.02, 0.04}) {
        const auto s = split_remainder(u, z, x, x, 0.5);
        CHECK(rel(s.total, s.free + s.delta) < 1e-14);
        xs.push_back(x);
        ds.push_back(std::abs(s.delta));
    }
    CHECK(std::abs(slope(xs, ds) - 2.0) < 0.05);
}

TEST_CASE("c2 approaches -i sqrt(z) like 1/z") {
    const auto u = Potential1D::bump(2.0, 0.5);
    std::vector<double> ss, ds;
    for (double s : {50.0, 100.0, 200.0, 400.0, 800.0}) {
        const ComplexEnergy z(0.0, s);
        const auto pf = solve_profile(u, DomainSpec::half_line(), z);
        ss.push_back(s);
        ds.push_back(std::abs(pf.c2() + I * z.sqrt()));
    }
    CHECK(std::abs(slope(ss, ds) + 1.0) < 0.05);
}

TEST_CASE("axis value") {
    const ComplexEnergy z(2.0, 1.0);
    const double x = 0.3, xp = 0.7;
    const auto a = green3d_axis(Potential1D::zero(), z, x, xp);
    CHECK(rel(a.total, image_form(z.value(), x, xp, 0.0)) < 1e-9);
    CHECK(std::abs(a.delta_static) < 1e-12);
    CHECK(rel(a.free_static, axis_leading(x, xp)) < 1e-14);
    // the axis form is the rho -> 0 limit of the reduction; the remainder is
    // smooth in rho^2, so extrapolate it
    const auto u = Potential1D::linear(1.0);
    const cplx d1 = split_remainder(u, z, x, xp, 0.025).delta;
    const cplx d2 = split_remainder(u, z, x, xp, 0.05).delta;
    const cplx axis_delta = green3d_axis(u, z, x, xp).total - image_form(z.value(), x, xp, 0.0);
    CHECK(rel(axis_delta, (4.0 * d1 - d2) / 3.0) < 1e-5);
}

TEST_CASE("axis universal terms") {
    const ComplexEnergy z(2.0, 1.0);
    for (const auto& u : {Potential1D::zero(), Potential1D::bump(2.0, 0.5)}) {
        const auto f = fit_axis_universal(u, z, 0.005, 0.1, 12);
        CHECK(std::abs(f.leading - 1.0) < 1e-3);
        CHECK(std::abs(f.subleading - 1.0) < 1e-2);
        CHECK(f.fit.residual < 1e-5);
    }
}

TEST_CASE("nu stratified") {
    const ComplexEnergy z(2.0, 1.0);
    const cplx k = z.sqrt();
    for (double x : {0.1, 0.8, 2.0}) {
        const cplx expect = (1.0 - std::exp(2.0 * I * k * x)) / (2.0 * I * k);
        CHECK(rel(nu_stratified(Potential1D::zero(), z, x), expect) < 1e-10);
    }
    const auto u = Potential1D::bump(2.0, 0.5);
    const double h = 1e-5;
    const cplx d = (nu_stratified(u, z, h) - nu_stratified(u, z, 0.0 + 2 * h)) / (-h);
    CHECK(std::abs(d + 1.0) < 1e-4);
    // inverse relation residual
    const auto pf = solve_profile(u, DomainSpec::half_line(), z);
    for (double x : {0.3, 1.0, 2.5}) {
        CHECK(rel(pf.n(x), nu_stratified(u, z, x)) < 1e-8);
        CHECK(std::abs(profile_residual(pf.n(x), pf.dn(x), pf.d2n(x), z.value(), u(x))) < 1e-8);
    }
}

TEST_CASE("4 pi dG/dz on the axis reproduces nu") {
    const ComplexEnergy z(2.0, 1.0);
    const auto u = Potential1D::bump(2.0, 0.5);
    const double x = 0.4, dz = 1e-2;
    const cplx nu = nu_stratified(u, z, x);
    // regularized by x' = x + d; the kink of the 1D kernel at x = x' gives an
    // error |d| max(|n'|, 1) / 2 + O(d^2), the z difference adds O(dz^2)
    const double slope_bound = std::max(std::abs(Green1D(u, DomainSpec::half_line(), z).diagonal_jet(x).dn), 1.0);
    std::vector<double> ds, errs;
    for (double d : {0.1, 0.05, 0.025}) {
        const cplx gp = green3d_axis(u, ComplexEnergy(z.value() + dz), x, x + d).total;
        const cplx gm = green3d_axis(u, ComplexEnergy(z.value() - dz), x, x + d).total;
        const double err = std::abs(4.0 * pi * (gp - gm) / (2.0 * dz) - nu);
        CHECK(err < d * slope_bound);
        ds.push_back(d);
        errs.push_back(err);
    }
    CHECK(std::abs(slope(ds, errs) - 1.0) < 0.15);
}
