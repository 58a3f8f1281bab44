#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "greens/errors.hpp"
#include "greens/geometry.hpp"
#include "greens/radial3d.hpp"
#include "greens/stratified3d.hpp"

using namespace greens;

namespace {
double dist(const Vec3& a, const Vec3& b) { return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]); }

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

// point at level gap xi on the trajectory through r0: RK4 on dr/dxi = -g/|g|^2
Vec3 along(const ImplicitSurface& s, const Vec3& r0, double xi) {
    Vec3 x = r0;
    const int n = 4000;
    const double h = xi / n;
    auto f = [&](const Vec3& p) {
        const Vec3 g = s.gradient(p);
        const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        return Vec3{-g[0] / g2, -g[1] / g2, -g[2] / g2};
    };
    for (int k = 0; k < n; ++k) {
        const Vec3 k1 = f(x);
        Vec3 y{x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1], x[2] + 0.5 * h * k1[2]};
        const Vec3 k2 = f(y);
        y = {x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1], x[2] + 0.5 * h * k2[2]};
        const Vec3 k3 = f(y);
        y = {x[0] + h * k3[0], x[1] + h * k3[1], x[2] + h * k3[2]};
        const Vec3 k4 = f(y);
        for (int i = 0; i < 3; ++i) x[i] += h * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0;
    }
    return x;
}
}  // namespace

TEST_CASE("foot points") {
    const auto sph = ImplicitSurface::sphere(1.0);
    const auto fp = foot_point(sph, {0.0, 0.0, 0.9});
    CHECK(dist(fp.r0, {0.0, 0.0, 1.0}) < 1e-12);
    CHECK(std::abs(fp.xi - 0.1) < 1e-14);
    CHECK(std::abs(fp.tau - 0.1) < 1e-12);

    const Vec3 n{0.0, 0.6, 0.8};
    const auto pl = ImplicitSurface::plane(n);
    const Vec3 r{0.3, -0.4, -0.2};
    const double nr = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
    const auto fq = foot_point(pl, r);
    CHECK(dist(fq.r0, {r[0] - nr * n[0], r[1] - nr * n[1], r[2] - nr * n[2]}) < 1e-12);

    const auto big = ImplicitSurface::scaled(sph, 2.0);
    const auto fb = foot_point(big, {0.0, 0.0, 0.9});
    CHECK(std::abs(fb.xi - 0.2) < 1e-14);
    CHECK(std::abs(fb.tau - 0.1) < 1e-12);

    const auto ell = ImplicitSurface::ellipsoid(1.0, 1.5, 2.0);
    const auto fe = foot_point(ell, {0.3, 0.5, 1.2});
    CHECK(std::abs(ell(fe.r0) - ell.level()) < 1e-12);
    // tau = xi / |grad phi(r0)| + O(xi^2)
    const auto g = ell.gradient(fe.r0);
    CHECK(std::abs(fe.tau - fe.xi / std::hypot(g[0], g[1], g[2])) < fe.xi * fe.xi * 10.0);

    CHECK_THROWS_AS(foot_point(sph, {0.0, 0.0, 0.0}), NonConvergence);
}

TEST_CASE("expansion vectors") {
    const auto [p1, p2] = expansion_vectors(ImplicitSurface::plane({0.0, 0.0, 2.0}), {1.0, 1.0, 0.0});
    CHECK(std::abs(p1[2] + 0.5) < 1e-15);
    CHECK(std::abs(p2[0]) + std::abs(p2[1]) + std::abs(p2[2]) == 0.0);

    const Vec3 r0{0.6, 0.0, 0.8};
    const auto [s1, s2] = expansion_vectors(ImplicitSurface::sphere(1.0), r0);
    CHECK(dist(s1, {-0.6, 0.0, -0.8}) < 1e-15);
    CHECK(std::abs(s2[0]) + std::abs(s2[1]) + std::abs(s2[2]) < 1e-15);

    // generic quadric: reconstruction error shrinks like xi^3
    const auto ell = ImplicitSurface::ellipsoid(1.0, 1.5, 2.0);
    const auto fp = foot_point(ell, {0.4, 0.6, 1.5});
    const auto [u1, u2] = expansion_vectors(ell, fp.r0);
    std::vector<double> xs, es;
    for (double xi : {0.04, 0.02, 0.01, 0.005}) {
        const Vec3 exact = along(ell, fp.r0, xi);
        const Vec3 approx{fp.r0[0] + u1[0] * xi + u2[0] * xi * xi, fp.r0[1] + u1[1] * xi + u2[1] * xi * xi,
                          fp.r0[2] + u1[2] * xi + u2[2] * xi * xi};
        xs.push_back(xi);
        es.push_back(dist(exact, approx));
    }
    CHECK(slope(xs, es) > 2.9);
}

TEST_CASE("metric and Laplacian identities") {
    const ComplexEnergy z(2.0, 1.0);
    for (const auto& s : {ImplicitSurface::sphere(1.3), ImplicitSurface::cylinder(0.8),
                          ImplicitSurface::ellipsoid(1.0, 1.5, 2.0),
                          ImplicitSurface::reparametrized(ImplicitSurface::sphere(1.0), 0.7)}) {
        const auto fp = foot_point(s, {0.3, 0.4, 0.5});
        std::vector<double> xs, es, ls;
        for (double xi : {0.02, 0.01, 0.005}) {
            const Vec3 r = along(s, fp.r0, xi);
            const auto g = s.gradient(r);
            xs.push_back(xi);
            es.push_back(std::abs(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] - metric_expansion(s, fp.r0, xi)));
            ls.push_back(std::abs(s.laplacian_fd(r) - s.laplacian(fp.r0)));
        }
        // exact on the sphere and the cylinder
        if (*std::max_element(es.begin(), es.end()) > 1e-12) CHECK(slope(xs, es) > 1.9);
        if (*std::max_element(ls.begin(), ls.end()) > 1e-6) CHECK(slope(xs, ls) > 0.9);
    }
}

TEST_CASE("boundary predictions") {
    const ComplexEnergy z(2.0, 1.0);
    for (double R : {1.0, 2.0}) {
        const auto p = boundary_prediction(ImplicitSurface::sphere(R), {0.0, R, 0.0}, z);
        CHECK(p.c1 == -1.0);
        CHECK(p.d1 == 0.0);
        CHECK(std::abs(p.d2 + 1.0 / R) < 1e-15);
        CHECK(std::abs(p.d2_laplacian_only + 1.0 / R) < 1e-15);
        const auto c = boundary_prediction(ImplicitSurface::cylinder(R), {R, 0.0, 0.3}, z);
        CHECK(c.c1 == -1.0);
        CHECK(std::abs(c.d2 + 0.5 / R) < 1e-15);
        CHECK(std::abs(c.d2_laplacian_only + 0.5 / R) < 1e-15);
    }
    const auto pl = boundary_prediction(ImplicitSurface::plane({0.0, 0.0, 1.0}), {0.2, 0.1, 0.0}, z);
    CHECK(pl.c1 == -1.0);
    CHECK(pl.d2 == 0.0);
    CHECK(std::abs(pl.xi0 - I / z.sqrt()) < 1e-15);

    // tau-form coefficients do not depend on how the surface is labelled
    const auto sph = ImplicitSurface::sphere(1.5);
    const Vec3 r0{0.0, 0.9, 1.2};
    const auto base = boundary_prediction(sph, r0, z);
    for (const auto& s : {ImplicitSurface::scaled(sph, 3.0), ImplicitSurface::reparametrized(sph, 0.4),
                          ImplicitSurface::reparametrized(ImplicitSurface::scaled(sph, 0.5), 2.0)}) {
        const auto p = boundary_prediction(s, r0, z);
        const auto g = s.gradient(r0);
        const double gn = std::hypot(g[0], g[1], g[2]);
        CHECK(std::abs(p.c1 * gn + 1.0) < 1e-14);
        CHECK(std::abs(p.tau_d2 - base.tau_d2) < 1e-10);
        // xi-form: xi = |g| tau + O(tau^2)
        CHECK(std::abs(p.d2 * gn * gn - base.d2) < 1e-10);
    }
    // the Laplacian-only form changes under f(phi) with f'' != 0
    const auto rp = boundary_prediction(ImplicitSurface::reparametrized(sph, 0.4), r0, z);
    const auto gr = ImplicitSurface::reparametrized(sph, 0.4).gradient(r0);
    CHECK(std::abs(rp.d2_laplacian_only - rp.d2) * (gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]) > 0.1);
}

TEST_CASE("sphere boundary fit matches the prediction") {
    const ComplexEnergy z(0.0, 2.0);
    const auto p = boundary_prediction(ImplicitSurface::sphere(1.0), {0.0, 0.0, 1.0}, z);
    const auto f = nu_boundary_fit(Potential1D::zero(), 1.0, z, 0.005, 0.1, 14);
    CHECK(std::abs(f.coeffs[0] - p.c1) < 0.02);
    CHECK(std::abs(f.coeffs[1] - p.d2) < 0.02);
}

TEST_CASE("curved-wall conjecture") {
    const ComplexEnergy z(2.0, 1.0);
    const auto pl = ImplicitSurface::plane({0.0, 0.0, 1.0});
    CHECK(curved_green_conjecture(pl, {0.0, 0.0, 0.0}, z, 0.1, 0.2) == green3d_free_halfspace(z, 0.1, 0.2, 0.0));

    const auto h = conjecture_harness(z, {4.0, 8.0, 16.0}, {0.05, 0.1, 0.2}, 2.0);
    // the universal bracket carries the singular part, the remainder is O(tau tau')
    CHECK(h.difference_scale < 0.05 * h.bracket_scale);
    CHECK(h.residual < 0.01 * h.bracket_scale);
    const auto sph = ImplicitSurface::sphere(8.0);
    const cplx conj = curved_green_conjecture(sph, {0.0, 0.0, 8.0}, z, 0.1, 0.2);
    const cplx ball = ball_green(Potential1D::zero(), 8.0, z, 0.1, 0.2, 0.0).value;
    const cplx half = green3d_free_halfspace(z, 0.1, 0.2, 0.0);
    CHECK(std::abs(conj - ball) < 0.1 * std::abs(conj - half));
}
