#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "greens/errors.hpp"
#include "greens/gradient_series.hpp"
#include "greens/inverse1d.hpp"
#include "greens/quadrature.hpp"
#include "greens/radial3d.hpp"
#include "greens/stratified3d.hpp"

using namespace greens;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("alpha recursion") {
    const auto a = alpha_series(6);
    CHECK(a[0].terms.size() == 1);
    CHECK(a[0].terms[0].coeff == GaussRational(1));
    CHECK(a[1].is_zero());

    // alpha_3 = -Du - 2i k.grad u
    const auto& a3 = a[2];
    CHECK(a3.terms.size() == 6);
    for (const auto& t : a3.terms) {
        REQUIRE(t.factors.size() == 1);
        const auto& f = t.factors[0];
        if (t.k_degree() == 0) {
            CHECK(f[0] + f[1] + f[2] == 2);
            CHECK(std::max({f[0], f[1], f[2]}) == 2);
            CHECK(t.coeff == GaussRational(-1));
        } else {
            CHECK(t.k_degree() == 1);
            CHECK(f == t.kmono);
            CHECK(t.coeff == GaussRational(0, -2));
        }
    }
    for (const auto& s : a) CHECK(s.homogeneous());
    // k-degree has the parity of the derivative count, not of n - 1
    bool odd_k_in_a3 = false;
    for (const auto& s : a)
        for (const auto& t : s.terms) {
            CHECK((t.k_degree() - t.derivative_count()) % 2 == 0);
            if (s.n == 3 && t.k_degree() % 2) odd_k_in_a3 = true;
        }
    CHECK(odd_k_in_a3);
    CHECK(alpha_series(5, 1).back().homogeneous());
    CHECK_THROWS_AS(alpha_terms(0), DomainError);
}

TEST_CASE("radial k integrals against quadrature") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.3, 3.0);
    std::uniform_int_distribution<int> qd(0, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const cplx z{re(gen), im(gen)};
        const double u = re(gen);
        const int q = qd(gen);
        const int m = q + 1 + qd(gen) % 3;
        const cplx w = z - u;
        auto f = [&](double t) {
            // k = t / (1 - t) maps [0, 1) onto [0, inf)
            const double k = t / (1.0 - t);
            return std::pow(k, 2 * q) / std::pow(w - k * k, m) / ((1.0 - t) * (1.0 - t));
        };
        const cplx num = integrate_adaptive(f, 0.0, 1.0, 1e-15, 1e-13).value;
        CHECK(rel(radial_k_integral(q, m, w), num) < 1e-10);
    }
    CHECK_THROWS_AS(radial_k_integral(0, 2, cplx{1.0, 0.0}), BranchPointHit);
    CHECK_THROWS_AS(radial_k_integral(2, 2, cplx{1.0, 1.0}), DomainError);
}

TEST_CASE("k reduction") {
    const ComplexEnergy z(1.5, 2.0);
    const auto a = alpha_series(4);
    // Du = 1, grad u = 0 at the point
    const Vec3 p{0.2, -0.1, 0.3};
    auto d = UPointData::from_field(Field3D::quadratic({0.5, 0.0, 0.0}, p), p, 6);
    d.u = 0.4;
    const cplx w = z.value() - d.u;
    const cplx root = sqrt_upper(w);
    const cplx r5 = root * root * root * root * root;
    CHECK(rel(k_reduce_diagonal({a[0]}, d, z), 0.5 / root) < 1e-14);
    // alpha_3 and alpha_4 both carry Du at this power
    CHECK(rel(k_reduce_diagonal({a[2], a[3]}, d, z), -1.0 / 16.0 / r5) < 1e-13);
    // the odd k part of alpha_3 alone gives nothing
    AlphaSeries odd = a[2];
    std::erase_if(odd.terms, [](const DiffPolyTerm& t) { return t.k_degree() % 2 == 0; });
    for (auto& [k, v] : d.derivs) v = 0.7;
    CHECK(std::abs(k_reduce_diagonal({odd}, d, z)) == 0.0);
    CHECK_THROWS_AS(k_reduce_diagonal({a[0]}, d, ComplexEnergy(1.0, 0.0)), BranchPointHit);

    // exact reduction agrees with the floating one
    const auto a6 = alpha_series(6);
    const auto data = UPointData::from_field(Field3D::gaussian(0.8, {0.1, -0.2, 0.3}, 0.9), {0.2, 0.1, 0.0}, 10);
    CHECK(rel(reduce_series(a6).evaluate(data, z), k_reduce_diagonal(a6, data, z)) < 1e-12);
}

TEST_CASE("direct series coefficient table") {
    const auto s = direct_series(7);
    const auto tab = coefficient_table(s);
    CHECK(tab.lead == GaussRational(Rational(1, 2)));
    CHECK(tab.laplacian == GaussRational(Rational(-1, 16)));
    CHECK(tab.grad_sq == GaussRational(Rational(-5, 64)));
    CHECK(tab.bilaplacian == GaussRational(Rational(1, 64)));
    CHECK(tab.complete);
    for (const auto& t : s.terms) CHECK(t.two_s % 2 != 0);

    const ComplexEnergy z(0.5, 1.0);
    const auto c = nu_direct_series(Field3D::constant(0.3), z, {0.1, 0.2, 0.3});
    CHECK(std::abs(c.nu - (-I / (2.0 * std::sqrt(z.value() - 0.3)))) < 1e-15);
}

TEST_CASE("one-dimensional reduction") {
    // n = -i/(2 sqrt(z-u)) [1 + ...] inserted into the profile relation
    const auto s = direct_series_by_weight(4, 1);
    CHECK(!s.terms.empty());
    const auto left = verify_1d_reduction(4);
    CHECK(left.empty());
    for (const auto& t : left) MESSAGE(t);
}

TEST_CASE("direct series against the radial solve") {
    // Gaussian bump at the center of a large ball, evaluated off center
    const double a = 1.0, s = 1.5;
    const auto u1 = Potential1D::gaussian(a, 0.0, s);
    const auto u3 = Field3D::gaussian(a, {0.0, 0.0, 0.0}, s);
    const double R = 6.0, r = 0.8;
    std::vector<double> err;
    for (double im : {4.0, 16.0, 64.0}) {
        const ComplexEnergy z(0.0, im);
        const cplx ref = nu_radial(u1, R, z, r).value;
        const cplx ser = nu_direct_series(u3, z, {r, 0.0, 0.0}, 7).nu;
        const cplx lead = nu_direct_series(u3, z, {r, 0.0, 0.0}, 1).nu;
        err.push_back(std::abs(ser - ref) / std::abs(ref));
        CHECK(std::abs(ser - ref) < std::abs(lead - ref));
    }
    CHECK(err[1] < 0.25 * err[0]);
    CHECK(err[2] < 0.25 * err[1]);
}

TEST_CASE("inverse relation on a lattice") {
    const ComplexEnergy z(1.0, 2.0);
    SUBCASE("constant nu") {
        const cplx c{0.3, -0.4};
        const auto f = NuField3D::sample([&](const Vec3&) { return c; }, {0, 0, 0}, 0.1, {5, 5, 5});
        const auto t = inverse_terms(f, 2, 2, 2);
        CHECK(rel(t.rhs(), -1.0 / (4.0 * c * c)) < 1e-12);
    }
    SUBCASE("stratified profile") {
        const auto u = Potential1D::bump(2.0, 0.5);
        const auto pf = solve_profile(u, DomainSpec::half_line(), z);
        const double h = 0.01;
        const auto f = NuField3D::sample([&](const Vec3& p) { return pf.n(p[0]); }, {0.5, 0.0, 0.0}, h, {11, 5, 5});
        const auto res = inverse_rhs(f, Field3D::stratified(u, 0), z);
        double scale = 0.0;
        for (int i = 2; i < 9; ++i) {
            const auto t = inverse_terms(f, i, 2, 2);
            scale = std::max(scale, std::abs(t.lead));
        }
        CHECK(res.max_phi1 <= 1e-8 * scale);
        CHECK(res.max_phi2 <= 1e-8 * scale);
        CHECK(res.max_residual < 1e-6);
        CHECK(res.masked_count == 0);
    }
    SUBCASE("truncation order study") {
        const auto u = Field3D::gaussian(1.0, {0.0, 0.0, 0.0}, 2.0);
        const ComplexEnergy zz(0.0, 10.0);
        std::vector<double> r;
        for (int order : {1, 5, 7}) {
            const auto f = NuField3D::sample([&](const Vec3& p) { return nu_direct_series(u, zz, p, order).nu; },
                                             {0.6, 0.3, -0.2}, 0.05, {5, 5, 5});
            r.push_back(std::abs(inverse_rhs(f, u, zz).residual[0]));
        }
        CHECK(r[1] < r[0]);
        CHECK(r[2] < r[1]);
    }
    CHECK_THROWS_AS(NuField3D({0, 0, 0}, 0.1, {2, 2, 2}, {}), DomainError);
}
