#include <cmath>
#include <random>

#include "doctest.h"
#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/inverse1d.hpp"

using namespace greens;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

using Poly = std::vector<cplx>;

Poly mul(const Poly& a, const Poly& b, std::size_t keep) {
    Poly r(keep, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size() && i + j < keep; ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly deriv(const Poly& a) {
    Poly r(a.size(), 0.0);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = double(i) * a[i];
    return r;
}

// Coefficient of x^1 in z - u + (1 - n'^2 + 2 n n'') / (4 n^2) for n = sum c_k x^k.
cplx order_one_residual(const Poly& n, const std::vector<double>& u, cplx z) {
    const std::size_t K = 12;
    Poly nn = n;
    nn.resize(K, 0.0);
    const Poly d1 = deriv(nn), d2 = deriv(d1);
    Poly num = mul(nn, d2, K);
    for (auto& v : num) v *= 2.0;
    const Poly dd = mul(d1, d1, K);
    for (std::size_t i = 0; i < K; ++i) num[i] -= dd[i];
    num[0] += 1.0;
    // n = x m(x); 4 n^2 = 4 x^2 m^2
    Poly m(nn.begin() + 1, nn.end());
    Poly den = mul(m, m, K);
    for (auto& v : den) v *= 4.0;
    // num / x^2 divided by den, as a Laurent series starting at x^{-2}.
    Poly q(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        cplx s = num[i];
        for (std::size_t j = 1; j <= i; ++j) s -= den[j] * q[i - j];
        q[i] = s / den[0];
    }
    // x^1 term of num/(x^2 den) is q[3].
    return -u[1] + q[3];
}

}  // namespace

TEST_CASE("wall series coefficients") {
    auto s = boundary_coeffs({0.0}, ComplexEnergy(3.0), cplx{0.7, -0.1}, 6);
    CHECK(s[1] == cplx{-1.0, 0.0});
    CHECK(std::abs(s[3] - 2.0) < 1e-14);
    auto s2 = boundary_coeffs({0.0, 5.0, -1.0}, ComplexEnergy(3.0, 2.0), cplx{0.1, 0.2}, 6);
    CHECK(std::abs(s2[3] - 2.0 * cplx{3.0, 2.0} / 3.0) < 1e-14);
    CHECK(s2[1] == cplx{-1.0, 0.0});

    // c4 by brute-force substitution of the degree-6 series
    const std::vector<double> u{0.0, 0.7, -0.2, 0.1};
    const cplx z{2.0, 1.0}, c2{0.4, -0.2};
    const auto b = boundary_coeffs(u, z, c2, 6);
    Poly n0{0.0, -1.0, c2, 2.0 * z / 3.0, 0.0, b[5], b[6]};
    Poly n1 = n0;
    n1[4] = 1.0;
    const cplx r0 = order_one_residual(n0, u, z), r1 = order_one_residual(n1, u, z);
    const cplx c4 = -r0 / (r1 - r0);
    CHECK(rel(b[4], c4) < 1e-12);
}

TEST_CASE("wall series residual order") {
    const std::vector<double> u{0.0, 0.7, -0.2, 0.1, 0.05, -0.03, 0.02, 0.01, -0.01, 0.005, 0.002};
    const cplx z{2.0, 1.0};
    for (int N = 4; N <= 10; ++N) {
        const auto s = boundary_coeffs(u, z, cplx{0.3, 0.1}, N);
        auto uval = [&](double x) {
            double v = 0;
            for (int k = (int)u.size() - 1; k >= 0; --k) v = v * x + u[k];
            return v;
        };
        auto raw = [&](double x) { return std::abs(profile_residual(s.eval(x), s.deriv(x), s.deriv2(x), z, uval(x))); };
        auto mult = [&](double x) {
            const cplx n = s.eval(x), d = s.deriv(x), d2 = s.deriv2(x);
            return std::abs(d * d - 2.0 * n * d2 - 1.0 - 4.0 * n * n * (z - uval(x)));
        };
        const double x1 = 0.08, x2 = 0.04;
        const double p_raw = std::log2(raw(x1) / raw(x2));
        const double p_mult = std::log2(mult(x1) / mult(x2));
        CHECK(p_mult > N - 0.5);
        CHECK(p_raw > N - 2 - 0.5);
    }
}

TEST_CASE("radial series coefficients") {
    const ComplexEnergy z(1.0, 2.0);
    for (int l = 0; l <= 3; ++l) {
        const auto s = series_coefficients({0.0}, z, 0.0, 2 * l + 4, l);
        CHECK(std::abs(s[1] + 1.0 / (2 * l + 1)) < 1e-15);
        const double d = (2.0 * l - 1) * (2 * l + 1) * (2 * l + 3);
        CHECK(std::abs(s[3] + 2.0 * z.value() / d) < 1e-14);
        if (l > 0) CHECK(std::abs(s[2]) < 1e-15);
        CHECK(std::abs(s.obstruction) < 1e-13);
    }
}

TEST_CASE("profile shooting: free cases") {
    const ComplexEnergy z(2.0, 1.0);
    const cplx k = z.sqrt();
    auto hl = solve_profile(Potential1D::zero(), DomainSpec::half_line(), z);
    CHECK(rel(hl.c2(), -I * k) < 1e-8);
    for (double x : {0.01, 0.3, 1.0, 2.5})
        CHECK(rel(hl.n(x), (1.0 - std::exp(2.0 * I * k * x)) / (2.0 * I * k)) < 1e-8);

    const double X = 1.3;
    auto box = solve_profile(Potential1D::zero(), DomainSpec::interval(X), z);
    CHECK(rel(box.c2(), k * std::cos(k * X) / std::sin(k * X)) < 1e-8);
    CHECK(rel(box.c2_right(), box.c2()) < 1e-8);
    CHECK(box.residual < 1e-7);
    for (double x : {0.2, 0.65, 1.1}) {
        const cplx exact = -std::sin(k * x) * std::sin(k * (X - x)) / (k * std::sin(k * X));
        CHECK(rel(box.n(x), exact) < 1e-9);
        // exact closed form in the inverse relation
        const cplx dn = -(std::sin(k * (X - 2 * x))) / std::sin(k * X);
        const cplx d2n = 2.0 * k * std::cos(k * (X - 2 * x)) / std::sin(k * X);
        CHECK(std::abs(profile_residual(exact, dn, d2n, z.value(), 0.0)) < 1e-10);
    }
}

TEST_CASE("inverse-direct equivalence") {
    const ComplexEnergy z(-1.0, 3.0);
    const auto u = Potential1D::harmonic(25.0, 0.5);
    auto pf = solve_profile(u, DomainSpec::interval(1.0), z);
    Green1D g(u, DomainSpec::interval(1.0), z);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double x = d(rng), xp = d(rng);
        CHECK(rel(offdiag_reconstruct(pf, x, xp), g(x, xp)) < 1e-7);
    }
    CHECK(offdiag_reconstruct(pf, 0.4, 0.4) == pf.n(0.4));
    CHECK(pf.dn(1e-6).real() == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("two-point wall expansion") {
    const ComplexEnergy z(2.0, 1.0);
    CHECK(boundary_green_2pt(0.0, ComplexEnergy(0.0), 0.3, 0.1) == cplx{-0.1, 0.0});
    const cplx c2{0.5, -0.3};
    const double t = 0.01;
    CHECK(std::abs(boundary_green_2pt(c2, z, t, t) - (-t + c2 * t * t + 2.0 * z.value() / 3.0 * t * t * t)) <
          1e-16);

    const auto u = Potential1D::linear(3.0);
    Green1D g(u, DomainSpec::interval(1.0), z);
    auto pf = solve_profile(u, DomainSpec::interval(1.0), z);
    const double e1 = std::abs(g(0.02, 0.02) - boundary_green_2pt(pf.c2(), z, 0.02, 0.02));
    const double e2 = std::abs(g(0.01, 0.01) - boundary_green_2pt(pf.c2(), z, 0.01, 0.01));
    CHECK(std::log2(e1 / e2) > 3.8);
}
