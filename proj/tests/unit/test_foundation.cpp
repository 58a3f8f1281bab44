#include <cmath>
#include <random>

#include "doctest.h"
#include "greens/complex.hpp"
#include "greens/errors.hpp"
#include "greens/fit.hpp"
#include "greens/ode.hpp"
#include "greens/potential.hpp"
#include "greens/quadrature.hpp"
#include "greens/special.hpp"

using namespace greens;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("sqrt_upper branch") {
    CHECK(std::abs(sqrt_upper(-1.0) - I) < 1e-15);
    CHECK(std::abs(sqrt_upper(cplx{0, 2}) - cplx{1, 1}) < 1e-15);
    CHECK(std::abs(sqrt_upper(4.0) - 2.0) < 1e-15);
    CHECK(sqrt_upper(0.0) == cplx{0.0, 0.0});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int i = 0; i < 200; ++i) {
        const cplx z{d(rng), d(rng)};
        const cplx w = sqrt_upper(z);
        CHECK(w.imag() >= 0.0);
        CHECK(std::abs(w * w - z) < 1e-14 * std::abs(z));
    }
    // Approaching the negative axis from above is continuous.
    CHECK(std::abs(sqrt_upper(cplx{-4.0, 1e-14}) - sqrt_upper(-4.0)) < 1e-12);
    ComplexEnergy z(2.0, 1.0);
    CHECK(std::abs(z.sqrt() * z.sqrt() - z.value()) < 1e-15);
}

TEST_CASE("bessel and legendre") {
    using namespace special;
    CHECK(bessel_j0(0.0) == doctest::Approx(1.0));
    CHECK(bessel_j0(3.7) == doctest::Approx(-0.39923020337119111533).epsilon(1e-12));
    CHECK(bessel_j1(3.7) == doctest::Approx(0.053833987745461790513).epsilon(1e-12));
    CHECK(bessel_j0(55.3) == doctest::Approx(-0.048163104799357224474).epsilon(1e-10));
    const double h = 1e-5;
    for (double x : {0.3, 2.0, 7.5})
        CHECK(std::abs((bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h) + bessel_j1(x)) < 1e-8);

    struct Ref {
        cplx w, v;
    };
    const Ref k0[] = {
        {0.1, 2.4270690247020165578},
        {1.0, 0.42102443824070833334},
        {2.5, 0.062347553200366186029},
        {10.0, 0.000017780062316167651811},
        {30.0, 2.1324774964630563712e-14},
        {{3, 4}, {-0.0072390512135701550129, 0.026510418350267677215}},
        {{1, -1}, {0.080197726946517818727, 0.35727745928533025061}},
        {{0.5, 8}, {-0.20738224100126032144, -0.16974198575752026583}},
        {{20, -15}, {-4.7613672250126485115e-10, 1.9522898314779549638e-10}},
        {{6, 13}, {0.00044524620979413866344, -0.00068606201341986398051}},
    };
    for (const auto& r : k0) CHECK(rel(bessel_k0(r.w), r.v) < 1e-10);
    CHECK(rel(bessel_i0(cplx{1, 2}), {0.18785372808246171619, 0.64616943515398071638}) < 1e-12);
    CHECK(rel(bessel_i0(cplx{30, 5}), {157514633799.89234784, -760094971403.42652436}) < 1e-10);
    CHECK(rel(bessel_i0(5.0), 27.239871823604446895) < 1e-13);
    CHECK_THROWS_AS(bessel_k0(0.0), DomainError);

    CHECK(legendre_p(3, 0.5) == doctest::Approx(-0.4375).epsilon(1e-15));
    CHECK_THROWS_AS(legendre_p(2, 1.5), DomainError);
    const auto p = legendre_p_all(30, 0.37);
    for (int l = 1; l < 30; ++l)
        CHECK(std::abs((l + 1) * p[l + 1] - (2 * l + 1) * 0.37 * p[l] + l * p[l - 1]) < 1e-12);
}

TEST_CASE("integrate_ode2") {
    auto s = integrate_ode2([](double) { return cplx{-1.0, 0.0}; }, 0.0, 1.0, 0.0, 2.0, 1e-11);
    CHECK(std::abs(s.y(pi / 2) - 1.0) < 1e-9);

    const cplx z{2.0, 1.0};
    const cplx k = sqrt_upper(z);
    auto s2 = integrate_ode2([z](double) { return -z; }, 0.0, 1.0, 0.0, 5.0, 1e-11);
    for (double x : {0.37, 1.9, 4.2, 5.0}) CHECK(rel(s2.y(x), std::sin(k * x) / k) < 1e-8);

    // Airy-type: fixed-step RK4 with Richardson extrapolation as the oracle.
    const cplx za{1.0, 0.5};
    auto q = [za](double x) { return x - za; };
    auto rk4 = [&](int n) {
        const double h = 3.0 / n;
        cplx y = 0.0, dy = 1.0;
        double x = 0.0;
        for (int i = 0; i < n; ++i) {
            auto f = [&](double xx, cplx a, cplx b) { return std::pair<cplx, cplx>{b, q(xx) * a}; };
            auto [k1y, k1d] = f(x, y, dy);
            auto [k2y, k2d] = f(x + h / 2, y + h / 2 * k1y, dy + h / 2 * k1d);
            auto [k3y, k3d] = f(x + h / 2, y + h / 2 * k2y, dy + h / 2 * k2d);
            auto [k4y, k4d] = f(x + h, y + h * k3y, dy + h * k3d);
            y += h / 6 * (k1y + 2. * k2y + 2. * k3y + k4y);
            dy += h / 6 * (k1d + 2. * k2d + 2. * k3d + k4d);
            x += h;
        }
        return y;
    };
    const cplx oracle = (16.0 * rk4(4000) - rk4(2000)) / 15.0;
    auto s3 = integrate_ode2(q, 0.0, 1.0, 0.0, 3.0, 1e-11);
    CHECK(rel(s3.y(3.0), oracle) < 1e-8);

    // Wronskian of two solutions is preserved.
    auto a = integrate_ode2(q, 0.0, 1.0, 0.0, 3.0, 1e-11);
    auto b = integrate_ode2(q, 1.0, 0.3, 0.0, 3.0, 1e-11);
    for (double x : {0.5, 1.5, 2.9}) {
        const cplx w = a.y(x) * b.dy(x) - a.dy(x) * b.y(x);
        CHECK(rel(w, -1.0) < 1e-8);
    }

    // A growing solution stays representable through the log scale.
    auto g = integrate_ode2([](double) { return cplx{400.0, 0.0}; }, 1.0, 20.0, 0.0, 30.0, 1e-10);
    const auto pt = g.at(30.0);
    CHECK(std::abs((std::log(pt.y) + pt.log_scale).real() - 600.0) < 1e-6);

    OdeOptions opt;
    opt.max_steps = 50;
    CHECK_THROWS_AS(integrate<1>([](double x, const State<1>&, State<1>& d) { d[0] = 1.0 / (1.0 - x); },
                                 0.0, State<1>{cplx{0.0, 0.0}}, 2.0, opt),
                    StepSizeUnderflow);
}

TEST_CASE("quadrature") {
    auto r = integrate_adaptive([](double x) { return cplx{std::exp(-x * x), std::sin(x)}; }, 0.0, 3.0,
                                1e-14, 1e-13);
    CHECK(std::abs(r.value.real() - 0.5 * std::sqrt(pi) * std::erf(3.0)) < 1e-13);
    CHECK(std::abs(r.value.imag() - (1.0 - std::cos(3.0))) < 1e-13);

    const auto [x, w] = gauss_legendre(20);
    double s = 0.0;
    for (int i = 0; i < 20; ++i) s += w[i] * std::pow(x[i], 38);
    CHECK(s == doctest::Approx(2.0 / 39.0).epsilon(1e-13));

    // int_0^inf J0(k) dk = 1
    auto t = integrate_oscillatory_tail([](double k) { return cplx{special::bessel_j0(k), 0.0}; }, 0.0, pi,
                                        1e-11, 1e-11);
    CHECK(t.converged);
    CHECK(std::abs(t.value - 1.0) < 1e-9);
}

TEST_CASE("fit_expansion") {
    std::vector<std::pair<double, cplx>> s;
    for (double xi : geometric_grid(1e-3, 1e-1, 20)) s.push_back({xi, -xi + 3 * xi * xi});
    auto f = fit_expansion(s, {basis::pow(1), basis::pow(2)});
    CHECK(std::abs(f.coeffs[0] + 1.0) < 1e-12);
    CHECK(std::abs(f.coeffs[1] - 3.0) < 1e-10);
    CHECK(f.residual < 1e-12);

    const cplx z{0.0, 2.0};
    const cplx xi0 = I / sqrt_upper(z);
    s.clear();
    for (double xi : geometric_grid(1e-3, 1e-1, 24))
        s.push_back({xi, -xi - xi * xi * std::log(xi / xi0)});
    auto g = fit_expansion(s, {basis::pow(1), basis::pow(2), basis::powlog(2)}, xi0);
    CHECK(std::abs(g.coeffs[0] + 1.0) < 1e-10);
    CHECK(std::abs(g.coeffs[1]) < 1e-8);
    CHECK(std::abs(g.coeffs[2] + 1.0) < 1e-9);
    CHECK(g.labels()[2] == "xi^2 ln(xi/xi0)");

    // Free half-line diagonal: (1 - exp(2ikx))/(2ik) = -x - ik x^2 + (2z/3) x^3 + ...
    const cplx k = sqrt_upper(cplx{2.0, 1.0});
    s.clear();
    for (double xi : geometric_grid(1e-3, 3e-2, 30))
        s.push_back({xi, (1.0 - std::exp(2.0 * I * k * xi)) / (2.0 * I * k)});
    auto h = fit_expansion(s, {basis::pow(1), basis::pow(2), basis::pow(3), basis::pow(4), basis::pow(5)});
    CHECK(std::abs(h.coeffs[0] + 1.0) < 1e-9);
    CHECK(std::abs(h.coeffs[1] + I * k) < 1e-6);
    CHECK(std::abs(h.coeffs[2] - 2.0 * k * k / 3.0) < 1e-4);

    // Order of samples does not matter.
    auto s_rev = s;
    std::reverse(s_rev.begin(), s_rev.end());
    auto h2 = fit_expansion(s_rev, h.basis);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(h.coeffs[i] - h2.coeffs[i]) < 1e-9 * std::abs(h.coeffs[i]));

    s.clear();
    for (double xi : geometric_grid(0.1, 0.1 * (1 + 1e-11), 10)) s.push_back({xi, xi * xi});
    CHECK_THROWS_AS(fit_expansion(s, {basis::pow(2), basis::powlog(2)}), RankDeficient);
}

TEST_CASE("potentials and gauge shift") {
    auto u = Potential1D::polynomial({1.0, 2.0, -3.0, 0.5});
    auto t = u.taylor(0.7, 5);
    // exact shifted coefficients
    CHECK(t[0] == doctest::Approx(1 + 2 * 0.7 - 3 * 0.49 + 0.5 * 0.343));
    CHECK(t[1] == doctest::Approx(2 - 6 * 0.7 + 1.5 * 0.49));
    CHECK(t[2] == doctest::Approx(-3 + 1.5 * 0.7));
    CHECK(t[3] == doctest::Approx(0.5));
    CHECK(t[4] == 0.0);

    auto g = Potential1D::gaussian(2.0, 0.3, 0.5);
    auto tg = g.taylor(0.0, 8);
    const double h = 1e-3;
    CHECK(tg[1] == doctest::Approx((g(h) - g(-h)) / (2 * h)).epsilon(1e-5));
    CHECK(tg[2] == doctest::Approx((g(h) - 2 * g(0) + g(-h)) / (2 * h * h)).epsilon(1e-5));

    auto b = Potential1D::bump(1.5, 0.4);
    auto tb = b.taylor(0.0, 6);
    CHECK(std::abs(tb[0]) < 1e-14);
    CHECK(tb[1] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::abs(tb[2]) < 1e-12);
    CHECK(tb[3] == doctest::Approx(-1.5 / 0.16).epsilon(1e-10));

    auto gs = gauge_shift(Potential1D::linear(1.0, 1.0), ComplexEnergy(5.0));
    CHECK(gs.z.value() == cplx{4.0, 0.0});
    CHECK(gs.u(0.0) == doctest::Approx(0.0));
    CHECK(gs.u(2.0) == doctest::Approx(2.0));
    auto gc = gauge_shift(Potential1D::constant(7.0), ComplexEnergy(7.0));
    CHECK(gc.z.value() == cplx{0.0, 0.0});
    CHECK(gc.u(3.0) == 0.0);

    auto sp = Potential1D::tabulated({0, 1, 2, 3, 4}, {0, 1, 4, 9, 16});
    CHECK(sp(2.0) == doctest::Approx(4.0));

    auto f = Field3D::gaussian(1.3, {0.1, -0.2, 0.3}, 0.8);
    const Vec3 r{0.2, 0.1, -0.1};
    const double eps = 1e-4;
    const double fd = (f({r[0] + eps, r[1], r[2]}) - f({r[0] - eps, r[1], r[2]})) / (2 * eps);
    CHECK(f.derivative(r, {1, 0, 0}) == doctest::Approx(fd).epsilon(1e-7));
    const double fd2 = (f({r[0], r[1] + eps, r[2] + eps}) - f({r[0], r[1] + eps, r[2] - eps}) -
                        f({r[0], r[1] - eps, r[2] + eps}) + f({r[0], r[1] - eps, r[2] - eps})) /
                       (4 * eps * eps);
    CHECK(f.derivative(r, {0, 1, 1}) == doctest::Approx(fd2).epsilon(1e-5));
}
