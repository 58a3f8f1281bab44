#include "greens/special.hpp"

#include <cmath>

#include "greens/errors.hpp"

namespace greens::special {

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

double bessel_j1(double x) {
    const double v = std::cyl_bessel_j(1.0, std::abs(x));
    return x < 0.0 ? -v : v;
}

namespace {

// sum_k (w^2/4)^k / (k!)^2
cplx i0_series(cplx w) {
    const cplx q = 0.25 * w * w;
    cplx term{1.0, 0.0};
    cplx sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel-type asymptotic series; `sign` = +1 for I0 (all terms positive),
// -1 for K0 (alternating). Stops at the smallest term.
cplx asymptotic_tail(cplx w, double sign) {
    cplx term{1.0, 0.0};
    cplx sum = term;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double a = double(2 * k - 1);
        term *= sign * a * a / (8.0 * k * w);
        const double mag = std::abs(term);
        if (mag > last) break;
        sum += term;
        last = mag;
        if (mag < 1e-17) break;
    }
    return sum;
}

cplx k0_series(cplx w) {
    const cplx q = 0.25 * w * w;
    cplx term{1.0, 0.0};
    cplx harmonic_sum{0.0, 0.0};
    double h = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k));
        h += 1.0 / k;
        const cplx add = term * h;
        harmonic_sum += add;
        if (std::abs(add) < 1e-17 * std::abs(harmonic_sum)) break;
    }
    return -(std::log(0.5 * w) + euler_gamma) * i0_series(w) + harmonic_sum;
}

// K0(w) = int_0^inf exp(-w cosh t) dt, trapezoid rule (spectrally accurate
// for this even analytic integrand). Needs Re(w) > 0.
cplx k0_integral(cplx w) {
    const double arg = std::abs(std::arg(w));
    const double strip = 0.5 * pi - arg;
    const double h = 2.0 * pi * strip / 45.0;
    const double t_max = std::acosh(std::max(2.0, 50.0 / w.real()));
    cplx sum = 0.5 * std::exp(-w);
    for (int j = 1;; ++j) {
        const double t = j * h;
        if (t > t_max) break;
        sum += std::exp(-w * std::cosh(t));
    }
    return h * sum;
}

}  // namespace

cplx bessel_i0(cplx w) {
    if (std::abs(w) <= 25.0) return i0_series(w);
    const cplx v = w.real() < 0.0 ? -w : w;
    return std::exp(v) / std::sqrt(2.0 * pi * v) * asymptotic_tail(v, 1.0);
}

cplx bessel_k0(cplx w) {
    if (w == cplx{0.0, 0.0}) throw DomainError("bessel_k0: argument is zero");
    if (w.real() <= 0.0) throw DomainError("bessel_k0: requires Re(w) > 0");
    const double r = std::abs(w);
    if (r <= 2.0) return k0_series(w);
    if (r > 17.0) return std::sqrt(pi / (2.0 * w)) * std::exp(-w) * asymptotic_tail(w, -1.0);
    // Series loses ~2|w|/ln(10) digits here; the integral needs a usable strip.
    if (std::abs(std::arg(w)) < 0.47 * pi) return k0_integral(w);
    return k0_series(w);
}

double bessel_k0(double x) {
    if (x <= 0.0) throw DomainError("bessel_k0: requires x > 0");
    return bessel_k0(cplx{x, 0.0}).real();
}

double legendre_p(int l, double x) {
    if (l < 0) throw DomainError("legendre_p: negative degree");
    if (std::abs(x) > 1.0) throw DomainError("legendre_p: |x| > 1");
    if (l == 0) return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < l; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

std::vector<double> legendre_p_all(int lmax, double x) {
    if (lmax < 0) throw DomainError("legendre_p_all: negative degree");
    if (std::abs(x) > 1.0) throw DomainError("legendre_p_all: |x| > 1");
    std::vector<double> p(static_cast<std::size_t>(lmax) + 1);
    p[0] = 1.0;
    if (lmax >= 1) p[1] = x;
    for (int k = 1; k < lmax; ++k)
        p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
    return p;
}

}  // namespace greens::special
