#include "greens/radial3d.hpp"

#include <algorithm>
#include <boost/math/special_functions/polygamma.hpp>
#include <cmath>
#include <sstream>

#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/special.hpp"

namespace greens {

namespace {

struct LogDeriv {
    cplx w, v;
};

// psi = t^p sum a_j t^j solving psi'' = (s / t^2 + sum_m Q_m t^m) psi with
// a_0 = 1; dQ_0/dz = -1. Returns psi'/psi and its z-derivative.
LogDeriv frobenius(int p, double s, const std::vector<cplx>& Q, double t, int degree) {
    std::vector<cplx> a(degree + 1, 0.0), b(degree + 1, 0.0);
    a[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        const double D = double(j + p) * double(j + p - 1) - s;
        cplx sa = 0.0, sb = 0.0;
        for (int m = 0; m + 2 <= j && m < int(Q.size()); ++m) {
            sa += Q[m] * a[j - 2 - m];
            sb += Q[m] * b[j - 2 - m];
        }
        if (j >= 2) sb -= a[j - 2];
        a[j] = sa / D;
        b[j] = sb / D;
    }
    cplx S = 0.0, dS = 0.0, T = 0.0, dT = 0.0;
    for (int j = degree; j >= 0; --j) {
        S = S * t + a[j];
        T = T * t + b[j];
        if (j >= 1) {
            dS = dS * t + double(j) * a[j];
            dT = dT * t + double(j) * b[j];
        }
    }
    return {double(p) / t + dS / S, (dT * S - dS * T) / (S * S)};
}

}  // namespace

RadialChannel::RadialChannel(const Potential1D& u, double R, const ComplexEnergy& z, int l, double r_min,
                             double r_max, const RadialOptions& opt)
    : l_(l), R_(R), r_min_(r_min), eigen_threshold_(opt.eigen_threshold) {
    if (r_max < r_min) r_max = r_min;
    if (!(R > 0.0) || !(r_min > 0.0) || !(r_max < R))
        throw DomainError("RadialChannel: needs 0 < r_min <= r_max < R");
    if (l < 0) throw DomainError("RadialChannel: needs l >= 0");
    const double L2 = double(l) * double(l + 1);
    const cplx zv = z.value();
    auto rhs = [u, L2, zv](double r, const State<3>& y, State<3>& d) {
        const cplx q = L2 / (r * r) + u(r) - zv;
        d[0] = q - y[0] * y[0];
        d[1] = -1.0 - 2.0 * y[0] * y[1];
        d[2] = y[0];
    };
    OdeOptions o;
    o.rtol = opt.tol;
    o.atol = opt.tol * 1e-3;

    // left: Frobenius near the center, or WKB where the centrifugal barrier
    // has already damped the start-up error below e^-decay
    const double r_front = opt.seed_rel * std::min(r_min, R / double(l + 1));
    const double r_wkb = r_min * std::exp(-opt.decay / double(2 * l + 1));
    State<3> y0{};
    double r0 = r_front;
    bool wkb = false;
    if (r_wkb > r_front) {
        const double barrier = L2 / (r_wkb * r_wkb);
        const cplx q = barrier + u(r_wkb) - zv;
        if (std::abs(q - barrier) < 0.25 * barrier) {
            const double dq = -2.0 * L2 / (r_wkb * r_wkb * r_wkb) + u.derivative(r_wkb, 1);
            const cplx sq = std::sqrt(q);  // Re > 0: the growing branch
            y0[0] = sq - dq / (4.0 * q);
            y0[1] = -1.0 / (2.0 * sq) - dq / (4.0 * q * q);
            r0 = r_wkb;
            wkb = true;
        }
    }
    if (!wkb) {
        auto ut = u.taylor(0.0, opt.seed_degree);
        std::vector<cplx> Q(ut.begin(), ut.end());
        Q[0] -= zv;
        const auto s = frobenius(l + 1, L2, Q, r0, opt.seed_degree);
        y0[0] = s.w;
        y0[1] = s.v;
    }
    left_ = integrate<3>(rhs, r0, y0, r_max, o);

    // right: Frobenius in y = R - r with psi ~ y
    const double y_s = opt.seed_rel * std::min({R - r_min, R / double(l + 1), 1.0 / std::sqrt(std::abs(zv) + 1.0)});
    {
        auto ut = u.taylor_reflected(R, opt.seed_degree);
        std::vector<cplx> Q(ut.begin(), ut.end());
        Q[0] -= zv;
        // l(l+1)/(R - y)^2 = l(l+1)/R^2 sum (k+1) (y/R)^k
        double f = L2 / (R * R);
        for (std::size_t k = 0; k < Q.size(); ++k, f /= R) Q[k] += double(k + 1) * f;
        const auto s = frobenius(1, 0.0, Q, y_s, opt.seed_degree);
        State<3> yr{-s.w, -s.v, std::log(y_s)};
        right_ = integrate<3>(rhs, R - y_s, yr, r_min, o);
    }
}

State<3> RadialChannel::left(double r) const { return left_.at(r); }
State<3> RadialChannel::right(double r) const { return right_.at(r); }

cplx RadialChannel::w_left(double r) const { return left(r)[0]; }
cplx RadialChannel::w_right(double r) const { return right(r)[0]; }

cplx RadialChannel::n(double r) const {
    const cplx wl = w_left(r), wr = w_right(r);
    const cplx d = wr - wl;
    if (std::abs(d) < eigen_threshold_ * (std::abs(wr) + std::abs(wl))) {
        std::ostringstream os;
        os << "channel l=" << l_ << " near a Dirichlet eigenvalue";
        throw NearEigenvalue("green_radial_l", os.str());
    }
    return 1.0 / d;
}

cplx RadialChannel::dn(double r) const { return n(r) * (w_left(r) + w_right(r)); }

cplx RadialChannel::dz_n(double r) const {
    const auto L = left(r), Rr = right(r);
    const cplx nn = n(r);
    return -(Rr[1] - L[1]) * nn * nn;
}

cplx RadialChannel::green(double r, double rp) const {
    const double lo = std::min(r, rp), hi = std::max(r, rp);
    if (lo <= 0.0 || hi >= R_) return 0.0;
    const cplx p_lo = right(lo)[2], p_hi = right(hi)[2];
    return n(lo) * std::exp(p_hi - p_lo);
}

cplx green_radial_l(const Potential1D& u, double R, const ComplexEnergy& z, int l, double r, double rp,
                    const RadialOptions& opt) {
    if (std::min(r, rp) <= 0.0 || std::max(r, rp) >= R) return 0.0;
    return RadialChannel(u, R, z, l, std::min(r, rp), 0.0, opt).green(r, rp);
}

PartialWaveSum sum_partial_waves(const Potential1D& u, double R, const ComplexEnergy& z, double r, double rp,
                                 double omega, int L_max, const RadialOptions& opt) {
    if (!(r > 0.0 && rp > 0.0 && r < R && rp < R)) throw DomainError("sum_partial_waves: points must be interior");
    const double c = std::cos(omega);
    const double r_min = std::min(r, rp);
    const bool adaptive = L_max <= 0;
    const int cap = adaptive ? opt.max_l : L_max;
    constexpr int block = 16;
    PartialWaveSum out;
    std::vector<double> mags;
    double p_prev = 1.0, p = c;  // P_{l-1}, P_l
    cplx sum = 0.0;
    auto tail_of = [&](int L) {
        if (L + 1 < 2 * block) return std::numeric_limits<double>::infinity();
        double e1 = 0.0, e0 = 0.0;
        for (int i = L - block + 1; i <= L; ++i) e1 = std::max(e1, mags[i]);
        for (int i = L - 2 * block + 1; i <= L - block; ++i) e0 = std::max(e0, mags[i]);
        if (e1 == 0.0) return 0.0;
        if (!(e1 < e0)) return std::numeric_limits<double>::infinity();
        const double ratio = std::pow(e1 / e0, 1.0 / block);
        return e1 * ratio / (1.0 - ratio);
    };
    for (int l = 0; l <= cap; ++l) {
        double P;
        if (l == 0) {
            P = 1.0;
        } else if (l == 1) {
            P = c;
        } else {
            const double next = ((2.0 * l - 1.0) * c * p - (l - 1.0) * p_prev) / double(l);
            p_prev = p;
            p = next;
            P = p;
        }
        const cplx g = RadialChannel(u, R, z, l, r_min, 0.0, opt).green(r, rp);
        const cplx t = (2.0 * l + 1.0) / (4.0 * pi * r * rp) * P * g;
        sum += t;
        mags.push_back(std::abs(t));
        out.terms = l + 1;
        if (adaptive && l >= 2 * block && (l + 1) % block == 0) {
            const double tail = tail_of(l);
            if (tail < 1e-2 * opt.tail_rel * std::abs(sum)) break;
        }
    }
    out.value = sum;
    out.tail_estimate = tail_of(out.terms - 1);
    if (!(out.tail_estimate <= opt.tail_rel * std::abs(sum))) {
        std::ostringstream os;
        os << "partial-wave tail not converged after " << out.terms << " channels (estimated tail "
           << out.tail_estimate << ")";
        throw TailNotConverged("sum_partial_waves", os.str());
    }
    return out;
}

double ball_angle(double R, double x, double xp, double rho) {
    const double r = R - x, rp = R - xp;
    const double d2 = (x - xp) * (x - xp) + rho * rho;
    const double c = (r * r + rp * rp - d2) / (2.0 * r * rp);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

PartialWaveSum ball_green(const Potential1D& u, double R, const ComplexEnergy& z, double x, double xp, double rho,
                          const RadialOptions& opt) {
    return sum_partial_waves(u, R, z, R - x, R - xp, ball_angle(R, x, xp, rho), 0, opt);
}

cplx center_c3(const ComplexEnergy& z, int l) {
    return -2.0 * z.value() / (double(2 * l - 1) * double(2 * l + 1) * double(2 * l + 3));
}

CenterExpansion center_expansion(const Potential1D& u, double R, const ComplexEnergy& z, int l, int N,
                                 const RadialOptions& opt) {
    if (N < 3) throw DomainError("center_expansion: needs N >= 3");
    CenterExpansion out;
    out.l = l;
    const double lo = 0.01 * R, hi = 0.1 * R;
    RadialChannel ch(u, R, z, l, lo, hi, opt);
    std::vector<std::pair<double, cplx>> data;
    for (double r : geometric_grid(lo, hi, 4 * N)) data.push_back({r, ch.n(r)});
    std::vector<BasisTerm> basis;
    for (int k = 1; k <= N; ++k) basis.push_back(basis::pow(k));
    out.fit = fit_expansion(data, basis);
    out.fitted.assign(N + 1, 0.0);
    for (int k = 1; k <= N; ++k) out.fitted[k] = out.fit.coeffs[k - 1];
    const int free_index = 2 * l + 2;
    const cplx free_value = free_index <= N ? out.fitted[free_index] : cplx{0.0, 0.0};
    out.series = series_coefficients(u.taylor(0.0, N + 1), z, free_value, N, l);
    double worst = 0.0;
    const double L2 = double(l) * double(l + 1);
    for (const auto& [r, nr] : data) {
        (void)nr;
        const cplx n = out.series.eval(r), dn = out.series.deriv(r), d2n = out.series.deriv2(r);
        const cplx res = profile_residual(n, dn, d2n, z.value(), u(r) + L2 / (r * r));
        worst = std::max(worst, std::abs(res) * r * r);
    }
    out.relation_residual = worst;
    return out;
}

NuRadial nu_radial(const Potential1D& u, double R, const ComplexEnergy& z, double r, const RadialOptions& opt) {
    if (!(r > 0.0 && r < R)) throw DomainError("nu_radial: needs 0 < r < R");
    const double x = R - r;
    // wall image of channel l ~ exp(-2 (l + 1/2) x / r); the upper half of
    // the channels is image-free and feeds the tail fit
    const double kz = std::sqrt(std::abs(z.value()));
    const int L = std::min(opt.max_l, std::max({64, int(std::ceil(opt.decay * r / x)), int(std::ceil(8.0 * r * kz))}));
    std::vector<cplx> terms(L + 1);
    for (int l = 0; l <= L; ++l) {
        RadialChannel ch(u, R, z, l, r, 0.0, opt);
        terms[l] = (2.0 * l + 1.0) * ch.dz_n(r) / (r * r);
    }
    cplx sum = 0.0;
    for (int l = L; l >= 0; --l) sum += terms[l];

    // t(lambda) ~ a/lambda^2 + b/lambda^4 + c/lambda^6 + d/lambda^8
    std::vector<std::pair<double, cplx>> data;
    for (int l = L / 2; l <= L; ++l) data.push_back({l + 0.5, terms[l]});
    const auto fit = fit_expansion(data, {basis::pow(-2), basis::pow(-4), basis::pow(-6), basis::pow(-8)});
    const double s = L + 1.5;
    using boost::math::polygamma;
    const cplx t2 = fit.coeffs[0] * polygamma(1, s);
    const cplx t4 = fit.coeffs[1] * polygamma(3, s) / 6.0;
    const cplx t6 = fit.coeffs[2] * polygamma(5, s) / 120.0;
    const cplx t8 = fit.coeffs[3] * polygamma(7, s) / 5040.0;
    NuRadial out;
    out.value = sum + t2 + t4 + t6 + t8;
    out.tail_estimate = std::abs(t8) + fit.residual * double(L);
    out.channels = L + 1;
    return out;
}

ExpansionFit nu_boundary_fit(const Potential1D& u, double R, const ComplexEnergy& z, double lo, double hi,
                             int samples, const RadialOptions& opt) {
    std::vector<std::pair<double, cplx>> data;
    for (double x : geometric_grid(lo, hi, samples)) data.push_back({x, nu_radial(u, R, z, R - x, opt).value});
    const cplx x0 = I / z.sqrt();
    return fit_expansion(data,
                         {basis::pow(1), basis::powlog(2), basis::pow(2), basis::powlog(3), basis::pow(3),
                          basis::powlog(4), basis::pow(4)},
                         x0);
}

cplx free_halfline_moment(const ComplexEnergy& s, double x, double xp) {
    const cplx k = s.sqrt();
    const cplx ik = I * k;
    const cplx pre = 1.0 / (2.0 * ik);
    // G(x, y) = A e^{-iky} + B e^{iky}; terms kept as c exp(e + alpha y)
    struct Term {
        cplx c, e, alpha;
    };
    auto pieces = [&](double at, bool below) {
        // below: y < at, G = pre e^{ik at} (e^{-iky} - e^{iky})
        // above: y > at, G = pre (e^{-ik at} - e^{ik at}) e^{iky}
        std::vector<Term> t;
        if (below) {
            t.push_back({pre, ik * at, -ik});
            t.push_back({-pre, ik * at, ik});
        } else {
            t.push_back({pre, -ik * at, ik});
            t.push_back({-pre, ik * at, ik});
        }
        return t;
    };
    // int_p^q y exp(e + alpha y) dy; q < 0 means infinity
    auto moment = [](cplx e, cplx alpha, double p, double q) -> cplx {
        if (std::abs(alpha) < 1e-300) {
            if (q < 0.0) throw DomainError("free_halfline_moment: divergent moment");
            return std::exp(e) * (q * q - p * p) / 2.0;
        }
        auto prim = [&](double y) { return std::exp(e + alpha * y) * (y / alpha - 1.0 / (alpha * alpha)); };
        return (q < 0.0 ? cplx{0.0, 0.0} : prim(q)) - prim(p);
    };
    const double a = std::min(x, xp), b = std::max(x, xp);
    const double edges[4] = {0.0, a, b, -1.0};
    cplx total = 0.0;
    for (int seg = 0; seg < 3; ++seg) {
        const double p = edges[seg], q = edges[seg + 1];
        if (q >= 0.0 && q <= p) continue;
        const double mid = q < 0.0 ? p + 1.0 : 0.5 * (p + q);
        const auto g1 = pieces(x, mid < x);
        const auto g2 = pieces(xp, mid < xp);
        for (const auto& s1 : g1)
            for (const auto& s2 : g2) {
                const cplx alpha = s1.alpha + s2.alpha;
                // alpha = 0 pieces are exact cancellations at infinity
                if (q < 0.0 && std::abs(alpha) < 1e-300) continue;
                total += s1.c * s2.c * moment(s1.e + s2.e, alpha, p, q);
            }
    }
    return total;
}

CurvatureTerms curvature_correction(const ComplexEnergy& z, double x, double xp, double rho,
                                    const StratifiedOptions& opt) {
    if (x <= 0.0 || xp <= 0.0) return {};
    if (rho == 0.0 && x == xp) throw DomainError("curvature_correction: coincident points on the axis");
    const cplx zv = z.value();
    const double k_peak = std::max(z.sqrt().real(), 1.0);
    const double period = panel_period(x, xp, rho);
    CurvatureTerms t;
    auto g1d = [&](double k) { return free_halfline_green(zv - k * k, x, xp); };
    auto f1 = [&](double k) { return k * g1d(k) * special::bessel_j0(k * rho); };
    t.first = (x + xp) / (2.0 * pi) * k_transform(f1, k_peak, period, opt, "curvature_correction");
    if (rho > 0.0) {
        auto f2 = [&](double k) { return k * k * g1d(k) * special::bessel_j1(k * rho); };
        t.second = -rho * (x + xp) / (4.0 * pi) * k_transform(f2, k_peak, period, opt, "curvature_correction");
    }
    auto f3 = [&](double k) {
        return k * k * k * special::bessel_j0(k * rho) * free_halfline_moment(ComplexEnergy(zv - k * k), x, xp);
    };
    t.third = k_transform(f3, k_peak, period, opt, "curvature_correction") / pi;
    return t;
}

cplx curvature_offaxis_coefficient(const ComplexEnergy& z, double rho) {
    return z.value() / (4.0 * pi) * special::bessel_k0(-I * z.sqrt() * rho);
}

CurvatureFit curvature_offaxis_fit(const ComplexEnergy& z, double rho, double lo, double hi, int samples,
                                   const StratifiedOptions& opt) {
    std::vector<std::pair<double, cplx>> data;
    for (double x : geometric_grid(lo, hi, samples))
        data.push_back({x, curvature_correction(z, x, x, rho, opt).total() / (x * x)});
    CurvatureFit out;
    out.fit = fit_expansion(data, {basis::pow(0), basis::pow(1), basis::pow(2)});
    out.value = out.fit.coeffs[0];
    out.expected = curvature_offaxis_coefficient(z, rho);
    return out;
}

CurvatureAxisFit curvature_axis_fit(const ComplexEnergy& z, double ratio, double lo, double hi, int samples,
                                    const StratifiedOptions& opt) {
    std::vector<std::pair<double, cplx>> data;
    for (double x : geometric_grid(lo, hi, samples))
        data.push_back({x, curvature_correction(z, x, ratio * x, 0.0, opt).total()});
    const auto fit = fit_expansion(data, {basis::pow(0), basis::powlog(2), basis::pow(2), basis::powlog(3),
                                          basis::pow(3), basis::powlog(4), basis::pow(4)});
    CurvatureAxisFit out;
    out.constant = {fit.coeffs[0], ratio / (4.0 * pi * (1.0 + ratio) * (1.0 + ratio)), fit};
    out.log = {fit.coeffs[1], -ratio * z.value() / (4.0 * pi), fit};
    return out;
}

}  // namespace greens
