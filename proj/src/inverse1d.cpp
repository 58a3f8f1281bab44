#include "greens/inverse1d.hpp"

#include <cmath>
#include <sstream>

#include "greens/direct1d.hpp"
#include "greens/errors.hpp"

namespace greens {

// ---------------------------------------------------------------------------
// Wall series

BoundarySeries series_coefficients(const std::vector<double>& u_taylor, const ComplexEnergy& z,
                                   cplx free_value, int N, int l) {
    if (N < 3) throw DomainError("series_coefficients: need N >= 3");
    if (l < 0) throw DomainError("series_coefficients: negative l");
    const double L = double(l) * (l + 1);
    BoundarySeries s;
    s.l = l;
    s.z = z;
    s.free_index = 2 * l + 2;
    s.free_value = free_value;
    s.u.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::size_t k = 0; k < s.u.size() && k < u_taylor.size(); ++k) s.u[k] = u_taylor[k];
    std::vector<cplx> w(s.u.size());
    w[0] = z.value() - s.u[0];
    for (std::size_t k = 1; k < w.size(); ++k) w[k] = -s.u[k];

    auto& c = s.c;
    c.assign(static_cast<std::size_t>(N) + 1, cplx{0.0, 0.0});
    c[1] = -1.0 / (2.0 * l + 1.0);
    auto sq = [&](int p) {  // [n^2]_p
        cplx v{0.0, 0.0};
        for (int i = 1; i < p; ++i) v += c[i] * c[p - i];
        return v;
    };
    for (int m = 1; m < N; ++m) {
        const int t = m + 1, sdeg = m + 2;
        cplx a{0.0, 0.0};
        for (int i = 2; i <= sdeg - 2; ++i) {
            const int j = sdeg - i;
            a += c[i] * c[j] * (3.0 * i * j - double(sdeg) * (sdeg - 1) + 4.0 * L);
        }
        cplx nw{0.0, 0.0};
        for (int p = 2; p <= m; ++p) nw += sq(p) * w[m - p];
        const cplx rest = a - 4.0 * nw;
        const double factor = 2.0 * (double(t) * (2 - t) + 4.0 * L);
        if (t == s.free_index) {
            c[t] = free_value;
            s.obstruction = rest;
        } else {
            c[t] = -rest / (factor * c[1]);
        }
    }
    return s;
}

BoundarySeries boundary_coeffs(const std::vector<double>& u_taylor, const ComplexEnergy& z, cplx c2, int N) {
    return series_coefficients(u_taylor, z, c2, N, 0);
}

cplx BoundarySeries::eval(double x) const {
    cplx s{0.0, 0.0};
    for (int k = degree(); k >= 1; --k) s = (s + c[k]) * x;
    return s;
}

cplx BoundarySeries::deriv(double x) const {
    cplx s{0.0, 0.0};
    for (int k = degree(); k >= 1; --k) s = s * x + double(k) * c[k];
    return s;
}

cplx BoundarySeries::deriv2(double x) const {
    cplx s{0.0, 0.0};
    for (int k = degree(); k >= 2; --k) s = s * x + double(k) * (k - 1) * c[k];
    return s;
}

cplx BoundarySeries::log_n(double x) const {
    // n = c1 x (1 + sum a_k x^k), a_k = c_{k+1}/c1; c1 < 0 gives the i*pi.
    cplx r{0.0, 0.0};
    for (int k = degree(); k >= 2; --k) r = (r + c[k] / c[1]) * x;
    return std::log(-c[1].real()) + std::log(x) + I * pi + std::log(1.0 + r);
}

cplx BoundarySeries::half_inverse_primitive(double x) const {
    const int N = degree();
    // b = 1 / (1 + a_1 x + a_2 x^2 + ...)
    std::vector<cplx> a(N, cplx{0.0, 0.0}), b(N, cplx{0.0, 0.0});
    for (int k = 1; k < N; ++k) a[k] = c[k + 1] / c[1];
    b[0] = 1.0;
    for (int k = 1; k < N; ++k) {
        cplx s{0.0, 0.0};
        for (int j = 1; j <= k; ++j) s += a[j] * b[k - j];
        b[k] = -s;
    }
    cplx s{0.0, 0.0};
    for (int k = N - 1; k >= 1; --k) s = (s + b[k] / double(k)) * x;
    return (std::log(x) + s) / (2.0 * c[1]);
}

cplx profile_residual(cplx n, cplx dn, cplx d2n, cplx z, double u) {
    return z - u + (1.0 - dn * dn + 2.0 * n * d2n) / (4.0 * n * n);
}

// ---------------------------------------------------------------------------
// Shooting

namespace {

using Sol = OdeSolution<4>;

// State [n, n', log n, primitive of 1/(2n)] in a coordinate t measured from
// a wall; the potential is read at pos(t).
Sol shoot(const BoundarySeries& s, std::function<double(double)> pot, cplx z, double t0, double t1,
          double tol) {
    const State<4> y0{s.eval(t0), s.deriv(t0), s.log_n(t0), s.half_inverse_primitive(t0)};
    auto rhs = [pot = std::move(pot), z](double t, const State<4>& y, State<4>& d) {
        const cplx n = y[0], dn = y[1];
        d[0] = dn;
        d[1] = (dn * dn - 1.0) / (2.0 * n) - 2.0 * n * (z - pot(t));
        d[2] = dn / n;
        d[3] = 0.5 / n;
    };
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-4 * t0;
    opt.h_init = 0.1 * t0;
    return integrate<4>(rhs, t0, y0, t1, opt);
}

struct Shot {
    Sol sol;
    State<4> end;
    bool ok = false;
};

Shot try_shoot(const std::vector<double>& taylor, const ComplexEnergy& z, cplx c2, int degree,
               const std::function<double(double)>& pot, double t0, double t1, double tol) {
    Shot r;
    try {
        const auto s = boundary_coeffs(taylor, z, c2, degree);
        r.sol = shoot(s, pot, z.value(), t0, t1, tol);
        r.end = r.sol.at(t1);
        r.ok = detail::all_finite<4>(r.end) && std::abs(r.end[0]) > 0.0;
    } catch (const NumericalError&) {
        r.ok = false;
    }
    return r;
}

double fd_step(cplx c) { return 1e-7 * (1.0 + std::abs(c)); }

}  // namespace

ProfileField solve_profile(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z,
                           const ProfileOptions& opt) {
    if (z.im() == 0.0) throw DomainError("solve_profile: z must lie off the real axis");
    if (!u.is_analytic()) throw DomainError("solve_profile: potential must be analytic at the walls");
    ProfileField pf;
    pf.u_ = u;
    pf.domain_ = domain;
    pf.z_ = z;
    const int deg = opt.seed_degree;
    cplx c2L = -I * z.sqrt(), c2R = c2L;

    if (domain.kind == DomainKind::interval) {
        const double X = domain.extent;
        pf.extent_ = X;
        pf.x_seed_ = opt.seed_rel * X;
        pf.x_match_ = 0.5 * X;
        const auto tL = u.taylor(0.0, deg + 1), tR = u.taylor_reflected(X, deg + 1);
        auto potL = [u](double x) { return u(x); };
        auto potR = [u, X](double y) { return u(X - y); };
        const double t0 = pf.x_seed_, t1 = pf.x_match_;

        auto mismatch = [](const Shot& l, const Shot& r) {
            return std::array<cplx, 2>{l.end[0] - r.end[0], l.end[1] + r.end[1]};
        };
        auto norm = [](const std::array<cplx, 2>& f, const Shot& l) {
            return std::abs(f[0]) / std::abs(l.end[0]) + std::abs(f[1]) / (1.0 + std::abs(l.end[1]));
        };
        Shot L = try_shoot(tL, z, c2L, deg, potL, t0, t1, opt.tol);
        Shot R = try_shoot(tR, z, c2R, deg, potR, t0, t1, opt.tol);
        if (!L.ok || !R.ok) throw ShootingDivergence("solve_profile", "initial shot failed");
        auto F = mismatch(L, R);
        double fnorm = norm(F, L);
        int it = 0;
        for (;; ++it) {
            if (it >= opt.max_newton) {
                std::ostringstream os;
                os << "Newton on c2 did not converge after " << it << " iterations (mismatch " << fnorm << ")";
                throw ShootingDivergence("solve_profile", os.str());
            }
            const double hL = fd_step(c2L), hR = fd_step(c2R);
            const Shot Lp = try_shoot(tL, z, c2L + hL, deg, potL, t0, t1, opt.tol);
            const Shot Rp = try_shoot(tR, z, c2R + hR, deg, potR, t0, t1, opt.tol);
            if (!Lp.ok || !Rp.ok) throw ShootingDivergence("solve_profile", "Jacobian shot failed");
            const cplx a = (Lp.end[0] - L.end[0]) / hL, b = -(Rp.end[0] - R.end[0]) / hR;
            const cplx c = (Lp.end[1] - L.end[1]) / hL, d = (Rp.end[1] - R.end[1]) / hR;
            const cplx det = a * d - b * c;
            if (std::abs(det) == 0.0) throw ShootingDivergence("solve_profile", "singular Jacobian");
            const cplx dL = -(d * F[0] - b * F[1]) / det, dR = -(-c * F[0] + a * F[1]) / det;
            double lambda = 1.0;
            bool accepted = false;
            for (int k = 0; k < 30; ++k, lambda *= 0.5) {
                Shot Ln = try_shoot(tL, z, c2L + lambda * dL, deg, potL, t0, t1, opt.tol);
                Shot Rn = try_shoot(tR, z, c2R + lambda * dR, deg, potR, t0, t1, opt.tol);
                if (!Ln.ok || !Rn.ok) continue;
                const auto Fn = mismatch(Ln, Rn);
                const double nn = norm(Fn, Ln);
                if (nn < fnorm || nn < 1e-13) {
                    c2L += lambda * dL;
                    c2R += lambda * dR;
                    L = std::move(Ln);
                    R = std::move(Rn);
                    F = Fn;
                    fnorm = nn;
                    accepted = true;
                    break;
                }
            }
            const bool small = std::abs(dL) <= opt.newton_tol * (1.0 + std::abs(c2L)) &&
                               std::abs(dR) <= opt.newton_tol * (1.0 + std::abs(c2R));
            if (small || (!accepted && fnorm < 1e-8)) break;
            if (!accepted) throw ShootingDivergence("solve_profile", "line search failed");
        }
        pf.iterations_ = it;
        pf.left_ = boundary_coeffs(tL, z, c2L, deg);
        pf.right_ = boundary_coeffs(tR, z, c2R, deg);
        pf.left_sol_ = std::move(L.sol);
        pf.right_sol_ = std::move(R.sol);
        const cplx dlog = L.end[2] - R.end[2];
        pf.log_offset_ = 2.0 * pi * I * std::round(dlog.imag() / (2.0 * pi));
        pf.q_offset_ = L.end[3] + R.end[3];
    } else if (domain.kind == DomainKind::half_line) {
        // extent capped at exp(2 Im k x) = e^6
        const double reach = std::min(opt.reach, 3.0 / z.sqrt().imag());
        pf.extent_ = reach;
        pf.x_seed_ = opt.seed_rel * std::min(reach, 1.0);
        pf.x_match_ = reach;
        // Log-derivative of the decaying solution, by Riccati from far out.
        const double xf = decay_point(u, z, pf.x_match_);
        const cplx zv = z.value();
        auto ric = [u, zv](double x, const State<1>& w, State<1>& d) { d[0] = u(x) - zv - w[0] * w[0]; };
        OdeOptions ro;
        ro.rtol = opt.tol;
        ro.atol = opt.tol * 1e-3;
        const auto wsol = integrate<1>(ric, xf, State<1>{I * sqrt_upper(zv - u(xf))}, pf.x_match_, ro);
        const cplx target = wsol.at(pf.x_match_)[0];

        const auto tL = u.taylor(0.0, deg + 1);
        auto potL = [u](double x) { return u(x); };
        const double t0 = pf.x_seed_, tm = pf.x_match_;
        auto f = [&](const Shot& s) { return (s.end[1] + 1.0) / (2.0 * s.end[0]) - target; };
        Shot L = try_shoot(tL, z, c2L, deg, potL, t0, tm, opt.tol);
        if (!L.ok) throw ShootingDivergence("solve_profile", "initial shot failed");
        cplx F = f(L);
        int it = 0;
        for (;; ++it) {
            if (it >= opt.max_newton)
                throw ShootingDivergence("solve_profile", "Newton on c2 did not converge");
            const double h = fd_step(c2L);
            const Shot Lp = try_shoot(tL, z, c2L + h, deg, potL, t0, tm, opt.tol);
            if (!Lp.ok) throw ShootingDivergence("solve_profile", "Jacobian shot failed");
            const cplx J = (f(Lp) - F) / h;
            const cplx step = -F / J;
            double lambda = 1.0;
            bool accepted = false;
            for (int k = 0; k < 30; ++k, lambda *= 0.5) {
                Shot Ln = try_shoot(tL, z, c2L + lambda * step, deg, potL, t0, tm, opt.tol);
                if (!Ln.ok) continue;
                const cplx Fn = f(Ln);
                if (std::abs(Fn) < std::abs(F) || std::abs(Fn) < 1e-14 * std::abs(target)) {
                    c2L += lambda * step;
                    L = std::move(Ln);
                    F = Fn;
                    accepted = true;
                    break;
                }
            }
            if (std::abs(step) <= opt.newton_tol * (1.0 + std::abs(c2L))) break;
            if (!accepted) {
                if (std::abs(F) < 1e-8 * (1.0 + std::abs(target))) break;
                throw ShootingDivergence("solve_profile", "line search failed");
            }
        }
        pf.iterations_ = it;
        pf.left_ = boundary_coeffs(tL, z, c2L, deg);
        pf.left_sol_ = std::move(L.sol);
    } else {
        throw DomainError("solve_profile: domain must be an interval or the half-line");
    }

    // Sampled profile, residual and node scan.
    const double X = pf.extent_;
    const int M = 201;
    double nmax = 0.0;
    for (int i = 0; i <= M; ++i) {
        const double x = X * i / M;
        pf.grid.push_back(x);
        pf.values.push_back(pf.n(x));
        nmax = std::max(nmax, std::abs(pf.values.back()));
    }
    for (int i = 1; i < M; ++i) {
        if (std::abs(pf.values[i]) < opt.node_threshold * nmax) {
            std::ostringstream os;
            os << "profile nearly vanishes at x = " << pf.grid[i];
            throw NodeEncountered("solve_profile", os.str());
        }
    }
    const double h = 2e-3 * X;
    for (int i = 0; i <= M; ++i) {
        const double x = pf.grid[i];
        if (x < 0.05 * X || x > 0.95 * X) continue;
        const cplx d2 =
            (-pf.dn(x + 2 * h) + 8.0 * pf.dn(x + h) - 8.0 * pf.dn(x - h) + pf.dn(x - 2 * h)) / (12.0 * h);
        const cplx r = profile_residual(pf.values[i], pf.dn(x), d2, z.value(), u(x));
        pf.residual = std::max(pf.residual, std::abs(r) / std::max(1.0, std::abs(z.value() - u(x))));
    }
    return pf;
}

ProfileField::Point ProfileField::at(double x) const {
    if (x < 0.0 || x > extent_ * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << "ProfileField: x = " << x << " outside [0, " << extent_ << "]";
        throw DomainError(os.str());
    }
    if (x == 0.0) return {0.0, left_.c[1], -INFINITY, -INFINITY};
    if (x <= x_seed_) return {left_.eval(x), left_.deriv(x), left_.log_n(x), left_.half_inverse_primitive(x)};
    if (x <= x_match_) {
        const auto s = left_sol_.at(x);
        return {s[0], s[1], s[2], s[3]};
    }
    const double y = extent_ - x;
    if (y == 0.0) return {0.0, -right_.c[1], INFINITY, INFINITY};
    if (y <= x_seed_)
        return {right_.eval(y), -right_.deriv(y), right_.log_n(y) + log_offset_,
                q_offset_ - right_.half_inverse_primitive(y)};
    const auto s = right_sol_.at(y);
    return {s[0], -s[1], s[2] + log_offset_, q_offset_ - s[3]};
}

cplx ProfileField::d2n(double x) const {
    if (x <= x_seed_) return left_.deriv2(x);
    if (domain_.kind == DomainKind::interval && extent_ - x <= x_seed_) return right_.deriv2(extent_ - x);
    const auto p = at(x);
    return (p.dn * p.dn - 1.0) / (2.0 * p.n) - 2.0 * p.n * (z_.value() - u_(x));
}

cplx offdiag_reconstruct(const ProfileField& profile, double x, double xp) {
    if (x == xp) return profile.n(x);
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    if (lo == 0.0) return 0.0;
    if (profile.domain().kind == DomainKind::interval && hi >= profile.extent()) return 0.0;
    const auto a = profile.at(lo), b = profile.at(hi);
    return std::exp(0.5 * (a.log_n + b.log_n) + (b.q - a.q));
}

cplx boundary_green_2pt(cplx c2, const ComplexEnergy& z, double x, double xp) {
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    return -lo + c2 * x * xp + z.value() / 6.0 * lo * (lo * lo + 3.0 * hi * hi);
}

}  // namespace greens
