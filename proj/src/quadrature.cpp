#include "greens/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "greens/errors.hpp"

namespace greens {

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

QuadResult gauss_kronrod15(const CFunc& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx rk = fc * wgk[7];
    cplx rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const cplx s = f(c - dx) + f(c + dx);
        rk += wgk[j] * s;
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    QuadResult r;
    r.value = rk * h;
    r.error = std::abs((rk - rg) * h);
    r.evaluations = 15;
    return r;
}

QuadResult integrate_adaptive(const CFunc& f, double a, double b, double abs_tol, double rel_tol,
                              const std::vector<double>& breakpoints, std::size_t max_panels) {
    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > std::min(a, b) && p < std::max(a, b)) edges.push_back(p);
    edges.push_back(b);
    if (b > a)
        std::sort(edges.begin() + 1, edges.end() - 1);
    else
        std::sort(edges.begin() + 1, edges.end() - 1, std::greater<>());

    std::priority_queue<Panel> heap;
    QuadResult total;
    cplx sum{0.0, 0.0};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto r = gauss_kronrod15(f, edges[i], edges[i + 1]);
        heap.push({edges[i], edges[i + 1], r.value, r.error});
        sum += r.value;
        err += r.error;
        total.evaluations += r.evaluations;
    }
    while (err > std::max(abs_tol, rel_tol * std::abs(sum))) {
        if (heap.size() >= max_panels) {
            total.converged = false;
            break;
        }
        const Panel p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        if (m == p.a || m == p.b) {
            total.converged = false;
            break;
        }
        heap.pop();
        const auto l = gauss_kronrod15(f, p.a, m);
        const auto r = gauss_kronrod15(f, m, p.b);
        total.evaluations += 30;
        heap.push({p.a, m, l.value, l.error});
        heap.push({m, p.b, r.value, r.error});
        sum += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
    }
    // Re-sum from the panels to drop accumulated cancellation.
    sum = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    total.value = sum;
    total.error = err;
    return total;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

std::pair<cplx, double> wynn_epsilon(const std::vector<cplx>& s) {
    const std::size_t n = s.size();
    if (n == 0) return {cplx{0.0, 0.0}, 0.0};
    if (n < 3) return {s.back(), n == 2 ? std::abs(s[1] - s[0]) : 0.0};
    // prev = column k-1, cur = column k; even columns are estimates.
    std::vector<cplx> prev(n + 1, cplx{0.0, 0.0});
    std::vector<cplx> cur(s.begin(), s.end());
    cplx best = s.back();
    double best_err = std::abs(s[n - 1] - s[n - 2]);
    for (std::size_t k = 1; cur.size() > 1; ++k) {
        std::vector<cplx> next(cur.size() - 1);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const cplx d = cur[i + 1] - cur[i];
            if (std::abs(d) == 0.0) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (!ok) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0 && cur.size() >= 2) {
            const cplx est = cur.back();
            const double e = std::abs(cur.back() - cur[cur.size() - 2]);
            if (std::isfinite(est.real()) && std::isfinite(est.imag()) && e < best_err) {
                best = est;
                best_err = e;
            }
        }
    }
    return {best, best_err};
}

QuadResult integrate_oscillatory_tail(const CFunc& f, double a, double period, double abs_tol,
                                      double rel_tol, int max_panels) {
    QuadResult out;
    std::vector<cplx> partial;
    cplx sum{0.0, 0.0};
    double quad_err = 0.0;
    cplx last_est{0.0, 0.0};
    int stable = 0;
    for (int k = 0; k < max_panels; ++k) {
        const double lo = a + k * period, hi = lo + period;
        const auto r = integrate_adaptive(f, lo, hi, 0.01 * abs_tol, 0.01 * rel_tol);
        out.evaluations += r.evaluations;
        quad_err += r.error;
        sum += r.value;
        partial.push_back(sum);
        if (partial.size() < 6) continue;
        const std::size_t m = std::min<std::size_t>(partial.size(), 40);
        std::vector<cplx> window(partial.end() - m, partial.end());
        const auto [est, err] = wynn_epsilon(window);
        const double tol = std::max(abs_tol, rel_tol * std::abs(est));
        const double tot = err + quad_err + std::abs(est - last_est);
        last_est = est;
        if (tot < tol || std::abs(r.value) < 1e-3 * tol) {
            if (++stable >= 2) {
                out.value = std::abs(r.value) < 1e-3 * tol && err > tol ? sum : est;
                out.error = std::min(tot, err + quad_err);
                return out;
            }
        } else {
            stable = 0;
        }
    }
    out.value = last_est;
    out.error = std::abs(partial.back() - last_est);
    out.converged = false;
    return out;
}

}  // namespace greens
