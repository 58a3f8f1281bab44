#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <sstream>
#include <vector>

#include "greens/complex.hpp"
#include "greens/errors.hpp"

namespace greens {

template <std::size_t N>
using State = std::array<cplx, N>;

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-14;
    double h_init = 0.0;         // 0: pick from |x1 - x0|
    double h_max = 0.0;          // 0: unbounded
    double h_min_rel = 1e-13;    // underflow threshold relative to max(|x|, span)
    std::size_t max_steps = 5'000'000;
    // Linear systems only: rescale the state when it grows or shrinks past
    // 1e+-50 and carry the factor in a complex log scale.
    bool renormalize = false;
};

namespace detail {

struct DopriTableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

/// One Dormand-Prince 5(4) step. `k1` must hold f(x, y). On return `out`
/// is the 5th-order solution, `err` the embedded error vector and `k7`
/// holds f(x + h, out).
template <std::size_t N, class F>
void dopri_step(const F& f, double x, const State<N>& y, const State<N>& k1, double h,
                State<N>& out, State<N>& err, State<N>& k7) {
    using T = DopriTableau;
    State<N> k2, k3, k4, k5, k6, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T::a21 * k1[i]);
    f(x + T::c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    f(x + T::c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    f(x + T::c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    f(x + T::c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                             T::a65 * k5[i]);
    f(x + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] + T::b5 * k5[i] +
                             T::b6 * k6[i]);
    f(x + h, out, k7);
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                      T::e6 * k6[i] + T::e7 * k7[i]);
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
    return std::all_of(y.begin(), y.end(),
                       [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

}  // namespace detail

/// Adaptive solution record. Nodes are the accepted mesh; values between
/// nodes are produced by one extra Dormand-Prince step from the preceding
/// node, which keeps interior evaluation within the step tolerance.
template <std::size_t N>
class OdeSolution {
public:
    using Rhs = std::function<void(double, const State<N>&, State<N>&)>;

    OdeSolution() = default;
    OdeSolution(Rhs f, std::vector<double> xs, std::vector<State<N>> ys,
                std::vector<cplx> log_scales)
        : f_(std::make_shared<Rhs>(std::move(f))),
          xs_(std::move(xs)),
          ys_(std::move(ys)),
          logs_(std::move(log_scales)) {}

    std::size_t size() const { return xs_.size(); }
    double x(std::size_t i) const { return xs_[i]; }
    const State<N>& y(std::size_t i) const { return ys_[i]; }
    cplx log_scale(std::size_t i) const { return logs_[i]; }
    double x_begin() const { return xs_.front(); }
    double x_end() const { return xs_.back(); }
    const std::vector<double>& mesh() const { return xs_; }

    bool contains(double x) const {
        const double lo = std::min(x_begin(), x_end()), hi = std::max(x_begin(), x_end());
        const double slack = 1e-12 * std::max(1.0, hi - lo);
        return x >= lo - slack && x <= hi + slack;
    }

    /// Scaled state at x; the true state is exp(*log_scale) * result.
    State<N> at(double x, cplx* log_scale = nullptr) const {
        if (!contains(x)) {
            std::ostringstream os;
            os << "evaluation point " << x << " outside [" << x_begin() << ", " << x_end() << "]";
            throw DomainError(os.str());
        }
        const bool forward = x_end() >= x_begin();
        std::size_t i;
        if (forward) {
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
        } else {
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x, std::greater<>());
            i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
        }
        if (i + 1 >= xs_.size()) i = xs_.size() - 1;
        if (log_scale) *log_scale = logs_[i];
        const double h = x - xs_[i];
        if (h == 0.0) return ys_[i];
        State<N> k1, out, err, k7;
        (*f_)(xs_[i], ys_[i], k1);
        detail::dopri_step<N>(*f_, xs_[i], ys_[i], k1, h, out, err, k7);
        return out;
    }

    /// Unscaled state at x (may overflow for renormalized solutions).
    State<N> value(double x) const {
        cplx s;
        State<N> y = at(x, &s);
        const cplx factor = std::exp(s);
        for (auto& v : y) v *= factor;
        return y;
    }

private:
    std::shared_ptr<const Rhs> f_;
    std::vector<double> xs_;
    std::vector<State<N>> ys_;
    std::vector<cplx> logs_;
};

/// Integrates y' = f(x, y) from x0 to x1 (either direction) with
/// Dormand-Prince 5(4) and mixed relative/absolute error control.
template <std::size_t N>
OdeSolution<N> integrate(typename OdeSolution<N>::Rhs f, double x0, const State<N>& y0, double x1,
                         const OdeOptions& opt = {}, cplx log_scale0 = {0.0, 0.0}) {
    std::vector<double> xs{x0};
    std::vector<State<N>> ys{y0};
    std::vector<cplx> logs{log_scale0};
    if (x1 == x0) return OdeSolution<N>(std::move(f), std::move(xs), std::move(ys), std::move(logs));

    const double span = std::abs(x1 - x0);
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double h = opt.h_init > 0.0 ? opt.h_init : 1e-3 * span;
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    h *= dir;

    double x = x0;
    State<N> y = y0, k1, out, err, k7;
    cplx log_scale = log_scale0;
    f(x, y, k1);
    std::size_t steps = 0;
    while (dir * (x1 - x) > 0.0) {
        if (++steps > opt.max_steps) {
            std::ostringstream os;
            os << "step budget exhausted at x=" << x;
            throw StepSizeUnderflow("integrate_ode", os.str());
        }
        const double h_floor = opt.h_min_rel * std::max({std::abs(x), span, 1e-300});
        if (std::abs(h) < h_floor) {
            std::ostringstream os;
            os << "step size underflow at x=" << x;
            throw StepSizeUnderflow("integrate_ode", os.str());
        }
        if (dir * (x + h - x1) > 0.0) h = x1 - x;
        detail::dopri_step<N>(f, x, y, k1, h, out, err, k7);
        double norm = 0.0;
        bool finite = detail::all_finite<N>(out) && detail::all_finite<N>(err);
        if (finite) {
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(out[i]));
                const double r = std::abs(err[i]) / sc;
                norm += r * r;
            }
            norm = std::sqrt(norm / N);
        }
        if (!finite || norm > 1.0) {
            const double fac = finite ? std::max(0.2, 0.9 * std::pow(norm, -0.2)) : 0.25;
            h *= fac;
            continue;
        }
        x = (dir * (x1 - (x + h)) <= 0.0) ? x1 : x + h;
        y = out;
        k1 = k7;
        if (opt.renormalize) {
            double m = 0.0;
            for (const auto& v : y) m = std::max(m, std::abs(v));
            if (m > 1e50 || (m > 0.0 && m < 1e-50)) {
                for (auto& v : y) v /= m;
                for (auto& v : k1) v /= m;
                log_scale += std::log(m);
            }
        }
        xs.push_back(x);
        ys.push_back(y);
        logs.push_back(log_scale);
        const double fac = norm > 0.0 ? std::min(5.0, 0.9 * std::pow(norm, -0.2)) : 5.0;
        h *= fac;
        if (opt.h_max > 0.0 && std::abs(h) > opt.h_max) h = dir * opt.h_max;
    }
    return OdeSolution<N>(std::move(f), std::move(xs), std::move(ys), std::move(logs));
}

/// Value, derivative and log scale of a second-order linear solution.
struct Ode2Point {
    cplx y;
    cplx dy;
    cplx log_scale;
};

/// psi'' = q(x) psi, integrated as a renormalized first-order system.
class Ode2Solution {
public:
    Ode2Solution() = default;
    explicit Ode2Solution(OdeSolution<2> sol) : sol_(std::move(sol)) {}

    Ode2Point at(double x) const {
        cplx s;
        const auto st = sol_.at(x, &s);
        return {st[0], st[1], s};
    }
    cplx y(double x) const {
        const auto p = at(x);
        return p.y * std::exp(p.log_scale);
    }
    cplx dy(double x) const {
        const auto p = at(x);
        return p.dy * std::exp(p.log_scale);
    }
    const OdeSolution<2>& raw() const { return sol_; }

private:
    OdeSolution<2> sol_;
};

Ode2Solution integrate_ode2(std::function<cplx(double)> q, cplx y0, cplx dy0, double x0, double x1,
                            double tol, cplx log_scale0 = {0.0, 0.0}, double h_max = 0.0);

}  // namespace greens
