#include "greens/stratified3d.hpp"

#include <cmath>
#include <sstream>

#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/special.hpp"

namespace greens {

cplx k_transform(const CFunc& f, double k_peak, double period, const StratifiedOptions& opt, const char* op) {
    const double K1 = 2.0 * k_peak + 2.0 * period;
    const auto head = integrate_adaptive(f, 0.0, K1, opt.abs_tol, opt.rel_tol, {k_peak, 1.5 * k_peak});
    const double scale = std::max(std::abs(head.value), opt.abs_tol);
    const auto tail = integrate_oscillatory_tail(f, K1, period, std::max(opt.abs_tol, opt.rel_tol * scale),
                                                 opt.rel_tol, opt.max_tail_panels);
    if (!head.converged || !tail.converged) {
        std::ostringstream os;
        os << "k-integral tail not converged (achieved bound " << tail.error + head.error << ")";
        throw TailNotConverged(op, os.str());
    }
    return head.value + tail.value;
}

double panel_period(double x, double xp, double rho) {
    if (rho > 0.0) return pi / rho;
    const double d = std::abs(x - xp);
    return d > 0.0 ? 2.0 / d : 1.0;
}

cplx green3d_free_halfspace(const ComplexEnergy& z, double x, double xp, double rho) {
    const double r1 = std::hypot(x - xp, rho), r2 = std::hypot(x + xp, rho);
    const cplx k = z.sqrt();
    if (r1 == 0.0) throw DomainError("green3d_free_halfspace: coincident points");
    return -(std::exp(I * k * r1) / r1 - std::exp(I * k * r2) / r2) / (4.0 * pi);
}

cplx green3d_stratified(const Potential1D& u, const ComplexEnergy& z, double x, double xp, double rho,
                        const StratifiedOptions& opt) {
    if (!(rho > 0.0)) throw DomainError("green3d_stratified: needs rho > 0 (use green3d_axis on the axis)");
    if (!(z.im() > 0.0)) throw DomainError("green3d_stratified: needs Im z > 0");
    if (x <= 0.0 || xp <= 0.0) return 0.0;
    const DomainSpec hl = DomainSpec::half_line();
    const cplx zv = z.value();
    auto f = [&](double k) {
        const cplx g = green1d_point(u, hl, ComplexEnergy(zv - k * k), x, xp, opt.ode_tol);
        return k * g * special::bessel_j0(k * rho) / (2.0 * pi);
    };
    return k_transform(f, std::max(z.sqrt().real(), 1.0), panel_period(x, xp, rho), opt, "green3d_stratified");
}

SplitRemainder split_remainder(const Potential1D& u, const ComplexEnergy& z, double x, double xp, double rho,
                               const StratifiedOptions& opt) {
    if (!(rho > 0.0)) throw DomainError("split_remainder: needs rho > 0");
    SplitRemainder r;
    r.free = green3d_free_halfspace(z, x, xp, rho);
    if (u.is_zero() || x <= 0.0 || xp <= 0.0) {
        r.delta = 0.0;
        r.total = r.free;
        return r;
    }
    const DomainSpec hl = DomainSpec::half_line();
    const cplx zv = z.value();
    auto f = [&](double k) {
        const ComplexEnergy s(zv - k * k);
        const cplx d = green1d_point(u, hl, s, x, xp, opt.ode_tol) - free_halfline_green(s, x, xp);
        return k * d * special::bessel_j0(k * rho) / (2.0 * pi);
    };
    r.delta = k_transform(f, std::max(z.sqrt().real(), 1.0), panel_period(x, xp, rho), opt, "split_remainder");
    r.total = r.free + r.delta;
    return r;
}

cplx axis_leading(double x, double xp) {
    const double lo = std::min(x, xp);
    return -lo / (2.0 * pi * std::abs(x - xp) * (x + xp));
}

cplx axis_subleading(const ComplexEnergy& z, double x, double xp) {
    return -z.value() * std::min(x, xp) / (4.0 * pi);
}

AxisValue green3d_axis(const Potential1D& u, const ComplexEnergy& z, double x, double xp,
                       const StratifiedOptions& opt) {
    if (x == xp) throw DomainError("green3d_axis: needs x != x'");
    if (x <= 0.0 || xp <= 0.0) return {0.0, 0.0, 0.0, 0.0};
    const DomainSpec hl = DomainSpec::half_line();
    AxisValue v;
    v.free_static = axis_leading(x, xp);
    if (!u.is_zero()) {
        auto f = [&](double k) {
            const ComplexEnergy s(-k * k);
            const cplx d = green1d_point(u, hl, s, x, xp, opt.ode_tol) - free_halfline_green(s, x, xp);
            return k * d / (2.0 * pi);
        };
        v.delta_static = k_transform(f, 1.0, panel_period(x, xp, 0.0), opt, "green3d_axis");
    }
    // s = z tau^2 removes the sqrt(s) endpoint behaviour.
    const cplx zv = z.value();
    const double tau_min = 1e-3;
    auto g1 = [&](double tau) {
        try {
            return green1d_point(u, hl, ComplexEnergy(zv * tau * tau), x, xp, opt.ode_tol);
        } catch (const NearEigenvalue& e) {
            throw ContourNearPole("green3d_axis", e.what());
        }
    };
    auto f = [&](double tau) { return g1(tau) * 2.0 * zv * tau / (4.0 * pi); };
    const auto r = integrate_adaptive(f, tau_min, 1.0, opt.abs_tol, opt.rel_tol);
    if (!r.converged) throw NonConvergence("green3d_axis", "energy contour quadrature did not converge");
    v.contour = r.value + g1(tau_min) * zv * tau_min * tau_min / (4.0 * pi);
    v.total = v.free_static + v.delta_static + v.contour;
    return v;
}

cplx nu_stratified(const Potential1D& u, const ComplexEnergy& z, double x, double tol) {
    return green1d_point(u, DomainSpec::half_line(), z, x, x, tol);
}

AxisFit fit_axis_universal(const Potential1D& u, const ComplexEnergy& z, double lo, double hi, int samples,
                           double ratio, const StratifiedOptions& opt) {
    std::vector<std::pair<double, cplx>> data;
    std::vector<std::pair<double, double>> rem;
    for (double x : geometric_grid(lo, hi, samples)) {
        const double xp = ratio * x;
        const cplx g = green3d_axis(u, z, x, xp, opt).total;
        data.push_back({x, g});
        rem.push_back({x, std::abs(g - axis_leading(x, xp) - axis_subleading(z, x, xp))});
    }
    AxisFit out;
    out.fit = fit_expansion(
        data, {basis::pow(-1), basis::pow(1), basis::powlog(2), basis::pow(2), basis::pow(3)});
    const double xl = std::min(1.0, ratio), xh = std::max(1.0, ratio);
    // leading: -x< / (2 pi (x> - x<)(x> + x<)) per unit 1/x
    const double lead_unit = -xl / (2.0 * pi * (xh - xl) * (xh + xl));
    const cplx sub_unit = -z.value() * xl / (4.0 * pi);
    out.leading = out.fit.coeffs[0] / lead_unit;
    out.subleading = out.fit.coeffs[1] / sub_unit;
    // least-squares slope of log|remainder| against log x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, r] : rem) {
        const double a = std::log(x), b = std::log(r);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    const double n = double(rem.size());
    out.remainder_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

}  // namespace greens
