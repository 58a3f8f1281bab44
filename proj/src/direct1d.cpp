#include "greens/direct1d.hpp"

#include <lapacke.h>

#include <cmath>
#include <sstream>

#include "greens/errors.hpp"

namespace greens {

namespace {

constexpr double kDecayTarget = 27.6;  // e^{-27.6} ~ 1e-12

}  // namespace

double decay_point(const Potential1D& u, const ComplexEnergy& z, double reach) {
    double x = reach, acc = 0.0;
    const double cap = reach + 1e5;
    while (acc < kDecayTarget) {
        const cplx k = sqrt_upper(z.value() - u(x));
        const double dx = std::min(0.25, 0.25 / std::max(std::abs(k), 1e-12));
        const cplx k2 = sqrt_upper(z.value() - u(x + dx));
        acc += 0.5 * dx * (k.imag() + k2.imag());
        x += dx;
        if (x > cap) {
            std::ostringstream os;
            os << "right solution does not decay within " << cap - reach << " of x=" << reach;
            throw NonConvergence("homogeneous_pair", os.str());
        }
    }
    return x;
}

cplx HomogeneousPair::wronskian_at(double x) const {
    const auto l = left.at(x), r = right.at(x);
    return (l.y * r.dy - l.dy * r.y) * std::exp(l.log_scale + r.log_scale);
}

HomogeneousPair homogeneous_pair(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z,
                                 const Green1DOptions& opt) {
    if (domain.kind != DomainKind::interval && domain.kind != DomainKind::half_line)
        throw DomainError("homogeneous_pair: domain must be an interval or the half-line");
    const cplx zv = z.value();
    auto q = [u, zv](double x) { return cplx{u(x), 0.0} - zv; };

    HomogeneousPair p;
    double mid;
    if (domain.kind == DomainKind::interval) {
        p.x_end = domain.extent;
        p.right = integrate_ode2(q, 0.0, -1.0, p.x_end, 0.0, opt.tol);
        mid = 0.5 * p.x_end;
    } else {
        if (!(opt.reach > 0.0)) throw DomainError("homogeneous_pair: reach must be positive");
        p.x_end = decay_point(u, z, opt.reach);
        const cplx k = sqrt_upper(zv - u(p.x_end));
        // Seed e^{ik x} normalized to 1 at the seed point, phase carried in the log scale.
        p.right = integrate_ode2(q, 1.0, I * k, p.x_end, 0.0, opt.tol, I * k * p.x_end);
        mid = 0.5 * opt.reach;
    }
    p.left = integrate_ode2(q, 0.0, 1.0, 0.0, p.x_end, opt.tol);

    const auto l = p.left.at(mid), r = p.right.at(mid);
    p.w_scaled = l.y * r.dy - l.dy * r.y;
    p.w_log = l.log_scale + r.log_scale;
    const double scale = std::max(std::abs(l.y), std::abs(l.dy)) * std::max(std::abs(r.y), std::abs(r.dy));
    if (std::abs(p.w_scaled) < opt.eigen_threshold * scale) {
        std::ostringstream os;
        os << "Wronskian vanishes (|W|/scale = " << std::abs(p.w_scaled) / scale << ") at z = " << zv;
        throw NearEigenvalue("homogeneous_pair", os.str());
    }
    return p;
}

Green1D::Green1D(Potential1D u, DomainSpec domain, ComplexEnergy z, const Green1DOptions& opt)
    : u_(std::move(u)), domain_(domain), z_(z), pair_(homogeneous_pair(u_, domain_, z_, opt)) {}

double Green1D::reach() const { return pair_.x_end; }

cplx Green1D::operator()(double x, double xp) const {
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    if (lo < 0.0 || hi > pair_.x_end * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << "Green1D: point outside [0, " << pair_.x_end << "]";
        throw DomainError(os.str());
    }
    const auto l = pair_.left.at(lo);
    const auto r = pair_.right.at(std::min(hi, pair_.x_end));
    return l.y * r.y * std::exp(l.log_scale + r.log_scale - pair_.w_log) / pair_.w_scaled;
}

DiagonalJet Green1D::diagonal_jet(double x) const {
    const auto l = pair_.left.at(x), r = pair_.right.at(x);
    const cplx f = std::exp(l.log_scale + r.log_scale - pair_.w_log) / pair_.w_scaled;
    const cplx uz = u_(x) - z_.value();
    return {l.y * r.y * f, (l.dy * r.y + l.y * r.dy) * f, 2.0 * (uz * l.y * r.y + l.dy * r.dy) * f};
}

std::pair<cplx, cplx> Green1D::jump(double xp) const {
    const auto l = pair_.left.at(xp), r = pair_.right.at(xp);
    const cplx f = std::exp(l.log_scale + r.log_scale - pair_.w_log) / pair_.w_scaled;
    return {l.dy * r.y * f, l.y * r.dy * f};
}

cplx green_direct(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z, double x,
                  double xp, const Green1DOptions& opt) {
    Green1DOptions o = opt;
    if (domain.kind == DomainKind::half_line) o.reach = std::max({o.reach, x, xp});
    return Green1D(u, domain, z, o)(x, xp);
}

cplx green1d_point(const Potential1D& u, const DomainSpec& domain, const ComplexEnergy& z, double x,
                   double xp, double tol) {
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    if (lo < 0.0) throw DomainError("green1d_point: negative coordinate");
    if (lo == 0.0) return 0.0;
    const cplx zv = z.value();
    auto q = [u, zv](double s) { return cplx{u(s), 0.0} - zv; };
    Ode2Solution right;
    if (domain.kind == DomainKind::interval) {
        if (hi > domain.extent) throw DomainError("green1d_point: point outside the interval");
        if (hi == domain.extent) return 0.0;
        right = integrate_ode2(q, 0.0, -1.0, domain.extent, lo, tol);
    } else if (domain.kind == DomainKind::half_line) {
        const double xf = decay_point(u, z, hi);
        const cplx k = sqrt_upper(zv - u(xf));
        right = integrate_ode2(q, 1.0, I * k, xf, lo, tol, I * k * xf);
    } else {
        throw DomainError("green1d_point: domain must be an interval or the half-line");
    }
    const auto left = integrate_ode2(q, 0.0, 1.0, 0.0, lo, tol);
    const auto l = left.at(lo), rl = right.at(lo), rh = right.at(hi);
    const cplx w = l.y * rl.dy - l.dy * rl.y;
    const double scale = std::max(std::abs(l.y), std::abs(l.dy)) * std::max(std::abs(rl.y), std::abs(rl.dy));
    if (std::abs(w) < 1e-10 * scale) {
        std::ostringstream os;
        os << "Wronskian vanishes at z = " << zv;
        throw NearEigenvalue("green1d_point", os.str());
    }
    return l.y * rh.y * std::exp(rh.log_scale - rl.log_scale) / w;
}

cplx free_halfline_green(const ComplexEnergy& z, double x, double xp) {
    const cplx k = z.sqrt();
    if (k == cplx{0.0, 0.0}) return -std::min(x, xp);
    return (std::exp(I * k * std::abs(x - xp)) - std::exp(I * k * (x + xp))) / (2.0 * I * k);
}

cplx free_box_green(const ComplexEnergy& z, double X, double x, double xp) {
    const double lo = std::min(x, xp), hi = std::max(x, xp);
    const cplx k = z.sqrt();
    if (k == cplx{0.0, 0.0}) return -lo * (X - hi) / X;
    return -std::sin(k * lo) * std::sin(k * (X - hi)) / (k * std::sin(k * X));
}

// ---------------------------------------------------------------------------

SpectralOracle::SpectralOracle(const Potential1D& u, double X, int grid) : X_(X), grid_(grid) {
    if (!(X > 0.0) || grid < 4) throw DomainError("SpectralOracle: need X > 0 and grid >= 4");
    h_ = X / (grid - 1);
    const int n = grid - 2;
    lambda_.resize(n);
    std::vector<double> off(std::max(n - 1, 1));
    const double h2 = 1.0 / (h_ * h_);
    for (int j = 0; j < n; ++j) lambda_[j] = 2.0 * h2 + u((j + 1) * h_);
    for (int j = 0; j + 1 < n; ++j) off[j] = -h2;
    vec_.assign(static_cast<std::size_t>(n) * n, 0.0);
    const int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, lambda_.data(), off.data(), vec_.data(), n);
    if (info != 0) throw NonConvergence("spectral_oracle", "tridiagonal eigensolver failed");
}

double SpectralOracle::eigenvector(int k, int j) const {
    if (j <= 0 || j >= grid_ - 1) return 0.0;
    return vec_[static_cast<std::size_t>(k) * (grid_ - 2) + (j - 1)] / std::sqrt(h_);
}

int SpectralOracle::node_index(double x) const {
    const double t = x / h_;
    const double j = std::round(t);
    if (std::abs(t - j) > 1e-8 || j < 0 || j > grid_ - 1) {
        std::ostringstream os;
        os << "spectral_oracle: x = " << x << " is not a grid node (h = " << h_ << ")";
        throw DomainError(os.str());
    }
    return static_cast<int>(j);
}

SpectralOracle::Value SpectralOracle::green(const ComplexEnergy& z, double x, double xp, int K) const {
    if (K < 1 || K > size()) {
        std::ostringstream os;
        os << "spectral_oracle: K = " << K << " exceeds the " << size() << " available eigenpairs";
        throw DomainError(os.str());
    }
    const int i = node_index(x), j = node_index(xp);
    cplx sum{0.0, 0.0}, last{0.0, 0.0};
    for (int k = 0; k < K; ++k) {
        last = eigenvector(k, i) * eigenvector(k, j) / (z.value() - lambda_[k]);
        sum += last;
    }
    return {sum, std::abs(last) * K};
}

cplx spectral_oracle(const Potential1D& u, double X, const ComplexEnergy& z, double x, double xp, int K,
                     int grid) {
    return SpectralOracle(u, X, grid).green(z, x, xp, K).value;
}

cplx spectral_oracle_extrapolated(const Potential1D& u, double X, const ComplexEnergy& z, double x,
                                  double xp, int grid) {
    SpectralOracle coarse(u, X, grid), fine(u, X, 2 * grid - 1);
    const cplx gc = coarse.green(z, x, xp, coarse.size()).value;
    const cplx gf = fine.green(z, x, xp, fine.size()).value;
    return (4.0 * gf - gc) / 3.0;
}

}  // namespace greens
