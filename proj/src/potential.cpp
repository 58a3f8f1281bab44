#include "greens/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "greens/errors.hpp"

namespace greens {

struct Potential1D::Spline {
    std::vector<double> x, y, m;  // m: second derivatives

    std::size_t segment(double t) const {
        auto it = std::upper_bound(x.begin(), x.end(), t);
        std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
        return std::min(i, x.size() - 2);
    }
    // Cubic on segment i written as sum c_k (t - x_ref)^k.
    std::array<double, 4> local(double x_ref) const {
        const std::size_t i = segment(x_ref);
        const double h = x[i + 1] - x[i];
        const double d = x_ref - x[i];
        const double b = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        const double c = m[i] / 2.0, e = (m[i + 1] - m[i]) / (6.0 * h);
        return {y[i] + d * (b + d * (c + d * e)), b + d * (2.0 * c + 3.0 * d * e), c + 3.0 * d * e,
                e};
    }
};

Potential1D::Potential1D() = default;

Potential1D Potential1D::zero() { return {}; }

Potential1D Potential1D::constant(double c) {
    Potential1D p;
    if (c == 0.0) return p;
    p.kind_ = PotentialKind::constant;
    p.poly_ = {c};
    std::ostringstream os;
    os << "constant(" << c << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::polynomial(std::vector<double> a) {
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    if (a.empty()) return zero();
    Potential1D p;
    p.kind_ = PotentialKind::polynomial;
    p.poly_ = std::move(a);
    std::ostringstream os;
    os << "polynomial(";
    for (std::size_t i = 0; i < p.poly_.size(); ++i) os << (i ? "," : "") << p.poly_[i];
    os << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::linear(double slope, double offset) {
    auto p = polynomial({offset, slope});
    std::ostringstream os;
    os << "linear(" << slope << "," << offset << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::harmonic(double k, double center) {
    auto p = polynomial({k * center * center, -2.0 * k * center, k});
    p.kind_ = PotentialKind::harmonic;
    std::ostringstream os;
    os << "harmonic(" << k << "," << center << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::gaussian(double a, double center, double width) {
    if (!(width > 0.0)) throw DomainError("gaussian potential: width must be positive");
    Potential1D p;
    p.kind_ = PotentialKind::gaussian;
    p.f_ = [a, center, width](cplx x) {
        const cplx s = (x - center) / width;
        return a * std::exp(-s * s);
    };
    p.radius_ = width;
    std::ostringstream os;
    os << "gaussian(" << a << "," << center << "," << width << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::bump(double a, double width) {
    if (!(width > 0.0)) throw DomainError("bump potential: width must be positive");
    Potential1D p;
    p.kind_ = PotentialKind::bump;
    p.f_ = [a, width](cplx x) {
        const cplx s = x / width;
        return a * x * std::exp(-s * s);
    };
    p.radius_ = width;
    std::ostringstream os;
    os << "bump(" << a << "," << width << ")";
    p.name_ = os.str();
    return p;
}

Potential1D Potential1D::analytic(std::function<cplx(cplx)> f, std::string name, double radius) {
    if (!(radius > 0.0)) throw DomainError("analytic potential: radius must be positive");
    Potential1D p;
    p.kind_ = PotentialKind::analytic;
    p.f_ = std::move(f);
    p.radius_ = radius;
    p.name_ = std::move(name);
    return p;
}

Potential1D Potential1D::tabulated(std::vector<double> xs, std::vector<double> ys) {
    const std::size_t n = xs.size();
    if (n < 3 || ys.size() != n) throw DomainError("tabulated potential: need >= 3 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1])) throw DomainError("tabulated potential: abscissae must increase");
    auto s = std::make_shared<Spline>();
    s->x = std::move(xs);
    s->y = std::move(ys);
    s->m.assign(n, 0.0);
    // Thomas algorithm for the natural spline.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = s->x[i] - s->x[i - 1], h1 = s->x[i + 1] - s->x[i];
        const double rhs = 6.0 * ((s->y[i + 1] - s->y[i]) / h1 - (s->y[i] - s->y[i - 1]) / h0);
        const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
        c[i] = h1 / diag;
        d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for (std::size_t i = n - 2; i >= 1; --i) s->m[i] = d[i] - c[i] * s->m[i + 1];
    Potential1D p;
    p.kind_ = PotentialKind::tabulated;
    p.spline_ = std::move(s);
    p.name_ = "tabulated";
    return p;
}

double Potential1D::operator()(double x) const {
    switch (kind_) {
        case PotentialKind::zero:
            return offset_;
        case PotentialKind::tabulated:
            return spline_->local(x)[0] + offset_;
        default:
            return at(cplx{x, 0.0}).real();
    }
}

cplx Potential1D::at(cplx x) const {
    switch (kind_) {
        case PotentialKind::zero:
            return offset_;
        case PotentialKind::constant:
        case PotentialKind::polynomial:
        case PotentialKind::harmonic: {
            cplx s{0.0, 0.0};
            for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) s = s * x + *it;
            return s + offset_;
        }
        case PotentialKind::tabulated:
            if (x.imag() != 0.0)
                throw DomainError("tabulated potential cannot be continued off the real axis");
            return spline_->local(x.real())[0] + offset_;
        default:
            return f_(x) + offset_;
    }
}

std::vector<double> Potential1D::taylor(double x_ref, int n) const {
    if (n < 0) throw DomainError("taylor: negative order");
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return out;
    switch (kind_) {
        case PotentialKind::zero:
            out[0] = offset_;
            return out;
        case PotentialKind::constant:
        case PotentialKind::polynomial:
        case PotentialKind::harmonic: {
            // Repeated synthetic division gives the shifted coefficients exactly.
            std::vector<double> a = poly_;
            for (int k = 0; k < n && !a.empty(); ++k) {
                double r = 0.0;
                std::vector<double> q(a.size() > 1 ? a.size() - 1 : 0);
                for (std::size_t i = a.size(); i-- > 0;) {
                    r = r * x_ref + a[i];
                    if (i > 0) q[i - 1] = r;
                }
                out[k] = r;
                a = std::move(q);
            }
            out[0] += offset_;
            return out;
        }
        case PotentialKind::tabulated: {
            const auto c = spline_->local(x_ref);
            for (int k = 0; k < std::min(n, 4); ++k) out[k] = c[k];
            out[0] += offset_;
            return out;
        }
        default: {
            const int M = std::max(64, 2 * n + 16);
            const double rho = radius_;
            for (int k = 0; k < n; ++k) {
                cplx s{0.0, 0.0};
                for (int j = 0; j < M; ++j) {
                    const double th = 2.0 * pi * j / M;
                    s += f_(x_ref + rho * std::polar(1.0, th)) * std::polar(1.0, -k * th);
                }
                out[k] = s.real() / (M * std::pow(rho, k));
            }
            out[0] += offset_;
            return out;
        }
    }
}

std::vector<double> Potential1D::taylor_reflected(double x_ref, int n) const {
    auto t = taylor(x_ref, n);
    for (std::size_t k = 1; k < t.size(); k += 2) t[k] = -t[k];
    return t;
}

double Potential1D::derivative(double x, int k) const {
    const auto t = taylor(x, k + 1);
    return t[k] * std::tgamma(k + 1.0);
}

Potential1D Potential1D::shifted(double c) const {
    Potential1D p = *this;
    p.offset_ += c;
    if (p.kind_ == PotentialKind::zero && p.offset_ != 0.0) {
        p = constant(p.offset_);
    } else if (c != 0.0) {
        std::ostringstream os;
        os << name_ << (c >= 0 ? "+" : "") << c;
        p.name_ = os.str();
    }
    return p;
}

GaugeShifted gauge_shift(const Potential1D& u, const ComplexEnergy& z, double x_ref) {
    const double u0 = u(x_ref);
    return {u.shifted(-u0), ComplexEnergy(z.value() - u0), u0};
}

// ---------------------------------------------------------------------------

Field3D Field3D::zero() { return {}; }

Field3D Field3D::constant(double c) {
    Field3D f;
    f.kind_ = Kind::constant;
    f.a_ = c;
    f.name_ = "constant";
    return f;
}

Field3D Field3D::quadratic(Vec3 k, Vec3 center) {
    Field3D f;
    f.kind_ = Kind::quadratic;
    f.k_ = k;
    f.c_ = center;
    f.name_ = "quadratic";
    return f;
}

Field3D Field3D::gaussian(double a, Vec3 center, double s) {
    if (!(s > 0.0)) throw DomainError("gaussian field: width must be positive");
    Field3D f;
    f.kind_ = Kind::gaussian;
    f.a_ = a;
    f.c_ = center;
    f.s_ = s;
    f.name_ = "gaussian";
    return f;
}

Field3D Field3D::stratified(Potential1D u, int axis) {
    if (axis < 0 || axis > 2) throw DomainError("stratified field: axis must be 0, 1 or 2");
    Field3D f;
    f.kind_ = Kind::stratified;
    f.axis_ = axis;
    f.name_ = "stratified:" + u.name();
    f.u_ = std::make_shared<const Potential1D>(std::move(u));
    return f;
}

Field3D Field3D::radial(Potential1D u, Vec3 center) {
    Field3D f;
    f.kind_ = Kind::radial;
    f.c_ = center;
    f.name_ = "radial:" + u.name();
    f.u_ = std::make_shared<const Potential1D>(std::move(u));
    return f;
}

double Field3D::operator()(const Vec3& r) const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return a_;
        case Kind::quadratic: {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) s += k_[i] * (r[i] - c_[i]) * (r[i] - c_[i]);
            return s;
        }
        case Kind::gaussian: {
            double q = 0.0;
            for (int i = 0; i < 3; ++i) q += (r[i] - c_[i]) * (r[i] - c_[i]);
            return a_ * std::exp(-q / (s_ * s_));
        }
        case Kind::stratified:
            return (*u_)(r[axis_]);
        case Kind::radial: {
            double q = 0.0;
            for (int i = 0; i < 3; ++i) q += (r[i] - c_[i]) * (r[i] - c_[i]);
            return (*u_)(std::sqrt(q));
        }
    }
    return 0.0;
}

namespace {

// d^n/ds^n exp(-s^2) = (-1)^n H_n(s) exp(-s^2)
double hermite_h(int n, double s) {
    double h0 = 1.0, h1 = 2.0 * s;
    if (n == 0) return h0;
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * s * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

}  // namespace

double Field3D::derivative(const Vec3& r, const MultiIndex& alpha) const {
    const int order = alpha[0] + alpha[1] + alpha[2];
    if (order == 0) return (*this)(r);
    switch (kind_) {
        case Kind::zero:
        case Kind::constant:
            return 0.0;
        case Kind::quadratic: {
            if (order > 2) return 0.0;
            for (int i = 0; i < 3; ++i) {
                if (alpha[i] == order) return order == 1 ? 2.0 * k_[i] * (r[i] - c_[i]) : 2.0 * k_[i];
            }
            return 0.0;
        }
        case Kind::gaussian: {
            double v = a_;
            for (int i = 0; i < 3; ++i) {
                const double s = (r[i] - c_[i]) / s_;
                const double sign = alpha[i] % 2 ? -1.0 : 1.0;
                v *= sign * hermite_h(alpha[i], s) * std::pow(s_, -alpha[i]) * std::exp(-s * s);
            }
            return v;
        }
        case Kind::stratified:
            if (alpha[axis_] != order) return 0.0;
            return u_->derivative(r[axis_], order);
        case Kind::radial:
            break;
    }
    // Tensor-product central differences.
    const double h = std::pow(2.2e-16, 1.0 / (order + 2)) * std::max(1.0, 0.1);
    double sum = 0.0;
    std::array<std::vector<std::pair<int, double>>, 3> st;
    for (int i = 0; i < 3; ++i) {
        const int n = alpha[i];
        for (int j = 0; j <= n; ++j) {
            const double binom = std::tgamma(n + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(n - j + 1.0));
            st[i].push_back({n - 2 * j, (j % 2 ? -1.0 : 1.0) * binom});
        }
    }
    for (const auto& a : st[0])
        for (const auto& b : st[1])
            for (const auto& c : st[2]) {
                Vec3 p = {r[0] + 0.5 * a.first * h, r[1] + 0.5 * b.first * h, r[2] + 0.5 * c.first * h};
                sum += a.second * b.second * c.second * (*this)(p);
            }
    return sum / std::pow(h, order);
}

// ---------------------------------------------------------------------------

DomainSpec DomainSpec::interval(double X) {
    if (!(X > 0.0)) throw DomainError("interval: X must be positive");
    return {DomainKind::interval, X};
}
DomainSpec DomainSpec::half_line() { return {DomainKind::half_line, 0.0}; }
DomainSpec DomainSpec::ball(double R) {
    if (!(R > 0.0)) throw DomainError("ball: R must be positive");
    return {DomainKind::ball, R};
}
DomainSpec DomainSpec::half_space() { return {DomainKind::half_space, 0.0}; }
DomainSpec DomainSpec::cylinder(double R) {
    if (!(R > 0.0)) throw DomainError("cylinder: R must be positive");
    return {DomainKind::cylinder, R};
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case DomainKind::interval: os << "interval(0," << extent << ")"; break;
        case DomainKind::half_line: os << "half_line"; break;
        case DomainKind::ball: os << "ball(" << extent << ")"; break;
        case DomainKind::half_space: os << "half_space"; break;
        case DomainKind::cylinder: os << "cylinder(" << extent << ")"; break;
        case DomainKind::implicit: os << "implicit"; break;
    }
    return os.str();
}

}  // namespace greens
