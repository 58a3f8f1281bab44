#include "greens/geometry.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Dense>

#include "greens/errors.hpp"
#include "greens/radial3d.hpp"
#include "greens/stratified3d.hpp"

namespace greens {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 mul(const Mat3& m, const Vec3& v) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) r[i] = dot(m[i], v);
    return r;
}
double quad(const Mat3& m, const Vec3& v) { return dot(v, mul(m, v)); }

std::string fmt(const std::string& kind, std::initializer_list<double> ps) {
    std::ostringstream os;
    os << kind << "(";
    bool first = true;
    for (double p : ps) {
        os << (first ? "" : ",") << p;
        first = false;
    }
    os << ")";
    return os.str();
}

}  // namespace

ImplicitSurface ImplicitSurface::sphere(double R, Vec3 c) {
    if (!(R > 0.0)) throw DomainError("sphere: radius must be positive");
    ImplicitSurface s;
    s.phi_ = [c](const Vec3& r) { return norm(sub(r, c)); };
    s.grad_ = [c](const Vec3& r) {
        Vec3 d = sub(r, c);
        const double n = norm(d);
        for (auto& v : d) v /= n;
        return d;
    };
    s.hess_ = [c](const Vec3& r) {
        const Vec3 d = sub(r, c);
        const double n = norm(d);
        Mat3 H{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) H[i][j] = ((i == j ? 1.0 : 0.0) - d[i] * d[j] / (n * n)) / n;
        return H;
    };
    s.c0_ = R;
    s.name_ = fmt("sphere", {R});
    return s;
}

ImplicitSurface ImplicitSurface::cylinder(double R) {
    if (!(R > 0.0)) throw DomainError("cylinder: radius must be positive");
    ImplicitSurface s;
    s.phi_ = [](const Vec3& r) { return std::hypot(r[0], r[1]); };
    s.grad_ = [](const Vec3& r) {
        const double n = std::hypot(r[0], r[1]);
        return Vec3{r[0] / n, r[1] / n, 0.0};
    };
    s.hess_ = [](const Vec3& r) {
        const double n = std::hypot(r[0], r[1]);
        Mat3 H{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) H[i][j] = ((i == j ? 1.0 : 0.0) - r[i] * r[j] / (n * n)) / n;
        return H;
    };
    s.c0_ = R;
    s.name_ = fmt("cylinder", {R});
    return s;
}

ImplicitSurface ImplicitSurface::plane(Vec3 n, double c) {
    if (!(norm(n) > 0.0)) throw DomainError("plane: normal must be nonzero");
    ImplicitSurface s;
    s.phi_ = [n](const Vec3& r) { return dot(n, r); };
    s.grad_ = [n](const Vec3&) { return n; };
    s.hess_ = [](const Vec3&) { return Mat3{}; };
    s.c0_ = c;
    s.name_ = fmt("plane", {n[0], n[1], n[2], c});
    return s;
}

ImplicitSurface ImplicitSurface::ellipsoid(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw DomainError("ellipsoid: semi-axes must be positive");
    const Vec3 w{1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)};
    const double m = std::cbrt(a * b * c);
    ImplicitSurface s;
    s.phi_ = [w, m](const Vec3& r) { return m * std::sqrt(w[0] * r[0] * r[0] + w[1] * r[1] * r[1] + w[2] * r[2] * r[2]); };
    s.grad_ = [w, m](const Vec3& r) {
        const double q = std::sqrt(w[0] * r[0] * r[0] + w[1] * r[1] * r[1] + w[2] * r[2] * r[2]);
        return Vec3{m * w[0] * r[0] / q, m * w[1] * r[1] / q, m * w[2] * r[2] / q};
    };
    s.hess_ = [w, m](const Vec3& r) {
        const double q = std::sqrt(w[0] * r[0] * r[0] + w[1] * r[1] * r[1] + w[2] * r[2] * r[2]);
        Mat3 H{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                H[i][j] = m * ((i == j ? w[i] : 0.0) / q - w[i] * r[i] * w[j] * r[j] / (q * q * q));
        return H;
    };
    s.c0_ = m;
    s.name_ = fmt("ellipsoid", {a, b, c});
    return s;
}

ImplicitSurface ImplicitSurface::scaled(const ImplicitSurface& base, double k) {
    if (!(k > 0.0)) throw DomainError("scaled surface: factor must be positive");
    ImplicitSurface s;
    s.phi_ = [base, k](const Vec3& r) { return k * base(r); };
    s.grad_ = [base, k](const Vec3& r) {
        Vec3 g = base.gradient(r);
        for (auto& v : g) v *= k;
        return g;
    };
    s.hess_ = [base, k](const Vec3& r) {
        Mat3 H = base.hessian(r);
        for (auto& row : H)
            for (auto& v : row) v *= k;
        return H;
    };
    s.c0_ = k * base.level();
    s.name_ = fmt("scaled", {k}) + ":" + base.name();
    return s;
}

ImplicitSurface ImplicitSurface::reparametrized(const ImplicitSurface& base, double L) {
    if (!(L > 0.0)) throw DomainError("reparametrized surface: L must be positive");
    auto f1 = [L](double t) { return 1.0 + t / L; };
    ImplicitSurface s;
    s.phi_ = [base, L](const Vec3& r) {
        const double t = base(r);
        return t + t * t / (2.0 * L);
    };
    s.grad_ = [base, f1](const Vec3& r) {
        Vec3 g = base.gradient(r);
        const double d = f1(base(r));
        for (auto& v : g) v *= d;
        return g;
    };
    s.hess_ = [base, f1, L](const Vec3& r) {
        const Vec3 g = base.gradient(r);
        Mat3 H = base.hessian(r);
        const double d = f1(base(r));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) H[i][j] = d * H[i][j] + g[i] * g[j] / L;
        return H;
    };
    const double c = base.level();
    if (!(f1(c) > 0.0)) throw DomainError("reparametrized surface: f must increase at the level");
    s.c0_ = c + c * c / (2.0 * L);
    s.name_ = fmt("reparametrized", {L}) + ":" + base.name();
    return s;
}

double ImplicitSurface::laplacian(const Vec3& r) const {
    const Mat3 H = hessian(r);
    return H[0][0] + H[1][1] + H[2][2];
}

double ImplicitSurface::laplacian_fd(const Vec3& r, double h) const {
    double s = -6.0 * phi_(r);
    for (int i = 0; i < 3; ++i) {
        Vec3 p = r, m = r;
        p[i] += h;
        m[i] -= h;
        s += phi_(p) + phi_(m);
    }
    return s / (h * h);
}

FootPoint foot_point(const ImplicitSurface& s, const Vec3& r) {
    namespace ode = boost::numeric::odeint;
    FootPoint fp;
    fp.r = r;
    fp.xi = s.level() - s(r);
    Vec3 x = r;
    bool degenerate = false;
    auto rhs = [&](const Vec3& p, Vec3& dp, double) {
        const Vec3 g = s.gradient(p);
        const double g2 = dot(g, g);
        if (!(g2 > 1e-24) || !std::isfinite(g2)) {
            degenerate = true;
            dp = {0.0, 0.0, 0.0};
            return;
        }
        for (int i = 0; i < 3; ++i) dp[i] = g[i] / g2;
    };
    if (fp.xi != 0.0) {
        auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<Vec3>>(1e-13, 1e-13);
        ode::integrate_adaptive(stepper, rhs, x, s(r), s.level(), fp.xi / 16.0);
    }
    if (degenerate) throw NonConvergence("foot_point", "gradient vanishes along the trajectory");
    // polish onto the level set along the gradient
    for (int it = 0; it < 20; ++it) {
        const double gap = s.level() - s(x);
        if (std::abs(gap) <= 1e-14 * std::max(1.0, std::abs(s.level()))) break;
        const Vec3 g = s.gradient(x);
        const double g2 = dot(g, g);
        if (!(g2 > 1e-24)) throw NonConvergence("foot_point", "gradient vanishes at the level set");
        for (int i = 0; i < 3; ++i) x[i] += gap * g[i] / g2;
        if (it == 19) throw NonConvergence("foot_point", "Newton polish did not reach the level set");
    }
    fp.r0 = x;
    fp.tau = norm(sub(r, x));
    std::tie(fp.u1, fp.u2) = expansion_vectors(s, x);
    return fp;
}

std::pair<Vec3, Vec3> expansion_vectors(const ImplicitSurface& s, const Vec3& r0) {
    const Vec3 g = s.gradient(r0);
    const Mat3 H = s.hessian(r0);
    const double g2 = dot(g, g);
    const Vec3 Hg = mul(H, g);
    const double gHg = dot(g, Hg);
    Vec3 u1{}, u2{};
    for (int i = 0; i < 3; ++i) {
        u1[i] = -g[i] / g2;
        u2[i] = Hg[i] / (2.0 * g2 * g2) - g[i] * gHg / (g2 * g2 * g2);
    }
    return {u1, u2};
}

double metric_expansion(const ImplicitSurface& s, const Vec3& r0, double xi) {
    const Vec3 g = s.gradient(r0);
    const double g2 = dot(g, g);
    return g2 - 2.0 * xi * quad(s.hessian(r0), g) / g2;
}

BoundaryPrediction boundary_prediction(const ImplicitSurface& s, const Vec3& r0, const ComplexEnergy& z) {
    const Vec3 g = s.gradient(r0);
    const double gn = norm(g);
    if (!(gn > 0.0)) throw DomainError("boundary_prediction: gradient vanishes at the foot point");
    const double lap = s.laplacian(r0);
    const double normal = quad(s.hessian(r0), g) / (gn * gn);
    BoundaryPrediction p;
    p.c1 = -1.0 / gn;
    p.d1 = 0.0;
    p.d2 = -(lap - normal) / (2.0 * gn * gn * gn);
    p.d2_laplacian_only = -lap / (2.0 * gn * gn * gn);
    p.xi0 = I / z.sqrt();
    p.tau_c1 = -1.0;
    p.curvature = (lap - normal) / (2.0 * gn);
    p.tau_d2 = -p.curvature;
    p.tau0 = p.xi0 / gn;
    return p;
}

cplx curvature_bracket(const ComplexEnergy& z, double tau, double taup) {
    const double s = tau + taup;
    return tau * taup / (4.0 * pi * s * s) - tau * taup * z.value() / (4.0 * pi) * std::log(-I * z.sqrt() * s);
}

cplx curved_green_conjecture(const ImplicitSurface& s, const Vec3& r0, const ComplexEnergy& z, double tau,
                             double taup) {
    const double kappa = boundary_prediction(s, r0, z).curvature;
    return green3d_free_halfspace(z, tau, taup, 0.0) + kappa * curvature_bracket(z, tau, taup);
}

ConjectureFit conjecture_harness(const ComplexEnergy& z, const std::vector<double>& radii,
                                 const std::vector<double>& taus, double ratio) {
    ConjectureFit out;
    const auto u0 = Potential1D::zero();
    for (double R : radii)
        for (double t : taus) {
            const double tp = ratio * t;
            const auto b = ball_green(u0, R, z, t, tp, 0.0);
            ConjectureSample c{R, t, tp, R * (b.value - green3d_free_halfspace(z, t, tp, 0.0)),
                               curvature_bracket(z, t, tp)};
            out.samples.push_back(c);
        }
    const int n = int(out.samples.size());
    Eigen::MatrixXcd A(n, 3);
    Eigen::VectorXcd y(n);
    for (int i = 0; i < n; ++i) {
        const auto& c = out.samples[i];
        const double tt = c.tau * c.taup;
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / c.R;
        A(i, 2) = c.tau + c.taup;
        y(i) = (c.scaled_difference - c.bracket) / tt;
        out.bracket_scale = std::max(out.bracket_scale, std::abs(c.bracket) / tt);
        out.difference_scale = std::max(out.difference_scale, std::abs(y(i)));
    }
    const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(y);
    out.a = x(0);
    out.b = x(1);
    out.c = x(2);
    out.residual = (A * x - y).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace greens
