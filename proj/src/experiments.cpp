#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <random>
#include <sstream>

#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/experiments.hpp"
#include "greens/fit.hpp"
#include "greens/geometry.hpp"
#include "greens/gradient_series.hpp"
#include "greens/inverse1d.hpp"
#include "greens/quadrature.hpp"
#include "greens/radial3d.hpp"
#include "greens/stratified3d.hpp"

namespace greens {

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string zlabel(cplx z) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

class Runner {
public:
    Runner(const Scenario& s, const RunOptions& o) : s_(s), o_(o) { out_.scenario = s.name; }

    ResultTable& table(const std::string& name) {
        tables_.emplace_back(name);
        auto& t = tables_.back();
        t.metadata()["scenario"] = s_.name;
        t.metadata()["kind"] = s_.kind + "/" + s_.mode;
        t.metadata()["scenario_hash"] = s_.hash();
        t.metadata()["version"] = GREENS_VERSION;
        if (!s_.tag.empty()) t.metadata()["tag"] = s_.tag;
        return t;
    }

    double tol(const std::string& key) const { return s_.tolerances.at(key) * o_.tol_scale; }

    void check(const std::string& name, double value, const std::string& tol_key) {
        const double t = tol(tol_key);
        out_.checks.push_back({name, value, t, value <= t});
    }
    // exact comparisons ignore the tolerance scale
    void exact(const std::string& name, bool equal) { out_.checks.push_back({name, equal ? 0.0 : 1.0, 0.0, equal}); }

    std::vector<std::pair<PotentialSpec, Potential1D>> potentials() const {
        std::vector<std::pair<PotentialSpec, Potential1D>> v;
        for (const auto& p : s_.potentials) v.emplace_back(p, p.build());
        return v;
    }

    ExperimentResult take() {
        out_.tables.assign(std::make_move_iterator(tables_.begin()), std::make_move_iterator(tables_.end()));
        return std::move(out_);
    }

    const Scenario& s_;
    const RunOptions& o_;
    ExperimentResult out_;
    std::deque<ResultTable> tables_;
};

double domain_reach(const Scenario& s) { return s.domain.bounded() ? s.domain.extent : s.param("reach", 3.0); }

// -------------------------------------------------------------- 1D

void run_direct1d(Runner& r) {
    const auto& s = r.s_;
    auto& t = r.table("green");
    t.text_column("potential")
        .complex_column("z", "L^-2")
        .column("x", "L")
        .column("xp", "L")
        .complex_column("G", "L")
        .complex_column("closed_form", "L");
    const auto pts = s.list("points", {0.1, 0.35, 0.7, 1.4, 3.0});
    const double nan = std::nan("");
    for (const auto& [spec, u] : r.potentials())
        for (cplx zz : s.z) {
            const ComplexEnergy z(zz);
            Green1DOptions opt;
            opt.reach = *std::max_element(pts.begin(), pts.end());
            Green1D g(u, s.domain, z, opt);
            double worst = 0.0;
            for (double x : pts)
                for (double xp : pts) {
                    if (s.domain.bounded() && (x > s.domain.extent || xp > s.domain.extent)) continue;
                    const cplx v = g(x, xp);
                    cplx ref{nan, nan};
                    if (u.is_zero())
                        ref = s.domain.bounded() ? free_box_green(z, s.domain.extent, x, xp)
                                                 : free_halfline_green(z, x, xp);
                    t.row() << spec.label() << zz << x << xp << v << ref;
                    if (u.is_zero()) worst = std::max(worst, rel(v, ref));
                }
            if (u.is_zero()) r.check("free closed form z=" + zlabel(zz), worst, "rel");
        }
}

void run_inverse1d(Runner& r) {
    const auto& s = r.s_;
    auto& t = r.table("pairs");
    t.text_column("potential")
        .complex_column("z", "L^-2")
        .column("x", "L")
        .column("xp", "L")
        .complex_column("G_inverse", "L")
        .complex_column("G_direct", "L")
        .column("rel_error");
    const int pairs = int(s.param("pairs", 20));
    const double reach = domain_reach(s);
    for (const auto& [spec, u] : r.potentials())
        for (cplx zz : s.z) {
            const ComplexEnergy z(zz);
            std::mt19937 rng(unsigned(s.param("seed", 5)));
            std::uniform_real_distribution<double> d(0.0, reach);
            const auto pf = solve_profile(u, s.domain, z);
            Green1DOptions opt;
            opt.reach = reach;
            Green1D g(u, s.domain, z, opt);
            double worst = 0.0;
            for (int i = 0; i < pairs; ++i) {
                const double x = d(rng), xp = d(rng);
                const cplx a = offdiag_reconstruct(pf, x, xp), b = g(x, xp);
                t.row() << spec.label() << zz << x << xp << a << b << rel(a, b);
                worst = std::max(worst, rel(a, b));
            }
            r.check("inverse vs direct " + spec.label() + " z=" + zlabel(zz), worst, "rel");
        }
}

void run_boundary1d(Runner& r) {
    const auto& s = r.s_;
    const auto& w = s.window;
    const int degree = w.degree > 0 ? w.degree : 7;
    if (degree < 3) throw ConfigError(s.name + ": window.degree must be >= 3 to resolve c3");
    auto& t = r.table("coefficients");
    t.text_column("potential")
        .complex_column("z", "L^-2")
        .complex_column("c1")
        .complex_column("c2")
        .complex_column("c3")
        .complex_column("c3_expected")
        .column("fit_residual");
    for (const auto& [spec, u] : r.potentials())
        for (cplx zz : s.z) {
            const ComplexEnergy z(zz);
            Green1DOptions opt;
            opt.tol = s.param("ode_tol", 1e-13);
            opt.reach = w.hi;
            Green1D g(u, s.domain, z, opt);
            std::vector<std::pair<double, cplx>> data;
            for (double x : geometric_grid(w.lo, w.hi, w.samples)) data.push_back({x, g.diagonal(x)});
            std::vector<BasisTerm> b;
            for (int k = 1; k <= degree; ++k) b.push_back(basis::pow(k));
            const auto f = fit_expansion(data, b);
            // u(0) only shifts the energy
            const cplx c3 = 2.0 * (zz - u(0.0)) / 3.0;
            t.row() << spec.label() << zz << f.coeffs[0] << f.coeffs[1] << f.coeffs[2] << c3 << f.residual;
            const std::string tag = spec.label() + " z=" + zlabel(zz);
            r.check("c1 " + tag, std::abs(f.coeffs[0] + 1.0), "c1");
            r.check("c3 " + tag, rel(f.coeffs[2], c3), "c3");
        }
}

// -------------------------------------------------------------- stratified

void run_stratified(Runner& r) {
    const auto& s = r.s_;
    if (s.mode == "reduction") {
        auto& t = r.table("reduction");
        t.complex_column("z", "L^-2")
            .column("x", "L")
            .column("xp", "L")
            .column("rho", "L")
            .complex_column("quadrature", "L^-1")
            .complex_column("closed_form", "L^-1")
            .column("rel_error");
        for (cplx zz : s.z) {
            const ComplexEnergy z(zz);
            double worst = 0.0;
            for (double x : s.list("x", {0.2, 0.6, 1.1}))
                for (double xp : s.list("xp", {0.3, 0.7, 1.4}))
                    for (double rho : s.list("rho", {0.3, 0.8, 1.5})) {
                        const cplx q = green3d_stratified(Potential1D::zero(), z, x, xp, rho);
                        const cplx c = green3d_free_halfspace(z, x, xp, rho);
                        t.row() << zz << x << xp << rho << q << c << rel(q, c);
                        worst = std::max(worst, rel(q, c));
                    }
            r.check("k-transform vs image form z=" + zlabel(zz), worst, "rel");
        }
        return;
    }
    auto& t = r.table("axis");
    t.text_column("potential")
        .complex_column("z", "L^-2")
        .complex_column("leading")
        .complex_column("subleading")
        .column("fit_residual")
        .column("remainder_slope");
    const double ratio = s.param("ratio", 2.0);
    for (const auto& [spec, u] : r.potentials())
        for (cplx zz : s.z) {
            const auto f = fit_axis_universal(u, ComplexEnergy(zz), s.window.lo, s.window.hi, s.window.samples, ratio);
            t.row() << spec.label() << zz << f.leading << f.subleading << f.fit.residual << f.remainder_slope;
            const std::string tag = spec.label() + " z=" + zlabel(zz);
            r.check("leading prefactor " + tag, std::abs(f.leading - 1.0), "prefactor");
            r.check("subleading prefactor " + tag, std::abs(f.subleading - 1.0), "prefactor");
        }
}

// -------------------------------------------------------------- radial

void run_radial(Runner& r) {
    const auto& s = r.s_;
    const double R = s.param("radius", 1.0);
    if (s.mode == "center") {
        auto& t = r.table("center");
        t.text_column("potential")
            .complex_column("z", "L^-2")
            .column("l")
            .complex_column("c1")
            .complex_column("c3")
            .complex_column("c3_expected")
            .column("relation_residual");
        const int N = int(s.param("degree", 8));
        for (const auto& [spec, u] : r.potentials())
            for (cplx zz : s.z)
                for (double l : s.list("l", {0, 1, 2})) {
                    const int li = int(l);
                    const ComplexEnergy z(zz);
                    const auto ce = center_expansion(u, R, z, li, N);
                    const cplx c3 = center_c3(ComplexEnergy(zz - u(0.0)), li);
                    t.row() << spec.label() << zz << l << ce.fitted[1] << ce.fitted[3] << c3 << ce.relation_residual;
                    const std::string tag = spec.label() + " z=" + zlabel(zz) + " l=" + std::to_string(li);
                    r.check("c1 " + tag, std::abs(ce.fitted[1] + 1.0 / (2 * li + 1)), "c1");
                    r.check("c3 " + tag, rel(ce.fitted[3], c3), "c3");
                }
        return;
    }
    if (s.mode == "near_center") {
        auto& t = r.table("near_center");
        t.text_column("potential")
            .complex_column("z", "L^-2")
            .column("separation", "L")
            .complex_column("remainder", "L^-1");
        auto& c = r.table("near_center_fit");
        c.text_column("potential")
            .complex_column("z", "L^-2")
            .complex_column("constant")
            .complex_column("constant_expected")
            .complex_column("slope")
            .complex_column("slope_expected");
        for (const auto& [spec, u] : r.potentials())
            for (cplx zz : s.z) {
                const ComplexEnergy z(zz);
                const auto ce = center_expansion(u, R, z, 0, int(s.param("degree", 8)));
                std::vector<std::pair<double, cplx>> data;
                for (double d : geometric_grid(s.window.lo, s.window.hi, s.window.samples)) {
                    // r = d, r' = 2d on a common ray
                    const cplx v = sum_partial_waves(u, R, z, d, 2.0 * d, 0.0).value + 1.0 / (4.0 * pi * d);
                    data.push_back({d, v});
                    t.row() << spec.label() << zz << d << v;
                }
                const auto f = fit_expansion(data, {basis::pow(0), basis::pow(1), basis::pow(2), basis::pow(3)});
                const cplx c0 = ce.fitted[2] / (4.0 * pi);
                const cplx c1 = (zz - u(0.0)) / (8.0 * pi);
                c.row() << spec.label() << zz << f.coeffs[0] << c0 << f.coeffs[1] << c1;
                const std::string tag = spec.label() + " z=" + zlabel(zz);
                r.check("constant " + tag, rel(f.coeffs[0], c0), "rel");
                r.check("linear term " + tag, rel(f.coeffs[1], c1), "rel");
            }
        return;
    }
    if (s.mode == "log_term") {
        auto& t = r.table("log_term");
        t.text_column("potential")
            .complex_column("z", "L^-2")
            .column("radius", "L")
            .complex_column("c1")
            .complex_column("d2")
            .complex_column("quadratic")
            .column("fit_residual");
        const bool scale_window = s.param("scale_window", 1.0) != 0.0;
        for (cplx zz : s.z)
            for (double Rk : s.list("radii", {1.0, 2.0})) {
                std::vector<cplx> d2s;
                const double k = scale_window ? Rk : 1.0;
                for (const auto& [spec, u] : r.potentials()) {
                    const auto f =
                        nu_boundary_fit(u, Rk, ComplexEnergy(zz), s.window.lo * k, s.window.hi * k, s.window.samples);
                    t.row() << spec.label() << zz << Rk << f.coeffs[0] << f.coeffs[1] << f.coeffs[2] << f.residual;
                    const std::string tag = spec.label() + " R=" + std::to_string(Rk).substr(0, 4) + " z=" + zlabel(zz);
                    r.check("d2 R " + tag, std::abs(f.coeffs[1] * Rk + 1.0), "d2");
                    d2s.push_back(f.coeffs[1]);
                }
                double spread = 0.0;
                for (const auto& a : d2s)
                    for (const auto& b : d2s) spread = std::max(spread, std::abs(a - b) * Rk);
                r.check("log term u-independence R=" + std::to_string(Rk).substr(0, 4) + " z=" + zlabel(zz), spread,
                        "d2");
            }
        return;
    }
    // curvature
    auto& t = r.table("curvature");
    t.complex_column("z", "L^-2")
        .text_column("term")
        .column("rho", "L")
        .complex_column("fitted")
        .complex_column("closed_form")
        .column("rel_error");
    for (cplx zz : s.z) {
        const ComplexEnergy z(zz);
        for (double rho : s.list("rho", {0.5, 1.0})) {
            const auto f = curvature_offaxis_fit(z, rho, s.param("offaxis_lo", 0.002), s.param("offaxis_hi", 0.02),
                                                 int(s.param("offaxis_samples", 8)));
            t.row() << zz << "K0 prefactor" << rho << f.value << f.expected << f.rel_error();
            r.check("K0 prefactor rho=" + std::to_string(rho).substr(0, 4) + " z=" + zlabel(zz), f.rel_error(), "rel");
        }
        const auto a = curvature_axis_fit(z, s.param("ratio", 2.0), s.param("axis_lo", 0.001), s.param("axis_hi", 0.02),
                                          int(s.param("axis_samples", 14)));
        t.row() << zz << "axis constant" << 0.0 << a.constant.value << a.constant.expected << a.constant.rel_error();
        t.row() << zz << "axis log" << 0.0 << a.log.value << a.log.expected << a.log.rel_error();
        r.check("axis constant z=" + zlabel(zz), a.constant.rel_error(), "rel");
        r.check("axis log z=" + zlabel(zz), a.log.rel_error(), "rel");
    }
}

// -------------------------------------------------------------- gradient

void run_gradient(Runner& r) {
    const auto& s = r.s_;
    if (s.mode == "coefficients") {
        const auto tab = coefficient_table(direct_series(int(s.param("order", 7)), 3));
        auto& t = r.table("coefficients");
        t.text_column("term").text_column("exact").complex_column("value").text_column("expected");
        const std::vector<std::pair<std::string, Rational>> expect = {
            {"lead", Rational(1, 2)}, {"laplacian", Rational(-1, 16)}, {"grad_sq", Rational(-5, 64)},
            {"bilaplacian", Rational(1, 64)}};
        const auto got = tab.values();
        for (std::size_t i = 0; i < expect.size(); ++i) {
            const GaussRational e(expect[i].second);
            t.row() << expect[i].first << got[i].str() << got[i].value() << e.str();
            r.exact("coefficient " + expect[i].first, got[i] == e);
        }
        r.exact("series has no other terms", tab.complete);

        auto& q = r.table("radial_integrals");
        q.column("q")
            .column("m")
            .complex_column("w", "L^-2")
            .complex_column("closed_form")
            .complex_column("quadrature")
            .column("rel_error");
        std::mt19937 gen(unsigned(s.param("seed", 7)));
        std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.3, 3.0);
        std::uniform_int_distribution<int> qd(0, 3);
        const int cases = int(s.param("integrals", 12));
        double worst = 0.0;
        for (int k = 0; k < cases; ++k) {
            const cplx w{re(gen), im(gen)};
            const int qq = qd(gen);
            const int m = qq + 1 + qd(gen) % 3;
            auto f = [&](double x) {
                // k = x / (1 - x) maps [0, 1) onto [0, inf)
                const double kk = x / (1.0 - x);
                return std::pow(kk, 2 * qq) / std::pow(w - kk * kk, m) / ((1.0 - x) * (1.0 - x));
            };
            const cplx num = integrate_adaptive(f, 0.0, 1.0, 1e-15, 1e-13).value;
            const cplx cf = radial_k_integral(qq, m, w);
            q.row() << double(qq) << double(m) << w << cf << num << rel(cf, num);
            worst = std::max(worst, rel(cf, num));
        }
        r.check("radial k-integrals", worst, "integral");
        return;
    }
    // one-coordinate field on a lattice
    const auto pots = r.potentials();
    const auto& [spec, u] = pots.front();
    const ComplexEnergy z(s.z.front());
    const auto pf = solve_profile(u, DomainSpec::half_line(), z);
    const double h = s.param("h", 0.01);
    const auto dims = s.list("dims", {11, 5, 5});
    if (dims.size() != 3 || *std::min_element(dims.begin(), dims.end()) < 5)
        throw ConfigError(s.name + ": params.dims needs three entries >= 5");
    const Vec3 origin{s.param("x0", 0.5), 0.0, 0.0};
    const std::array<int, 3> n{int(dims[0]), int(dims[1]), int(dims[2])};
    const auto field = NuField3D::sample([&](const Vec3& p) { return pf.n(p[0]); }, origin, h, n);
    const auto res = inverse_rhs(field, Field3D::stratified(u, 0), z);
    double scale = 0.0;
    for (int i = 2; i < n[0] - 2; ++i)
        for (int j = 2; j < n[1] - 2; ++j)
            for (int k = 2; k < n[2] - 2; ++k) scale = std::max(scale, std::abs(inverse_terms(field, i, j, k).lead));
    auto& t = r.table("degeneration");
    t.text_column("potential")
        .complex_column("z", "L^-2")
        .column("h", "L")
        .column("field_scale")
        .column("max_phi1")
        .column("max_phi2")
        .column("max_residual")
        .column("masked");
    t.row() << spec.label() << s.z.front() << h << scale << res.max_phi1 << res.max_phi2 << res.max_residual
            << double(res.masked_count);
    r.check("phi1 / scale", res.max_phi1 / scale, "phi");
    r.check("phi2 / scale", res.max_phi2 / scale, "phi");
    r.check("one-coordinate residual", res.max_residual, "residual");
    r.exact("no masked sites", res.masked_count == 0);
}

// -------------------------------------------------------------- geometry

void run_geometry(Runner& r) {
    const auto& s = r.s_;
    const ComplexEnergy z(s.z.front());
    auto& t = r.table("predictions");
    t.text_column("surface")
        .column("c1")
        .column("d1")
        .column("d2")
        .column("d2_laplacian_only")
        .column("tau_d2")
        .column("curvature")
        .complex_column("xi0");
    auto locate = [](const ImplicitSurface& surf, const Vec3& p) {
        if (std::abs(surf(p) - surf.level()) < 1e-13 * std::max(1.0, std::abs(surf.level()))) return p;
        return foot_point(surf, p).r0;
    };
    for (const auto& sp : s.surfaces) {
        const auto surf = sp.build();
        const Vec3 r0 = locate(surf, sp.foot());
        const auto p = boundary_prediction(surf, r0, z);
        t.row() << sp.label() << p.c1 << p.d1 << p.d2 << p.d2_laplacian_only << p.tau_d2 << p.curvature << p.xi0;
        for (const auto& [k, v] : sp.expect) {
            const double got = k == "c1" ? p.c1 : p.d2;
            r.check(k + " " + sp.label(), std::abs(got - v), "value");
        }
        for (const auto& var : sp.variants) {
            const auto vs = var.build();
            const auto q = boundary_prediction(vs, r0, z);
            const auto g = vs.gradient(r0);
            const double gn = std::hypot(g[0], g[1], g[2]);
            t.row() << var.label() << q.c1 << q.d1 << q.d2 << q.d2_laplacian_only << q.tau_d2 << q.curvature << q.xi0;
            r.check("tau c1 " + var.label(), std::abs(q.c1 * gn - q.tau_c1), "invariance");
            r.check("tau d2 " + var.label(), std::abs(q.tau_d2 - p.tau_d2), "invariance");
        }
    }
}

void run_conjecture(Runner& r) {
    const auto& s = r.s_;
    const ComplexEnergy z(s.z.front());
    const auto h = conjecture_harness(z, s.list("radii", {4.0, 8.0, 16.0}), s.list("taus", {0.05, 0.1, 0.2}),
                                      s.param("ratio", 2.0));
    auto& t = r.table("samples");
    t.column("R", "L")
        .column("tau", "L")
        .column("taup", "L")
        .complex_column("scaled_difference")
        .complex_column("bracket");
    for (const auto& x : h.samples) t.row() << x.R << x.tau << x.taup << x.scaled_difference << x.bracket;
    auto& f = r.table("fit");
    f.complex_column("a")
        .complex_column("b")
        .complex_column("c")
        .column("residual")
        .column("bracket_scale")
        .column("difference_scale");
    f.row() << h.a << h.b << h.c << h.residual << h.bracket_scale << h.difference_scale;
    r.check("remainder / bracket", h.difference_scale / h.bracket_scale, "difference");
    r.check("decay fit residual / bracket", h.residual / h.bracket_scale, "residual");
}

}  // namespace

bool ExperimentResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ResultTable ExperimentResult::summary() const {
    ResultTable t("summary");
    t.text_column("check").column("value").column("tol").text_column("status");
    for (const auto& c : checks) t.row() << c.name << c.value << c.tol << (c.passed ? "pass" : "fail");
    if (!tables.empty()) t.metadata() = tables.front().metadata();
    t.metadata()["result"] = passed() ? "pass" : "fail";
    return t;
}

ExperimentResult run_scenario(const Scenario& s, const RunOptions& opt) {
    if (!(opt.tol_scale > 0.0)) throw ConfigError("tolerance scale must be > 0");
    Runner r(s, opt);
    if (s.kind == "direct1d") run_direct1d(r);
    else if (s.kind == "inverse1d") run_inverse1d(r);
    else if (s.kind == "boundary1d") run_boundary1d(r);
    else if (s.kind == "stratified") run_stratified(r);
    else if (s.kind == "radial") run_radial(r);
    else if (s.kind == "gradient") run_gradient(r);
    else if (s.kind == "geometry") run_geometry(r);
    else if (s.kind == "conjecture") run_conjecture(r);
    else throw ConfigError("unknown experiment kind '" + s.kind + "'");
    return r.take();
}

void write_result(const ExperimentResult& r, const std::string& dir, TableFormat f) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
    const std::string ext = format_extension(f);
    for (const auto& t : r.tables) write_table_file(t, (fs::path(dir) / (t.name() + "." + ext)).string(), f);
    write_table_file(r.summary(), (fs::path(dir) / ("summary." + ext)).string(), f);
}

}  // namespace greens
