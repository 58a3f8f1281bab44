#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "greens/experiments.hpp"

namespace greens {

// ------------------------------------------------------------------ catalogs

const std::vector<CatalogEntry>& potential_catalog() {
    static const std::vector<CatalogEntry> c = {
        {"zero", {}, "u = 0"},
        {"constant", {"value"}, "u = value"},
        {"linear", {"slope", "offset?"}, "u = slope x + offset"},
        {"harmonic", {"k", "center?"}, "u = k (x - center)^2"},
        {"polynomial", {"coeffs"}, "u = sum coeffs[k] x^k"},
        {"gaussian", {"amplitude", "center", "width"}, "u = amplitude exp(-((x - center)/width)^2)"},
        {"bump", {"amplitude", "width"}, "u = amplitude x exp(-(x/width)^2)"},
        {"tabulated", {"xs", "ys"}, "natural cubic spline through (xs, ys)"},
    };
    return c;
}

const std::vector<CatalogEntry>& surface_catalog() {
    static const std::vector<CatalogEntry> c = {
        {"sphere", {"radius", "center?", "point?"}, "|r - center| = radius"},
        {"cylinder", {"radius", "point?"}, "x^2 + y^2 = radius^2, axis e3"},
        {"plane", {"normal", "offset?", "point?"}, "normal . r = offset"},
        {"ellipsoid", {"axes", "point?"}, "x^2/a^2 + y^2/b^2 + z^2/c^2 = 1"},
    };
    return c;
}

const std::vector<CatalogEntry>& experiment_catalog() {
    static const std::vector<CatalogEntry> c = {
        {"direct1d", {"free"}, "direct Green's function against free closed forms"},
        {"inverse1d", {"pairs"}, "profile shooting and off-diagonal reconstruction against the direct solve"},
        {"boundary1d", {"wall"}, "wall coefficients c1, c2, c3 fitted from the direct diagonal"},
        {"stratified", {"reduction", "axis"}, "k-transform against the image form; on-axis universal terms"},
        {"radial", {"center", "near_center", "log_term", "curvature"}, "ball partial waves and curvature terms"},
        {"gradient", {"coefficients", "degeneration"}, "exact gradient series; lattice inverse relation"},
        {"geometry", {"predictions"}, "boundary coefficients of implicit surfaces"},
        {"conjecture", {"harness"}, "curved-wall bracket against the free ball"},
    };
    return c;
}

namespace {

const CatalogEntry* find_entry(const std::vector<CatalogEntry>& cat, const std::string& name) {
    for (const auto& e : cat)
        if (e.name == name) return &e;
    return nullptr;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << v;
    return os.str();
}

double get(const std::map<std::string, double>& m, const std::string& k, double fallback) {
    auto it = m.find(k);
    return it == m.end() ? fallback : it->second;
}

Vec3 vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

}  // namespace

Potential1D PotentialSpec::build() const {
    if (type == "zero") return Potential1D::zero();
    if (type == "constant") return Potential1D::constant(num.at("value"));
    if (type == "linear") return Potential1D::linear(num.at("slope"), get(num, "offset", 0.0));
    if (type == "harmonic") return Potential1D::harmonic(num.at("k"), get(num, "center", 0.0));
    if (type == "polynomial") return Potential1D::polynomial(lists.at("coeffs"));
    if (type == "gaussian") return Potential1D::gaussian(num.at("amplitude"), num.at("center"), num.at("width"));
    if (type == "bump") return Potential1D::bump(num.at("amplitude"), num.at("width"));
    if (type == "tabulated") return Potential1D::tabulated(lists.at("xs"), lists.at("ys"));
    throw ConfigError("unknown potential '" + type + "'");
}

std::string PotentialSpec::label() const {
    std::string s = type;
    bool first = true;
    for (const auto& [k, v] : num) {
        s += (first ? "(" : ",") + k + "=" + fmt(v);
        first = false;
    }
    if (!first) s += ")";
    return s;
}

ImplicitSurface SurfaceSpec::build() const {
    ImplicitSurface s = ImplicitSurface::plane({0.0, 0.0, 1.0});
    if (type == "sphere") s = ImplicitSurface::sphere(num.at("radius"), vec.empty() ? Vec3{0, 0, 0} : vec3(vec));
    else if (type == "cylinder") s = ImplicitSurface::cylinder(num.at("radius"));
    else if (type == "plane") s = ImplicitSurface::plane(vec3(vec), get(num, "offset", 0.0));
    else if (type == "ellipsoid") s = ImplicitSurface::ellipsoid(vec.at(0), vec.at(1), vec.at(2));
    else throw ConfigError("unknown surface '" + type + "'");
    if (scale != 1.0) s = ImplicitSurface::scaled(s, scale);
    if (relabel != 0.0) s = ImplicitSurface::reparametrized(s, relabel);
    return s;
}

Vec3 SurfaceSpec::foot() const {
    if (!point.empty()) return vec3(point);
    if (type == "sphere") {
        const Vec3 c = vec.empty() ? Vec3{0, 0, 0} : vec3(vec);
        return {c[0], c[1], c[2] + num.at("radius")};
    }
    if (type == "cylinder") return {num.at("radius"), 0.0, 0.0};
    if (type == "plane") {
        const Vec3 n = vec3(vec);
        const double n2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        const double c = get(num, "offset", 0.0) / n2;
        return {c * n[0], c * n[1], c * n[2]};
    }
    return {0.0, 0.0, vec.at(2)};
}

std::string SurfaceSpec::label() const {
    std::string s = type;
    for (const auto& [k, v] : num) s += " " + k + "=" + fmt(v);
    if (!vec.empty()) {
        s += " [";
        for (std::size_t i = 0; i < vec.size(); ++i) s += (i ? "," : "") + fmt(vec[i]);
        s += "]";
    }
    if (scale != 1.0) s += " scale=" + fmt(scale);
    if (relabel != 0.0) s += " relabel=" + fmt(relabel);
    return s;
}

std::string Scenario::hash() const {
    std::ostringstream os;
    os << std::hex << std::hash<std::string>{}(source);
    return os.str();
}

double Scenario::param(const std::string& key, double fallback) const { return get(params, key, fallback); }

std::vector<double> Scenario::list(const std::string& key, std::vector<double> fallback) const {
    auto it = lists.find(key);
    return it == lists.end() ? fallback : it->second;
}

// ------------------------------------------------------------------ parsing

namespace {

struct Ctx {
    std::string origin;
    [[noreturn]] void fail(const std::string& where, const std::string& msg) const {
        throw ConfigError(origin + ": " + where + ": " + msg);
    }
};

void only_keys(const Ctx& c, const YAML::Node& n, const std::string& where, std::set<std::string> allowed) {
    if (!n.IsMap()) c.fail(where, "expected a mapping");
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (!allowed.count(k)) c.fail(where, "unknown key '" + k + "'");
    }
}

double num(const Ctx& c, const YAML::Node& n, const std::string& where) {
    if (!n.IsScalar()) c.fail(where, "expected a number");
    try {
        const double v = n.as<double>();
        if (!std::isfinite(v)) c.fail(where, "value must be finite");
        return v;
    } catch (const YAML::Exception&) {
        c.fail(where, "expected a number, got '" + n.Scalar() + "'");
    }
}

int integer(const Ctx& c, const YAML::Node& n, const std::string& where) {
    const double v = num(c, n, where);
    if (v != std::floor(v) || std::abs(v) > 1e9) c.fail(where, "expected an integer");
    return int(v);
}

std::string str(const Ctx& c, const YAML::Node& n, const std::string& where) {
    if (!n.IsScalar()) c.fail(where, "expected a string");
    return n.Scalar();
}

std::vector<double> numlist(const Ctx& c, const YAML::Node& n, const std::string& where) {
    if (!n.IsSequence()) c.fail(where, "expected a list of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < n.size(); ++i) v.push_back(num(c, n[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

cplx complex_pair(const Ctx& c, const YAML::Node& n, const std::string& where) {
    if (!n.IsSequence() || n.size() != 2) c.fail(where, "complex numbers are written as [re, im]");
    return {num(c, n[0], where + "[0]"), num(c, n[1], where + "[1]")};
}

void check_params(const Ctx& c, const CatalogEntry& e, const std::set<std::string>& given, const std::string& where) {
    std::set<std::string> known;
    for (auto p : e.params) {
        const bool optional = !p.empty() && p.back() == '?';
        if (optional) p.pop_back();
        known.insert(p);
        if (!optional && !given.count(p)) c.fail(where, e.name + " requires '" + p + "'");
    }
    for (const auto& g : given)
        if (!known.count(g)) c.fail(where, e.name + " has no parameter '" + g + "'");
}

PotentialSpec parse_potential(const Ctx& c, const YAML::Node& n, const std::string& where) {
    if (!n.IsMap() || !n["type"]) c.fail(where, "potential needs a 'type'");
    PotentialSpec p;
    p.type = str(c, n["type"], where + ".type");
    const CatalogEntry* e = find_entry(potential_catalog(), p.type);
    if (!e) c.fail(where, "unknown potential '" + p.type + "'");
    std::set<std::string> given;
    for (const auto& kv : n) {
        const auto k = kv.first.as<std::string>();
        if (k == "type") continue;
        given.insert(k);
        if (kv.second.IsSequence()) p.lists[k] = numlist(c, kv.second, where + "." + k);
        else p.num[k] = num(c, kv.second, where + "." + k);
    }
    check_params(c, *e, given, where);
    for (const char* k : {"coeffs", "xs", "ys"})
        if (p.num.count(k)) c.fail(where, std::string(k) + " must be a list");
    if (p.type == "tabulated") {
        const auto& xs = p.lists["xs"];
        if (xs.size() < 3 || xs.size() != p.lists["ys"].size()) c.fail(where, "tabulated needs matching xs, ys (>= 3)");
        if (!std::is_sorted(xs.begin(), xs.end())) c.fail(where, "xs must increase");
    }
    if (p.type == "polynomial" && p.lists["coeffs"].empty()) c.fail(where, "coeffs is empty");
    if ((p.type == "gaussian" || p.type == "bump") && !(p.num["width"] > 0.0)) c.fail(where, "width must be > 0");
    return p;
}

SurfaceSpec parse_surface(const Ctx& c, const YAML::Node& n, const std::string& where, const SurfaceSpec* base) {
    if (!n.IsMap()) c.fail(where, "expected a mapping");
    SurfaceSpec s = base ? *base : SurfaceSpec{};
    if (base) {
        s.variants.clear();
        s.expect.clear();
        s.scale = 1.0;
        s.relabel = 0.0;
        only_keys(c, n, where, {"scale", "relabel"});
    } else {
        if (!n["type"]) c.fail(where, "surface needs a 'type'");
        s.type = str(c, n["type"], where + ".type");
        const CatalogEntry* e = find_entry(surface_catalog(), s.type);
        if (!e) c.fail(where, "unknown surface '" + s.type + "'");
        std::set<std::string> given;
        for (const auto& kv : n) {
            const auto k = kv.first.as<std::string>();
            if (k == "type" || k == "scale" || k == "relabel" || k == "expect" || k == "variants") continue;
            given.insert(k);
            const std::string w = where + "." + k;
            if (k == "center" || k == "normal" || k == "axes" || k == "point") {
                auto v = numlist(c, kv.second, w);
                if (v.size() != 3) c.fail(w, "expected three components");
                (k == "point" ? s.point : s.vec) = v;
            } else {
                s.num[k] = num(c, kv.second, w);
            }
        }
        check_params(c, *e, given, where);
        if (s.num.count("radius") && !(s.num["radius"] > 0.0)) c.fail(where, "radius must be > 0");
        if (s.type == "ellipsoid" && !(s.vec[0] > 0 && s.vec[1] > 0 && s.vec[2] > 0)) c.fail(where, "axes must be > 0");
        if (s.type == "plane" && s.vec[0] == 0 && s.vec[1] == 0 && s.vec[2] == 0) c.fail(where, "normal is zero");
    }
    if (n["scale"]) {
        s.scale = num(c, n["scale"], where + ".scale");
        if (!(s.scale > 0.0)) c.fail(where, "scale must be > 0");
    }
    if (n["relabel"]) {
        s.relabel = num(c, n["relabel"], where + ".relabel");
        if (!(s.relabel > 0.0)) c.fail(where, "relabel length must be > 0");
    }
    if (!base && n["expect"]) {
        only_keys(c, n["expect"], where + ".expect", {"c1", "d2"});
        for (const auto& kv : n["expect"])
            s.expect[kv.first.as<std::string>()] = num(c, kv.second, where + ".expect." + kv.first.as<std::string>());
    }
    if (!base && n["variants"]) {
        if (!n["variants"].IsSequence()) c.fail(where + ".variants", "expected a list");
        for (std::size_t i = 0; i < n["variants"].size(); ++i)
            s.variants.push_back(parse_surface(c, n["variants"][i], where + ".variants[" + std::to_string(i) + "]", &s));
    }
    return s;
}

struct KindRule {
    std::string kind, mode;
    bool needs_z, needs_potentials, needs_surfaces, needs_window;
    std::vector<std::string> tolerances;
    std::vector<std::string> params;  // "name[]" takes a list
};

const std::vector<KindRule>& rules() {
    static const std::vector<KindRule> r = {
        {"direct1d", "free", true, true, false, false, {"rel"}, {"points[]"}},
        {"inverse1d", "pairs", true, true, false, false, {"rel"}, {"pairs", "seed", "reach"}},
        {"boundary1d", "wall", true, true, false, true, {"c1", "c3"}, {"ode_tol"}},
        {"stratified", "reduction", true, false, false, false, {"rel"}, {"x[]", "xp[]", "rho[]"}},
        {"stratified", "axis", true, true, false, true, {"prefactor"}, {"ratio"}},
        {"radial", "center", true, true, false, false, {"c1", "c3"}, {"radius", "degree", "l[]"}},
        {"radial", "near_center", true, true, false, true, {"rel"}, {"radius", "degree"}},
        {"radial", "log_term", true, true, false, true, {"d2"}, {"radii[]", "scale_window"}},
        {"radial", "curvature", true, false, false, false, {"rel"},
         {"rho[]", "ratio", "offaxis_lo", "offaxis_hi", "offaxis_samples", "axis_lo", "axis_hi", "axis_samples"}},
        {"gradient", "coefficients", false, false, false, false, {"integral"}, {"order", "seed", "integrals"}},
        {"gradient", "degeneration", true, true, false, false, {"phi", "residual"}, {"h", "dims[]", "x0"}},
        {"geometry", "predictions", true, false, true, false, {"value", "invariance"}, {}},
        {"conjecture", "harness", true, false, false, false, {"difference", "residual"}, {"radii[]", "taus[]", "ratio"}},
    };
    return r;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    const Ctx c{origin};
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        c.fail("line " + std::to_string(e.mark.line + 1), e.msg);
    }
    only_keys(c, root, "top level",
              {"version", "name", "kind", "mode", "tag", "domain", "potentials", "surfaces", "z", "window", "tolerances",
               "params", "output"});
    Scenario s;
    s.source = text;
    if (!root["version"]) c.fail("top level", "missing required key 'version'");
    s.version = integer(c, root["version"], "version");
    if (s.version != kScenarioVersion)
        c.fail("version", "unsupported schema version " + std::to_string(s.version) + " (expected " +
                              std::to_string(kScenarioVersion) + ")");
    if (!root["name"]) c.fail("top level", "missing 'name'");
    s.name = str(c, root["name"], "name");
    if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos || s.name[0] == '.')
        c.fail("name", "must be a plain file name without spaces");
    if (!root["kind"]) c.fail("top level", "missing 'kind'");
    s.kind = str(c, root["kind"], "kind");
    if (!find_entry(experiment_catalog(), s.kind)) c.fail("kind", "unknown experiment kind '" + s.kind + "'");
    const KindRule* rule = nullptr;
    if (root["mode"]) s.mode = str(c, root["mode"], "mode");
    for (const auto& r : rules())
        if (r.kind == s.kind && (s.mode.empty() || r.mode == s.mode)) {
            rule = &r;
            break;
        }
    if (!rule) c.fail("mode", "kind " + s.kind + " has no mode '" + s.mode + "'");
    s.mode = rule->mode;
    if (root["tag"]) s.tag = str(c, root["tag"], "tag");

    if (root["domain"]) {
        const auto d = root["domain"];
        only_keys(c, d, "domain", {"type", "extent"});
        const std::string type = d["type"] ? str(c, d["type"], "domain.type") : "";
        if (type == "interval") {
            if (!d["extent"]) c.fail("domain", "interval needs 'extent'");
            const double X = num(c, d["extent"], "domain.extent");
            if (!(X > 0.0)) c.fail("domain.extent", "must be > 0");
            s.domain = DomainSpec::interval(X);
        } else if (type == "half_line") {
            if (d["extent"]) c.fail("domain", "half_line takes no extent");
            s.domain = DomainSpec::half_line();
        } else {
            c.fail("domain.type", "expected interval or half_line");
        }
    }

    if (root["potentials"]) {
        const auto p = root["potentials"];
        if (!p.IsSequence() || p.size() == 0) c.fail("potentials", "expected a non-empty list");
        for (std::size_t i = 0; i < p.size(); ++i)
            s.potentials.push_back(parse_potential(c, p[i], "potentials[" + std::to_string(i) + "]"));
    }
    if (rule->needs_potentials && s.potentials.empty()) c.fail("potentials", s.kind + "/" + s.mode + " needs potentials");
    if (!rule->needs_potentials && !s.potentials.empty())
        c.fail("potentials", s.kind + "/" + s.mode + " is defined for the free case only");

    if (root["surfaces"]) {
        const auto p = root["surfaces"];
        if (!p.IsSequence() || p.size() == 0) c.fail("surfaces", "expected a non-empty list");
        for (std::size_t i = 0; i < p.size(); ++i)
            s.surfaces.push_back(parse_surface(c, p[i], "surfaces[" + std::to_string(i) + "]", nullptr));
    }
    if (rule->needs_surfaces && s.surfaces.empty()) c.fail("surfaces", s.kind + " needs surfaces");
    if (!rule->needs_surfaces && !s.surfaces.empty()) c.fail("surfaces", s.kind + " takes no surfaces");

    if (root["z"]) {
        const auto z = root["z"];
        if (!z.IsSequence() || z.size() == 0) c.fail("z", "expected a list of [re, im] pairs");
        for (std::size_t i = 0; i < z.size(); ++i) s.z.push_back(complex_pair(c, z[i], "z[" + std::to_string(i) + "]"));
    }
    if (rule->needs_z && s.z.empty()) c.fail("z", s.kind + " needs energies");
    // real energies only where the spectrum is discrete and the solve stays off it
    const bool real_ok = s.domain.bounded() && (s.kind == "direct1d" || s.kind == "inverse1d" || s.kind == "boundary1d");
    for (std::size_t i = 0; i < s.z.size(); ++i)
        if (s.z[i].imag() == 0.0 && !real_ok)
            c.fail("z[" + std::to_string(i) + "]", "must lie off the real axis for " + s.kind + " on " + s.domain.describe());

    if (root["window"]) {
        const auto w = root["window"];
        only_keys(c, w, "window", {"lo", "hi", "samples", "degree"});
        for (const char* k : {"lo", "hi", "samples"})
            if (!w[k]) c.fail("window", std::string("missing '") + k + "'");
        s.window.lo = num(c, w["lo"], "window.lo");
        s.window.hi = num(c, w["hi"], "window.hi");
        s.window.samples = integer(c, w["samples"], "window.samples");
        if (w["degree"]) s.window.degree = integer(c, w["degree"], "window.degree");
        if (!(s.window.lo > 0.0 && s.window.hi > s.window.lo)) c.fail("window", "need 0 < lo < hi");
        if (s.window.samples < 4) c.fail("window.samples", "need at least 4");
        if (s.window.degree < 0 || s.window.degree >= s.window.samples) c.fail("window.degree", "need 0 <= degree < samples");
        s.window.set = true;
    }
    if (rule->needs_window && !s.window.set) c.fail("window", s.kind + "/" + s.mode + " needs a fit window");

    if (!root["tolerances"]) c.fail("top level", "missing 'tolerances'");
    only_keys(c, root["tolerances"], "tolerances", std::set<std::string>(rule->tolerances.begin(), rule->tolerances.end()));
    for (const auto& k : rule->tolerances) {
        if (!root["tolerances"][k]) c.fail("tolerances", "missing '" + k + "'");
        const double t = num(c, root["tolerances"][k], "tolerances." + k);
        if (!(t > 0.0)) c.fail("tolerances." + k, "must be > 0");
        s.tolerances[k] = t;
    }

    if (root["params"]) {
        const auto p = root["params"];
        if (!p.IsMap()) c.fail("params", "expected a mapping");
        for (const auto& kv : p) {
            const auto k = kv.first.as<std::string>();
            const bool scalar = std::count(rule->params.begin(), rule->params.end(), k) > 0;
            const bool list = std::count(rule->params.begin(), rule->params.end(), k + "[]") > 0;
            if (!scalar && !list) c.fail("params", s.kind + "/" + s.mode + " has no parameter '" + k + "'");
            if (list) s.lists[k] = numlist(c, kv.second, "params." + k);
            else s.params[k] = num(c, kv.second, "params." + k);
        }
    }
    if (root["output"]) {
        only_keys(c, root["output"], "output", {"dir"});
        if (root["output"]["dir"]) s.output_dir = str(c, root["output"]["dir"], "output.dir");
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(path + ": cannot read config");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str(), path);
}

}  // namespace greens
