#include "greens/gradient_series.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "greens/errors.hpp"

namespace greens {

// ---------------------------------------------------------------- rationals

GaussRational& GaussRational::operator+=(const GaussRational& o) {
    re += o.re;
    im += o.im;
    return *this;
}

GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

cplx GaussRational::value() const { return {re.convert_to<double>(), im.convert_to<double>()}; }

std::string GaussRational::str() const {
    std::ostringstream os;
    if (im == 0) {
        os << re;
    } else if (re == 0) {
        os << im << "i";
    } else {
        os << "(" << re << (im > 0 ? "+" : "") << im << "i)";
    }
    return os.str();
}

namespace {

GaussRational inverse(const GaussRational& a) {
    const Rational d = a.re * a.re + a.im * a.im;
    return {a.re / d, -a.im / d};
}

Rational factorial(int n) {
    Rational r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

Rational double_factorial(int n) {  // n!!, (-1)!! = 1
    Rational r = 1;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}

// Gamma(j + 1/2) / sqrt(pi)
Rational half_gamma(int j) {
    Rational four_j = 1;
    for (int k = 0; k < j; ++k) four_j *= 4;
    return factorial(2 * j) / (four_j * factorial(j));
}

std::string index_str(const MultiIndex& a) {
    std::ostringstream os;
    os << "d(" << a[0] << a[1] << a[2] << ")u";
    return os.str();
}

}  // namespace

GaussRational minus_i_power(int p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, -1};
        case 2: return {-1, 0};
        default: return {0, 1};
    }
}

// ---------------------------------------------------------------- alpha_n

int DiffPolyTerm::derivative_count() const {
    int d = 0;
    for (const auto& f : factors) d += f[0] + f[1] + f[2];
    return d;
}

std::string DiffPolyTerm::str() const {
    std::ostringstream os;
    os << coeff.str();
    for (const auto& f : factors) os << "*" << index_str(f);
    const char* names[3] = {"k1", "k2", "k3"};
    for (int i = 0; i < 3; ++i)
        if (kmono[i] > 0) os << "*" << names[i] << "^" << kmono[i];
    return os.str();
}

bool AlphaSeries::homogeneous() const {
    for (const auto& t : terms)
        if (t.k_degree() + t.derivative_count() + 2 * int(t.factors.size()) != 2 * (n - 1)) return false;
    return true;
}

std::string AlphaSeries::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (const auto& t : terms) s += (s.empty() ? "" : " + ") + t.str();
    return s;
}

namespace {

using PolyKey = std::pair<std::vector<MultiIndex>, MultiIndex>;
using Poly = std::map<PolyKey, GaussRational>;

void add_to(Poly& p, PolyKey key, const GaussRational& c) {
    std::sort(key.first.begin(), key.first.end());
    auto [it, fresh] = p.try_emplace(std::move(key), c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) p.erase(it);
    }
}

void accumulate(Poly& into, const Poly& p, const GaussRational& scale) {
    for (const auto& [k, c] : p) add_to(into, k, c * scale);
}

// d/dx_i by the product rule on the u factors
Poly grad(const Poly& p, int i) {
    Poly out;
    for (const auto& [key, c] : p)
        for (std::size_t f = 0; f < key.first.size(); ++f) {
            PolyKey k = key;
            k.first[f][i] += 1;
            add_to(out, std::move(k), c);
        }
    return out;
}

Poly times_factor(const Poly& p, const MultiIndex& a) {
    Poly out;
    for (const auto& [key, c] : p) {
        PolyKey k = key;
        k.first.push_back(a);
        add_to(out, std::move(k), c);
    }
    return out;
}

Poly times_k(const Poly& p, int i) {
    Poly out;
    for (const auto& [key, c] : p) {
        PolyKey k = key;
        k.second[i] += 1;
        add_to(out, std::move(k), c);
    }
    return out;
}

MultiIndex unit(int i, int m = 1) {
    MultiIndex a{0, 0, 0};
    a[i] = m;
    return a;
}

AlphaSeries to_series(int n, const Poly& p) {
    AlphaSeries s;
    s.n = n;
    for (const auto& [key, c] : p) s.terms.push_back({c, key.first, key.second});
    return s;
}

}  // namespace

std::vector<AlphaSeries> alpha_series(int nmax, int dim) {
    if (nmax < 1) throw DomainError("alpha_series: n must be >= 1");
    if (dim < 1 || dim > 3) throw DomainError("alpha_series: dim must be 1, 2 or 3");
    const GaussRational two_i{0, 2};
    std::vector<Poly> a(nmax + 1);
    a[1][{{}, {0, 0, 0}}] = GaussRational(1);
    for (int n = 2; n <= nmax; ++n) {
        Poly next;
        for (int i = 0; i < dim; ++i) {
            const Poly gi = grad(a[n - 1], i);
            accumulate(next, grad(gi, i), GaussRational(-1));
            accumulate(next, times_k(gi, i), -two_i);
        }
        if (n >= 3 && !a[n - 2].empty()) {
            const GaussRational m(-(n - 2));
            for (int i = 0; i < dim; ++i) {
                accumulate(next, times_k(times_factor(a[n - 2], unit(i)), i), m * two_i);
                accumulate(next, times_factor(grad(a[n - 2], i), unit(i)), m * GaussRational(2));
                accumulate(next, times_factor(a[n - 2], unit(i, 2)), m);
            }
        }
        if (n >= 4 && !a[n - 3].empty()) {
            const GaussRational m(-(n - 2) * (n - 3));
            for (int i = 0; i < dim; ++i) accumulate(next, times_factor(times_factor(a[n - 3], unit(i)), unit(i)), m);
        }
        a[n] = std::move(next);
    }
    std::vector<AlphaSeries> out;
    for (int n = 1; n <= nmax; ++n) out.push_back(to_series(n, a[n]));
    return out;
}

AlphaSeries alpha_terms(int n, int dim) { return alpha_series(n, dim).back(); }

// ---------------------------------------------------------------- point data

UPointData UPointData::from_field(const Field3D& f, const Vec3& r, int max_order) {
    UPointData d;
    d.u = f(r);
    for (int a = 0; a <= max_order; ++a)
        for (int b = 0; a + b <= max_order; ++b)
            for (int c = 0; a + b + c <= max_order; ++c)
                if (a + b + c > 0) d.derivs[{a, b, c}] = f.derivative(r, {a, b, c});
    return d;
}

double UPointData::factor(const MultiIndex& a) const {
    auto it = derivs.find(a);
    if (it == derivs.end()) throw DomainError("UPointData: missing derivative " + index_str(a));
    return it->second;
}

// ---------------------------------------------------------------- k integrals

namespace {

cplx checked_root(const ComplexEnergy& z, double u) {
    const cplx w = z.value() - u;
    if (w.imag() == 0.0 && w.real() >= 0.0) throw BranchPointHit("k_reduce_diagonal", "z - u is real and nonnegative");
    return sqrt_upper(w);
}

cplx root_power(cplx root, int two_s) {
    cplx r{1.0, 0.0};
    const cplx b = two_s >= 0 ? root : 1.0 / root;
    for (int k = 0; k < std::abs(two_s); ++k) r *= b;
    return r;
}

// int_0^inf k^(2q) / (w - k^2)^m dk = pi * c * w^(two_s/2)
std::pair<GaussRational, int> radial_exact(int q, int m) {
    const int two_s = 2 * q + 1 - 2 * m;
    const Rational c = Rational(m % 2 == 0 ? 1 : -1) / 2 * half_gamma(q) * half_gamma(m - q - 1) / factorial(m - 1);
    return {GaussRational(c) * minus_i_power(two_s), two_s};
}

// isotropic average of khat^kmono
Rational angular_moment(const MultiIndex& k) {
    if (k[0] % 2 || k[1] % 2 || k[2] % 2) return 0;
    return double_factorial(k[0] - 1) * double_factorial(k[1] - 1) * double_factorial(k[2] - 1) /
           double_factorial(k[0] + k[1] + k[2] + 1);
}

}  // namespace

cplx radial_k_integral(int q, int m, cplx w) {
    if (q < 0 || 2 * m <= 2 * q + 1) throw DomainError("radial_k_integral: needs m > q + 1/2");
    if (w.imag() == 0.0 && w.real() >= 0.0) throw BranchPointHit("radial_k_integral", "w is real and nonnegative");
    const int two_s = 2 * q + 1 - 2 * m;
    const double g = std::tgamma(q + 0.5) * std::tgamma(m - q - 0.5) / std::tgamma(double(m));
    return (m % 2 == 0 ? 0.5 : -0.5) * g * minus_i_power(two_s).value() * root_power(sqrt_upper(w), two_s);
}

cplx k_reduce_diagonal(const std::vector<AlphaSeries>& series, const UPointData& data, const ComplexEnergy& z) {
    const cplx w = z.value() - data.u;
    checked_root(z, data.u);
    cplx sum{0.0, 0.0};
    for (const auto& s : series)
        for (const auto& t : s.terms) {
            const double mom = angular_moment(t.kmono).convert_to<double>();
            if (mom == 0.0) continue;
            double f = 1.0;
            for (const auto& a : t.factors) f *= data.factor(a);
            // nu = 4 pi d/dz int d^3k/(2pi)^3, measure 1/(2 pi^2) after the angles
            const cplx rad = radial_k_integral(t.k_degree() / 2 + 1, s.n + 1, w);
            sum += I * (2.0 / pi) * double(-s.n) * mom * f * t.coeff.value() * rad;
        }
    return sum;
}

// ---------------------------------------------------------------- direct series

std::string PowerTerm::str() const {
    std::ostringstream os;
    os << coeff.str();
    for (const auto& f : factors) os << "*" << index_str(f);
    os << "*(z-u)^(" << two_s << "/2)";
    return os.str();
}

cplx DirectSeries::evaluate(const UPointData& data, const ComplexEnergy& z) const {
    const cplx root = checked_root(z, data.u);
    cplx sum{0.0, 0.0};
    for (const auto& t : terms) {
        double f = 1.0;
        for (const auto& a : t.factors) f *= data.factor(a);
        sum += t.coeff.value() * f * root_power(root, t.two_s);
    }
    return sum;
}

std::string DirectSeries::str() const {
    std::string s;
    for (const auto& t : terms) s += (s.empty() ? "" : " + ") + t.str();
    return s.empty() ? "0" : s;
}

namespace {

using PowerKey = std::pair<int, std::vector<MultiIndex>>;  // (-two_s, factors)

std::map<PowerKey, GaussRational> reduce_map(const std::vector<AlphaSeries>& series, int dim) {
    std::map<PowerKey, GaussRational> acc;
    for (const auto& s : series)
        for (const auto& t : s.terms) {
            GaussRational c;
            int two_s = 0;
            if (dim == 3) {
                const Rational mom = angular_moment(t.kmono);
                if (mom == 0) continue;
                auto [r, ts] = radial_exact(t.k_degree() / 2 + 1, s.n + 1);
                // i * 4pi/(2pi^2) * pi * (-n)
                c = GaussRational(0, 2 * -s.n) * GaussRational(mom) * r * t.coeff;
                two_s = ts;
            } else if (dim == 1) {
                if (t.kmono[0] % 2) continue;
                auto [r, ts] = radial_exact(t.kmono[0] / 2, s.n);
                // int dk/(2pi) over the line = (1/pi) int_0^inf
                c = r * t.coeff;
                two_s = ts;
            } else {
                throw DomainError("direct series: dim must be 1 or 3");
            }
            auto [it, fresh] = acc.try_emplace({-two_s, t.factors}, c);
            if (!fresh) {
                it->second += c;
                if (it->second.is_zero()) acc.erase(it);
            }
        }
    return acc;
}

DirectSeries from_map(const std::map<PowerKey, GaussRational>& m, int dim, const std::function<bool(const PowerKey&)>& keep) {
    DirectSeries s;
    s.dim = dim;
    for (const auto& [k, c] : m)
        if (keep(k)) s.terms.push_back({c, k.second, -k.first});
    return s;
}

int weight(const std::vector<MultiIndex>& fs) {
    int d = 0;
    for (const auto& f : fs) d += f[0] + f[1] + f[2];
    return d;
}

}  // namespace

DirectSeries reduce_series(const std::vector<AlphaSeries>& series, int dim) {
    return from_map(reduce_map(series, dim), dim, [](const PowerKey&) { return true; });
}

DirectSeries direct_series(int order, int dim) {
    if (order < 1) throw DomainError("direct_series: order must be >= 1");
    // a term with p = 1 + D + 2m needs n <= 1 + D + m <= p - 1
    const auto a = alpha_series(std::max(1, order - 1), dim);
    return from_map(reduce_map(a, dim), dim, [&](const PowerKey& k) { return k.first <= order; });
}

DirectSeries direct_series_by_weight(int max_weight, int dim) {
    if (max_weight < 0) throw DomainError("direct_series_by_weight: weight must be >= 0");
    const auto a = alpha_series(1 + 2 * max_weight, dim);
    return from_map(reduce_map(a, dim), dim, [&](const PowerKey& k) { return weight(k.second) <= max_weight; });
}

CoefficientTable coefficient_table(const DirectSeries& s) {
    std::map<PowerKey, GaussRational> have;
    for (const auto& t : s.terms)
        if (-t.two_s <= 7) have[{-t.two_s, t.factors}] = t.coeff;
    auto get = [&](int p, std::vector<MultiIndex> f) {
        auto it = have.find({p, f});
        return it == have.end() ? GaussRational() : it->second;
    };
    CoefficientTable tab;
    tab.lead = get(1, {});
    tab.laplacian = get(5, {{2, 0, 0}});
    tab.grad_sq = get(7, {{1, 0, 0}, {1, 0, 0}});
    tab.bilaplacian = get(7, {{4, 0, 0}});

    std::map<PowerKey, GaussRational> want;
    auto put = [&](int p, std::vector<MultiIndex> f, const GaussRational& c) {
        if (c.is_zero()) return;
        std::sort(f.begin(), f.end());
        auto [it, fresh] = want.try_emplace({p, f}, c);
        if (!fresh) it->second += c;
    };
    put(1, {}, tab.lead);
    for (int i = 0; i < 3; ++i) {
        put(5, {unit(i, 2)}, tab.laplacian);
        put(7, {unit(i), unit(i)}, tab.grad_sq);
        for (int j = 0; j < 3; ++j) {
            MultiIndex a = unit(i, 2);
            a[j] += 2;
            put(7, {a}, tab.bilaplacian);
        }
    }
    tab.complete = (have == want);
    return tab;
}

NuDirect nu_direct_series(const Field3D& u, const ComplexEnergy& z, const Vec3& r, int order) {
    if (order < 1 || order > 7) throw DomainError("nu_direct_series: order must be in [1, 7]");
    static std::map<int, DirectSeries> cache;
    static std::mutex mtx;
    const DirectSeries* sp = nullptr;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(order);
        if (it == cache.end()) it = cache.emplace(order, direct_series(order, 3)).first;
        sp = &it->second;
    }
    const DirectSeries& s = *sp;
    NuDirect out;
    out.i_nu = s.evaluate(UPointData::from_field(u, r, std::max(1, order - 3)), z);
    out.nu = -I * out.i_nu;
    static const CoefficientTable table = coefficient_table(direct_series(7, 3));
    out.table = table;
    return out;
}

// ---------------------------------------------------------------- 1D reduction

namespace {

// sum c w^(two_s/2) prod u_k^e_k, u_k = d^k u / dx^k, w = z - u
struct Mono {
    int two_s;
    std::vector<int> e;  // e[k-1]
    bool operator<(const Mono& o) const { return std::tie(two_s, e) < std::tie(o.two_s, o.e); }
    bool operator==(const Mono& o) const { return two_s == o.two_s && e == o.e; }
};

class Algebra {
public:
    explicit Algebra(int W) : W_(W) {}

    using Elem = std::map<Mono, GaussRational>;

    int weight(const Mono& m) const {
        int s = 0;
        for (std::size_t k = 0; k < m.e.size(); ++k) s += int(k + 1) * m.e[k];
        return s;
    }
    Mono mono(int two_s) const { return {two_s, std::vector<int>(W_ + 2, 0)}; }

    void add(Elem& a, const Mono& m, const GaussRational& c) const {
        if (c.is_zero() || weight(m) > W_ + 2) return;
        auto [it, fresh] = a.try_emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) a.erase(it);
        }
    }
    Elem sum(const Elem& a, const Elem& b, const GaussRational& sb = GaussRational(1)) const {
        Elem r = a;
        for (const auto& [m, c] : b) add(r, m, c * sb);
        return r;
    }
    Elem mul(const Elem& a, const Elem& b) const {
        Elem r;
        for (const auto& [ma, ca] : a)
            for (const auto& [mb, cb] : b) {
                Mono m = mono(ma.two_s + mb.two_s);
                for (std::size_t k = 0; k < m.e.size(); ++k) m.e[k] = ma.e[k] + mb.e[k];
                if (weight(m) <= W_) add(r, m, ca * cb);
            }
        return r;
    }
    Elem d(const Elem& a) const {
        Elem r;
        for (const auto& [m, c] : a) {
            // w^(s) -> s w^(s-1) (-u_1)
            if (m.two_s != 0) {
                Mono n = m;
                n.two_s -= 2;
                n.e[0] += 1;
                add(r, n, c * GaussRational(Rational(-m.two_s, 2)));
            }
            for (std::size_t k = 0; k + 1 < m.e.size(); ++k)
                if (m.e[k] > 0) {
                    Mono n = m;
                    n.e[k] -= 1;
                    n.e[k + 1] += 1;
                    add(r, n, c * GaussRational(m.e[k]));
                }
        }
        return r;
    }
    Elem truncate(const Elem& a) const {
        Elem r;
        for (const auto& [m, c] : a)
            if (weight(m) <= W_) r[m] = c;
        return r;
    }
    std::string str(const Mono& m, const GaussRational& c) const {
        std::ostringstream os;
        os << c.str() << "*w^(" << m.two_s << "/2)";
        for (std::size_t k = 0; k < m.e.size(); ++k)
            if (m.e[k]) os << "*u" << (k + 1) << "^" << m.e[k];
        return os.str();
    }

private:
    int W_;
};

}  // namespace

std::vector<std::string> verify_1d_reduction(int max_weight) {
    const Algebra A(max_weight);
    const DirectSeries s = direct_series_by_weight(max_weight, 1);
    Algebra::Elem n;
    for (const auto& t : s.terms) {
        Mono m = A.mono(t.two_s);
        for (const auto& f : t.factors) m.e[f[0] - 1] += 1;
        A.add(n, m, t.coeff);
    }
    const GaussRational lead = n.at(A.mono(-1));
    // delta = n / n0 - 1
    Algebra::Elem delta;
    for (const auto& [m, c] : n) {
        if (m == A.mono(-1)) continue;
        Mono q = m;
        q.two_s += 1;
        A.add(delta, q, c * inverse(lead));
    }
    delta = A.truncate(delta);
    // 1/(1 + delta)^2 = sum (j+1) (-delta)^j
    Algebra::Elem inv{{A.mono(0), GaussRational(1)}}, power = inv;
    for (int j = 1; j <= max_weight; ++j) {
        power = A.mul(power, delta);
        inv = A.sum(inv, power, GaussRational(j % 2 ? -(j + 1) : (j + 1)));
    }
    const Algebra::Elem dn = A.d(n), d2n = A.d(dn);
    Algebra::Elem bracket{{A.mono(0), GaussRational(1)}};
    bracket = A.sum(bracket, A.mul(dn, dn), GaussRational(-1));
    bracket = A.sum(bracket, A.mul(n, d2n), GaussRational(2));
    // -1/(4 n0^2) = -w / (4 lead^2)
    const GaussRational pre = GaussRational(Rational(-1, 4)) * inverse(lead * lead);
    Algebra::Elem rhs;
    for (const auto& [m, c] : A.mul(bracket, inv)) {
        Mono q = m;
        q.two_s += 2;
        A.add(rhs, q, c * pre);
    }
    A.add(rhs, A.mono(2), GaussRational(-1));  // minus (z - u)
    std::vector<std::string> out;
    for (const auto& [m, c] : A.truncate(rhs)) out.push_back(A.str(m, c));
    return out;
}

// ---------------------------------------------------------------- lattice

NuField3D::NuField3D(Vec3 origin, double h, std::array<int, 3> dims, std::vector<cplx> values)
    : origin_(origin), h_(h), dims_(dims), values_(std::move(values)) {
    if (!(h > 0.0)) throw DomainError("NuField3D: spacing must be positive");
    if (values_.size() != std::size_t(dims[0]) * dims[1] * dims[2])
        throw DomainError("NuField3D: value count does not match the lattice");
}

NuField3D NuField3D::sample(const std::function<cplx(const Vec3&)>& f, Vec3 origin, double h, std::array<int, 3> dims) {
    std::vector<cplx> v;
    v.reserve(std::size_t(dims[0]) * dims[1] * dims[2]);
    for (int i = 0; i < dims[0]; ++i)
        for (int j = 0; j < dims[1]; ++j)
            for (int k = 0; k < dims[2]; ++k)
                v.push_back(f({origin[0] + i * h, origin[1] + j * h, origin[2] + k * h}));
    return NuField3D(origin, h, dims, std::move(v));
}

Vec3 NuField3D::point(int i, int j, int k) const {
    return {origin_[0] + i * h_, origin_[1] + j * h_, origin_[2] + k * h_};
}

cplx NuField3D::at(int i, int j, int k) const {
    return values_[(std::size_t(i) * dims_[1] + j) * dims_[2] + k];
}

namespace {
// weights on offsets -2..2, times h^-order
constexpr double stencil[5][5] = {
    {0, 0, 1, 0, 0},
    {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12},
    {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12},
    {-0.5, 1, 0, -1, 0.5},
    {1, -4, 6, -4, 1},
};
}  // namespace

cplx NuField3D::derivative(int i, int j, int k, const MultiIndex& a) const {
    if (a[0] > 4 || a[1] > 4 || a[2] > 4 || a[0] < 0 || a[1] < 0 || a[2] < 0)
        throw DomainError("NuField3D: derivative order out of range");
    if (i < margin || j < margin || k < margin || i >= dims_[0] - margin || j >= dims_[1] - margin ||
        k >= dims_[2] - margin)
        throw DomainError("NuField3D: stencil leaves the lattice");
    cplx s{0.0, 0.0};
    for (int p = -2; p <= 2; ++p) {
        const double wp = stencil[a[0]][p + 2];
        if (wp == 0.0) continue;
        for (int q = -2; q <= 2; ++q) {
            const double wq = stencil[a[1]][q + 2];
            if (wq == 0.0) continue;
            for (int r = -2; r <= 2; ++r) {
                const double wr = stencil[a[2]][r + 2];
                if (wr == 0.0) continue;
                s += wp * wq * wr * at(i + p, j + q, k + r);
            }
        }
    }
    return s / std::pow(h_, a[0] + a[1] + a[2]);
}

InverseTerms inverse_terms(cplx nu, const std::map<MultiIndex, cplx>& d) {
    auto D = [&](std::initializer_list<int> idx) {
        MultiIndex a{0, 0, 0};
        for (int i : idx) a[i] += 1;
        return d.at(a);
    };
    cplx g[3], H[3][3], T[3][3][3];
    for (int i = 0; i < 3; ++i) {
        g[i] = D({i});
        for (int j = 0; j < 3; ++j) {
            H[i][j] = D({i, j});
            for (int k = 0; k < 3; ++k) T[i][j][k] = D({i, j, k});
        }
    }
    cplx lap = H[0][0] + H[1][1] + H[2][2];
    cplx g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];

    InverseTerms t;
    t.nu = nu;
    t.lead = -(1.0 - g2 + 2.0 * nu * lap) / (4.0 * nu * nu);

    cplx hh{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hh += H[i][j] * H[i][j];
    t.phi1 = (lap * lap - hh) / 6.0;

    cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                a += 3.0 * H[i][j] * H[i][j] * g[k] * g[k] + 2.0 * H[i][k] * H[j][k] * g[i] * g[j] -
                     4.0 * H[k][k] * H[i][j] * g[i] * g[j] - H[i][i] * H[j][j] * g[k] * g[k];
                b += 4.0 * H[k][k] * T[i][i][j] * g[j] - 2.0 * T[i][i][j] * H[j][k] * g[k] -
                     2.0 * T[i][j][k] * H[i][j] * g[k] - 2.0 * H[i][j] * H[j][k] * H[i][k] +
                     H[i][j] * H[i][j] * H[k][k] + H[i][i] * H[j][j] * H[k][k];
                c += 2.0 * D({i, i, j, j}) * H[k][k] - 2.0 * H[i][j] * D({i, j, k, k}) +
                     T[i][i][k] * T[j][j][k] - T[i][j][k] * T[i][j][k];
            }
    t.phi2 = a / 6.0 + nu * b / 3.0 + nu * nu * c / 6.0;
    return t;
}

InverseTerms inverse_terms(const NuField3D& f, int i, int j, int k) {
    std::map<MultiIndex, cplx> d;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            for (int c = 0; a + b + c <= 4; ++c)
                if (a + b + c > 0) d[{a, b, c}] = f.derivative(i, j, k, {a, b, c});
    return inverse_terms(f.at(i, j, k), d);
}

InverseResidual inverse_rhs(const NuField3D& field, const Field3D& u, const ComplexEnergy& z, double nu_floor) {
    const int m = NuField3D::margin;
    const auto& n = field.dims();
    InverseResidual out;
    for (int a = 0; a < 3; ++a) {
        out.dims[a] = n[a] - 2 * m;
        if (out.dims[a] < 1) throw DomainError("inverse_rhs: lattice too small for the stencils");
    }
    for (int i = m; i < n[0] - m; ++i)
        for (int j = m; j < n[1] - m; ++j)
            for (int k = m; k < n[2] - m; ++k) {
                const cplx nu = field.at(i, j, k);
                if (std::abs(nu) < nu_floor) {
                    out.residual.push_back(0.0);
                    out.phi1.push_back(0.0);
                    out.phi2.push_back(0.0);
                    out.masked.push_back(1);
                    ++out.masked_count;
                    continue;
                }
                const auto t = inverse_terms(field, i, j, k);
                const cplx res = t.rhs() - (z.value() - u(field.point(i, j, k)));
                out.residual.push_back(res);
                out.phi1.push_back(t.phi1);
                out.phi2.push_back(t.phi2);
                out.masked.push_back(0);
                out.max_residual = std::max(out.max_residual, std::abs(res));
                out.max_phi1 = std::max(out.max_phi1, std::abs(t.phi1));
                out.max_phi2 = std::max(out.max_phi2, std::abs(t.phi2));
            }
    return out;
}

}  // namespace greens
