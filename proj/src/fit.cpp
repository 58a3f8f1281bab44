#include "greens/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "greens/errors.hpp"

namespace greens {

std::string BasisTerm::label() const {
    std::ostringstream os;
    if (power == 0.0)
        os << "1";
    else if (power == 1.0)
        os << "xi";
    else
        os << "xi^" << power;
    if (log) os << " ln(xi/xi0)";
    return os.str();
}

cplx BasisTerm::eval(double xi, cplx xi0) const {
    const cplx v = power == 0.0 ? cplx{1.0, 0.0} : cplx{std::pow(xi, power), 0.0};
    return log ? v * std::log(cplx{xi, 0.0} / xi0) : v;
}

std::vector<std::string> ExpansionFit::labels() const {
    std::vector<std::string> out;
    for (const auto& b : basis) out.push_back(b.label());
    return out;
}

cplx ExpansionFit::coeff(const BasisTerm& t) const {
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i].power == t.power && basis[i].log == t.log) return coeffs[i];
    throw DomainError("ExpansionFit::coeff: basis term " + t.label() + " not in fit");
}

cplx ExpansionFit::eval(double xi) const {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < basis.size(); ++i) s += coeffs[i] * basis[i].eval(xi, xi0);
    return s;
}

namespace {

std::pair<std::vector<cplx>, double> solve(const std::vector<std::pair<double, cplx>>& samples,
                                           const std::vector<BasisTerm>& basis, cplx xi0) {
    const Eigen::Index m = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd A(m, n);
    Eigen::VectorXcd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        b(i) = samples[i].second;
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = basis[j].eval(samples[i].first, xi0);
    }
    Eigen::VectorXd scale(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        scale(j) = A.col(j).norm();
        if (scale(j) == 0.0) throw RankDeficient("fit_expansion", "basis column vanishes on window");
        A.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(1e-9);
    if (qr.rank() < n)
        throw RankDeficient("fit_expansion", "basis not separable on the fit window");
    Eigen::VectorXcd x = qr.solve(b);
    const double res = (A * x - b).norm() / std::sqrt(double(m));
    std::vector<cplx> c(n);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = x(j) / scale(j);
    return {c, res};
}

}  // namespace

ExpansionFit fit_expansion(const std::vector<std::pair<double, cplx>>& samples,
                           const std::vector<BasisTerm>& basis, cplx xi0) {
    if (basis.empty()) throw DomainError("fit_expansion: empty basis");
    if (samples.size() < 2 * basis.size())
        throw DomainError("fit_expansion: need at least twice as many samples as basis terms");
    for (const auto& s : samples)
        if (!(s.first > 0.0)) throw DomainError("fit_expansion: sample abscissae must be positive");

    ExpansionFit fit;
    fit.basis = basis;
    fit.xi0 = xi0;
    std::tie(fit.coeffs, fit.residual) = solve(samples, basis, xi0);

    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    sorted.resize(sorted.size() / 2);
    fit.drift = std::nan("");
    if (sorted.size() >= basis.size() + 1) {
        try {
            const auto half = solve(sorted, basis, xi0).first;
            double d = 0.0;
            for (std::size_t j = 0; j < half.size(); ++j)
                d = std::max(d, std::abs(half[j] - fit.coeffs[j]));
            fit.drift = d;
        } catch (const RankDeficient&) {
        }
    }
    return fit;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("geometric_grid: bad arguments");
    std::vector<double> g(n);
    const double r = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i);
    g.back() = hi;
    return g;
}

}  // namespace greens
