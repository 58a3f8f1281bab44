#pragma once

#include <string>
#include <utility>
#include <vector>

#include "greens/complex.hpp"

namespace greens {

/// One basis function xi^power, optionally times ln(xi/xi0).
struct BasisTerm {
    double power = 1.0;
    bool log = false;

    std::string label() const;
    cplx eval(double xi, cplx xi0) const;
};

namespace basis {
inline BasisTerm pow(double p) { return {p, false}; }
inline BasisTerm powlog(double p) { return {p, true}; }
}  // namespace basis

struct ExpansionFit {
    std::vector<BasisTerm> basis;
    std::vector<cplx> coeffs;
    double residual = 0.0;  // RMS misfit on the window
    double drift = 0.0;     // max coefficient change when refitting the lower half
    cplx xi0{0.0, 0.0};

    std::vector<std::string> labels() const;
    cplx coeff(const BasisTerm& t) const;
    cplx eval(double xi) const;
};

/// Least squares in the given basis, columns scaled to unit norm and solved
/// by pivoted QR. Throws RankDeficient when the basis cannot be separated
/// on the window.
ExpansionFit fit_expansion(const std::vector<std::pair<double, cplx>>& samples,
                           const std::vector<BasisTerm>& basis, cplx xi0 = {1.0, 0.0});

/// Geometric grid of n points on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int n);

}  // namespace greens
