#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "greens/complex.hpp"

namespace greens {

struct QuadResult {
    cplx value{0.0, 0.0};
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

using CFunc = std::function<cplx(double)>;

/// Fixed 15-point Gauss-Kronrod rule on [a, b] with the embedded 7-point
/// Gauss estimate as error.
QuadResult gauss_kronrod15(const CFunc& f, double a, double b);

/// Globally adaptive bisection with G7K15 panels. `breakpoints` are
/// forced panel edges inside (a, b). Stops when the summed error falls
/// below max(abs_tol, rel_tol * |I|); otherwise `converged` is false.
QuadResult integrate_adaptive(const CFunc& f, double a, double b, double abs_tol, double rel_tol,
                              const std::vector<double>& breakpoints = {},
                              std::size_t max_panels = 4000);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Wynn epsilon acceleration of a sequence of partial sums. Returns the
/// extrapolated limit and the difference of the last two estimates.
std::pair<cplx, double> wynn_epsilon(const std::vector<cplx>& partial_sums);

/// Integral of f over [a, inf) by adaptive panels of width `period`
/// summed and accelerated with Wynn epsilon. Suited to integrands that are
/// slowly decaying and oscillate with roughly that period.
QuadResult integrate_oscillatory_tail(const CFunc& f, double a, double period, double abs_tol,
                                      double rel_tol, int max_panels = 400);

}  // namespace greens
