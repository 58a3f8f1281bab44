#include "greens/ode.hpp"

namespace greens {

Ode2Solution integrate_ode2(std::function<cplx(double)> q, cplx y0, cplx dy0, double x0, double x1,
                            double tol, cplx log_scale0, double h_max) {
    if (!(tol > 0.0)) throw DomainError("integrate_ode2: tol must be positive");
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-3;
    opt.renormalize = true;
    opt.h_max = h_max;
    auto rhs = [q = std::move(q)](double x, const State<2>& y, State<2>& dy) {
        dy[0] = y[1];
        dy[1] = q(x) * y[0];
    };
    return Ode2Solution(integrate<2>(rhs, x0, State<2>{y0, dy0}, x1, opt, log_scale0));
}

}  // namespace greens
