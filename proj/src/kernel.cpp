#include "sepbvp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sepbvp/errors.hpp"

namespace sepbvp {

namespace {

void require_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(name) + " = " + std::to_string(x) + " outside [0,1]");
    }
}

}  // namespace

BoundaryParams validate_params(double alpha, double beta, double gamma, double delta) {
    const double coeffs[] = {alpha, beta, gamma, delta};
    const char* names[] = {"alpha", "beta", "gamma", "delta"};
    for (int i = 0; i < 4; ++i) {
        if (!(coeffs[i] >= 0.0) || !std::isfinite(coeffs[i])) {
            throw NegativeCoefficient(std::string(names[i]) + " must be a finite non-negative number");
        }
    }
    const double gc = gamma * beta + alpha * gamma + alpha * delta;
    if (!(gc > 0.0)) {
        throw DegenerateGamma("gamma*beta + alpha*gamma + alpha*delta must be positive");
    }
    return BoundaryParams(alpha, beta, gamma, delta, gc);
}

double k_eval(const BoundaryParams& p, double t, double s) {
    require_unit(t, "t");
    require_unit(s, "s");
    // Both branches are (gamma + delta - gamma*max)(beta + alpha*min) / Gamma,
    // which makes the symmetry k(t,s) == k(s,t) exact in floating point.
    const double lo = std::min(t, s);
    const double hi = std::max(t, s);
    return (p.gamma() + p.delta() - p.gamma() * hi) * (p.beta() + p.alpha() * lo) / p.gamma_const();
}

double dk_dt(const BoundaryParams& p, double t, double s) {
    require_unit(t, "t");
    require_unit(s, "s");
    if (s <= t) {
        return -p.gamma() * (p.beta() + p.alpha() * s) / p.gamma_const();
    }
    return p.alpha() * (p.gamma() + p.delta() - p.gamma() * s) / p.gamma_const();
}

double dk_dt_bound(const BoundaryParams& p) noexcept {
    return std::max(p.gamma() * (p.beta() + p.alpha()), p.alpha() * (p.gamma() + p.delta())) /
           p.gamma_const();
}

}  // namespace sepbvp
