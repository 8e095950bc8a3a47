#pragma once

namespace sepbvp {

/// Coefficients of the separated boundary conditions
///   alpha u(0) - beta u'(0) = 0,   gamma u(1) + delta u'(1) = 0.
/// Instances are only obtainable through validate_params, so Gamma > 0 always holds.
class BoundaryParams {
public:
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    double delta() const noexcept { return delta_; }
    /// Gamma = gamma*beta + alpha*gamma + alpha*delta.
    double gamma_const() const noexcept { return gamma_const_; }

    static BoundaryParams dirichlet() noexcept { return {1.0, 0.0, 1.0, 0.0, 1.0}; }

    friend BoundaryParams validate_params(double alpha, double beta, double gamma, double delta);
    friend bool operator==(const BoundaryParams&, const BoundaryParams&) = default;

private:
    BoundaryParams(double a, double b, double g, double d, double gc) noexcept
        : alpha_(a), beta_(b), gamma_(g), delta_(d), gamma_const_(gc) {}

    double alpha_;
    double beta_;
    double gamma_;
    double delta_;
    double gamma_const_;
};

/// Throws NegativeCoefficient for negative (or NaN) inputs, DegenerateGamma when Gamma <= 0.
BoundaryParams validate_params(double alpha, double beta, double gamma, double delta);

/// Green's function k(t,s) of -u'' with the separated boundary conditions.
double k_eval(const BoundaryParams& p, double t, double s);

/// Partial derivative dk/dt. On the diagonal s == t the s <= t branch is used.
double dk_dt(const BoundaryParams& p, double t, double s);

/// Essential supremum of |dk/dt| over the unit square.
double dk_dt_bound(const BoundaryParams& p) noexcept;

}  // namespace sepbvp
