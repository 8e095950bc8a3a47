#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sepbvp/model.hpp"

namespace sepbvp {

/// Sup-over-t integrals controlling the size of Tu in the C^1 norm.
struct BoundsReport {
    double m1 = 0.0;           ///< sup_t int k(t,s) |g(s)| ds
    double m2 = 0.0;           ///< sup_t int |dk/dt(t,s)| |g(s)| ds
    double argmax_t_m1 = 0.0;
    double argmax_t_m2 = 0.0;
    double quad_tol = 0.0;
};

/// Points s where u(s) meets one of the declared curves.
struct CurveCrossings {
    std::string curve_id;
    std::vector<double> points;
};

/// Locates sign changes of u(s) - gamma(s) on every grid panel (subsampled four
/// times) and refines each by bisection to 1e-12 in s.
std::vector<CurveCrossings> find_crossings(const Nonlinearity& f, const GridFunction& u);

/// Slack used by every "<= bound" check: 10 quad_tol + C h^2.
double check_slack(double quad_tol, double h, double curvature = 1.0);

/// Tu at the nodes of u, values and derivatives, via cumulative moments
/// int_0^t s^j g(s) f(s,u(s)) ds over grid panels split at curve crossings.
/// Throws BallViolation when norm_c1(u) exceeds R by more than the check slack.
GridFunction apply_T(const ProblemSpec& spec, const GridFunction& u);

/// norm_c1(u - Tu).
double residual(const ProblemSpec& spec, const GridFunction& u);

/// int_0^1 k(t,s)|g(s)| ds at a single t.
double m1_profile(const ProblemSpec& spec, double t);
/// int_0^1 |dk/dt(t,s)| |g(s)| ds at a single t.
double m2_profile(const ProblemSpec& spec, double t);

/// M1 and M2: max over spec.grid_size uniform nodes, then golden-section search on
/// the two panels around the best node.
BoundsReport compute_bounds(const ProblemSpec& spec);

/// Empirical H_R(t): max |f(t,y)| over n_samples uniform y in [-R,R] plus y = gamma(t) +- eps/2
/// for every declared curve active at t.
double sample_local_bound(const Nonlinearity& f, double t, double radius, std::size_t n_samples = 2001);

/// H_R(t) from the declared local bound when present, otherwise sampled.
double local_bound_at(const ProblemSpec& spec, double t);

struct EquicontinuityReport {
    std::vector<double> nodes;          ///< interior nodes that were checked
    std::vector<double> second_diff;    ///< |(Tu)''| estimated by centered differences
    std::vector<double> bound;          ///< sup of |g| H_R over the stencil window
    double slack = 0.0;
    double max_violation = 0.0;         ///< max(second_diff - bound - slack), <= 0 means pass
    std::size_t skipped = 0;            ///< nodes whose stencil reaches below t_min
    bool pass = true;
};

/// Checks |(Tu)''| <= |g| H_R on interior nodes. A centered difference averages
/// (Tu)'' = -g f over [t_{i-1}, t_{i+1}], so the bound is the sampled window sup.
EquicontinuityReport equicontinuity_check(const ProblemSpec& spec, const GridFunction& u, double t_min = 0.0,
                                          double curvature = 1.0);

}  // namespace sepbvp
