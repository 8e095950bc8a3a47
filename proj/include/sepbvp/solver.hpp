#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sepbvp/model.hpp"

namespace sepbvp {

struct CrossingCount {
    std::string curve_id;
    std::size_t count = 0;
};

struct Solution {
    GridFunction u;
    double residual = 0.0;           ///< norm_c1(u - Tu), computed once at the end
    std::size_t iterations = 0;      ///< operator applications in the sweep
    double bc_residual_left = 0.0;
    double bc_residual_right = 0.0;
    double norm = 0.0;
    bool inside_ball = false;
    bool converged = false;
    double relax_used = 1.0;
    std::vector<double> update_norms;
    std::vector<CrossingCount> curve_crossings;
};

struct PicardOptions {
    double relax = 1.0;
    double tol = 1e-10;
    std::size_t max_iter = 200;
};

/// (|alpha u(0) - beta u'(0)|, |gamma u(1) + delta u'(1)|) from the end nodes.
std::pair<double, double> bc_residual(const BoundaryParams& params, const GridFunction& u);

/// Damped Picard sweep u <- (1 - relax) u + relax T u, stopped when the update is at most
/// tol (1 + norm_c1(u)); converged also requires the final residual to meet the same
/// bound. The relaxation drops to 0.5 when four successive update norms
/// alternate up and down. Without convergence the best iterate comes back with
/// converged == false. Throws BallViolation if an iterate leaves the ball.
Solution solve_picard(const ProblemSpec& spec, const GridFunction& u0, const PicardOptions& opt = {});

}  // namespace sepbvp
