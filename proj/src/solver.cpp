#include "sepbvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sepbvp/errors.hpp"
#include "sepbvp/hammerstein.hpp"

namespace sepbvp {

namespace {

bool oscillating(const std::vector<double>& d) {
    if (d.size() < 4) {
        return false;
    }
    const std::size_t n = d.size();
    const double a = d[n - 3] - d[n - 4];
    const double b = d[n - 2] - d[n - 3];
    const double c = d[n - 1] - d[n - 2];
    return (a > 0 && b < 0 && c > 0) || (a < 0 && b > 0 && c < 0);
}

}  // namespace

std::pair<double, double> bc_residual(const BoundaryParams& p, const GridFunction& u) {
    const double left = std::abs(p.alpha() * u.values().front() - p.beta() * u.derivatives().front());
    const double right = std::abs(p.gamma() * u.values().back() + p.delta() * u.derivatives().back());
    return {left, right};
}

Solution solve_picard(const ProblemSpec& spec, const GridFunction& u0, const PicardOptions& opt) {
    spec.validate();
    if (!(opt.relax > 0.0 && opt.relax <= 1.0)) {
        throw DomainError("relaxation must lie in (0,1]");
    }
    if (!(opt.tol > 0.0)) {
        throw DomainError("solver tolerance must be positive");
    }
    const double h = 1.0 / static_cast<double>(u0.size() - 1);
    const double slack = check_slack(spec.quad_tol, h);
    if (norm_c1(u0) > spec.radius + slack) {
        throw BallViolation("initial guess lies outside the ball");
    }

    Solution sol;
    double relax = opt.relax;
    GridFunction u = u0;
    GridFunction best = u0;
    double best_update = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < opt.max_iter; ++k) {
        const GridFunction tu = apply_T(spec, u);
        ++sol.iterations;
        GridFunction next = (1.0 - relax) * u + relax * tu;
        const double update = norm_c1(next - u);
        const double base = norm_c1(u);
        sol.update_norms.push_back(update);
        if (norm_c1(next) > spec.radius + slack) {
            std::ostringstream os;
            os << "Picard iterate " << sol.iterations << " left the ball: norm " << norm_c1(next) << " > R = "
               << spec.radius;
            throw BallViolation(os.str());
        }
        if (update < best_update) {
            best_update = update;
            best = next;
        }
        u = std::move(next);
        if (update <= opt.tol * (1.0 + base)) {
            sol.converged = true;
            break;
        }
        if (relax > 0.5 && oscillating(sol.update_norms)) {
            relax = 0.5;
        }
    }
    sol.relax_used = relax;
    sol.u = sol.converged ? u : best;
    sol.residual = residual(spec, sol.u);
    std::tie(sol.bc_residual_left, sol.bc_residual_right) = bc_residual(spec.params, sol.u);
    sol.norm = norm_c1(sol.u);
    // The residual is the certificate; a small update alone does not count.
    sol.converged = sol.converged && sol.residual <= opt.tol * (1.0 + sol.norm);
    sol.inside_ball = sol.norm <= spec.radius;
    for (const auto& cc : find_crossings(spec.nonlinearity, sol.u)) {
        sol.curve_crossings.push_back({cc.curve_id, cc.points.size()});
    }
    return sol;
}

}  // namespace sepbvp
