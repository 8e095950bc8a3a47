#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepbvp/hammerstein.hpp"
#include "sepbvp/model.hpp"

namespace sepbvp {

struct H1Result {
    bool pass = false;
    double l1_norm = 0.0;
    std::string message;
};

/// int_0^1 |g|. A quadrature stall is reported as a failure, not thrown.
H1Result check_h1(const Weight& weight, double tol);

enum class BoundSource { Declared, Empirical };

struct HREstimate {
    std::vector<double> t_grid;
    std::vector<double> profile;
    double sup = 0.0;
    /// The profile keeps growing toward one end of t_grid (a warning, not a proof
    /// that H_R fails to be essentially bounded).
    bool uniformity_flag = false;
    BoundSource source = BoundSource::Empirical;
    /// Empirical only: sup again with four times the u samples, and whether the value
    /// grew at any t. Growth means the samples depend on u resolution, so sup is not a bound.
    double refined_sup = 0.0;
    bool resolution_sensitive = false;
};

/// Profile of H_R over t_grid. Uses the nonlinearity's declared local bound unless
/// source == Empirical is forced or no bound is declared.
HREstimate estimate_HR(const ProblemSpec& spec, double radius, const std::vector<double>& t_grid,
                       std::size_t u_samples = 2001, std::optional<BoundSource> source = std::nullopt);

/// True when the max over the outer tenth of the profile at either end exceeds the
/// max over the rest.
bool endpoint_growth(std::span<const double> profile);

struct H3Result {
    bool pass = false;
    double m1 = 0.0;
    double m2 = 0.0;
    double hr_sup = 0.0;
    double product = 0.0;
    double radius = 0.0;
};

/// ||H_R||_inf (M1 + M2) <= R.
H3Result check_h3(const BoundsReport& bounds, double hr_sup, double radius);

/// Smallest integer R >= 2 with R^(1 - lambda) >= m_total.
int minimal_R_power(double m_total, double lambda);

enum class Verdict { Viable, InviableLower, InviableUpper, Indeterminate };

std::string to_string(Verdict v);

struct ClassifyOptions {
    double t_min = 1e-6;
    std::size_t n_t = 257;
    std::size_t n_y = 33;
    double viability_tol = 1e-8;
};

struct ClassificationResult {
    std::string curve_id;
    Verdict verdict = Verdict::Indeterminate;
    /// Minimum sampled slack in the inviability inequality; 0 unless inviable.
    double psi_margin = 0.0;
    /// max_t |-gamma'' - g f(t, gamma)|.
    double viability_defect = 0.0;
    double epsilon_used = 0.0;
    double t_min_clip = 0.0;
    /// Length of the part of [a,b] excluded by the clip.
    double clipped_measure = 0.0;
    std::size_t n_t = 0;
    std::size_t n_y = 0;
};

/// Samples the viability equation and both inviability inequalities on
/// [max(a, t_min), b] x [gamma - eps, gamma + eps].
ClassificationResult classify_curve(const ProblemSpec& spec, const DiscontinuityCurve& curve,
                                    const ClassifyOptions& opt = {});

struct H2Result {
    bool pass = false;
    double hr_sup = 0.0;           ///< bound used for H3
    BoundSource source = BoundSource::Empirical;
    double empirical_sup = 0.0;    ///< sampled sup on the clipped grid, always reported
    bool uniformity_flag = false;
    double refined_sup = 0.0;
    bool resolution_sensitive = false;
    bool declared_bound_exceeded = false;
};

struct H4Result {
    std::string mode;   ///< "asserted" or "checked_by_decomposition"
    std::string note;
};

struct HypothesisReport {
    H1Result h1;
    H2Result h2;
    H3Result h3;
    H4Result h4;
    std::vector<ClassificationResult> h5;
    bool h5_pass = false;
    bool overall = false;
};

/// Runs H1-H5 for the problem at its own radius.
HypothesisReport certify(const ProblemSpec& spec, const BoundsReport& bounds, const ClassifyOptions& opt = {});

// --- convexification probe -------------------------------------------------

struct HullOptions {
    /// Stop when the Frank-Wolfe duality gap is at most tol * scale^2, scale the
    /// largest distance from the target to a point.
    double tol = 1e-14;
    std::size_t max_iter = 1000;
};

struct HullProjection {
    double distance = 0.0;
    std::vector<double> coeffs;
    std::size_t iterations = 0;
    double gap = 0.0;
};

/// Euclidean distance from target to the convex hull of points: simplex-constrained
/// least squares by fully corrective Frank-Wolfe (Wolfe's minimum-norm-point
/// iteration). Each step adds the Frank-Wolfe vertex and re-solves exactly over the
/// active vertices, so the objective never increases and the iteration terminates.
/// warm_start, when given, must be a point of the simplex (shorter vectors are zero
/// padded); the result is never farther than the warm start.
/// Throws SolverStall when the gap target is missed within max_iter steps.
HullProjection project_to_hull(std::span<const double> target, const std::vector<std::vector<double>>& points,
                               const HullOptions& opt = {}, std::span<const double> warm_start = {});

struct ProbeResult {
    /// sqrt(mean square value gap + mean square derivative gap) at the projection.
    double hull_distance = 0.0;
    /// norm_c1(u - sum lambda_i T u_i) at the same coefficients.
    double c1_distance = 0.0;
    std::vector<double> coeffs;
    /// Distance after each enrichment step; non-increasing.
    std::vector<double> distance_trace;
    std::size_t samples_used = 0;
    std::size_t skipped = 0;
    std::size_t iterations = 0;
};

/// Perturbation u_i = u + sign * eps * phi_j / norm_c1(phi_j), j running over the
/// constant 1 and cos^2 bumps; index 0 is u itself. The sequence is deterministic.
GridFunction probe_perturbation(const GridFunction& u, double eps, std::size_t index);

/// Finite-sample shadow of "u lies in the closed convex hull of T(B_eps(u))".
/// Samples that leave the ball of radius R are skipped.
ProbeResult convexification_probe(const ProblemSpec& spec, const GridFunction& u, double eps,
                                  std::size_t n_samples, const HullOptions& opt = {});

}  // namespace sepbvp
