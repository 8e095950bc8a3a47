#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sepbvp/model.hpp"

namespace sepbvp::phi_example {

/// Number of divisors of n, except phi(1) = 2. Always >= 2.
/// Throws DomainError for n < 1.
std::uint64_t phi(std::uint64_t n);

/// Index n(t,u) of the band containing u at time t:
///   1                           if u < -t,
///   n with -t/n <= u < -t/(n+1) if -t <= u < 0,
///   floor(u / sqrt(t)) + 1      if u >= 0.
/// Throws DomainError for t <= 0 (or t > 1), and when the index is not representable.
std::uint64_t region_index(double t, double u);

struct PhiExample {
    double lambda = 1.0 / 3.0;
    std::size_t curve_count = 8;
    double epsilon = 0.05;
};

/// f(t,u) = -phi(n(t,u))^lambda.
double f_value(double lambda, double t, double u);

/// u'' = phi^lambda(n(t,u)) / sqrt(t) written as u'' + g f = 0 with g = t^(-1/2) and
/// f = -phi^lambda(n). Declares the curves k sqrt(t) ("gamma_k") and -t/(k+1)
/// ("gamma_hat_k") for k = 1..curve_count, and the local bound max{2,R}^lambda.
ProblemSpec build_problem(const PhiExample& ex, const BoundaryParams& params, double radius);

enum class BandSet { I, J, K };

struct BandEntry {
    double t;
    double u;
    BandSet set;
    std::uint64_t n;     ///< band index (1 for K)
    double f_from_set;   ///< -phi(n)^lambda rebuilt from the set membership
};

struct DecompositionReport {
    std::vector<BandEntry> entries;
    /// Every t fell into exactly one of I_n, J_n, K.
    bool exhaustive_and_disjoint = true;
    /// The set index agrees with region_index and the rebuilt f matches f_value.
    bool consistent = true;
};

/// Splits the sampled times into the preimages I_n = u^{-1}([(n-1)sqrt t, n sqrt t)),
/// J_n = u^{-1}([-t/n, -t/(n+1))) and K = u^{-1}((-inf, -t)), with u read through
/// grid_eval. Times t <= 0 are skipped.
DecompositionReport measurable_decomposition(const GridFunction& u, const std::vector<double>& t_grid,
                                             double lambda = 1.0 / 3.0);

}  // namespace sepbvp::phi_example
