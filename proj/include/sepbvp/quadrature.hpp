#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sepbvp {

/// An integrand on a subinterval of [0,1] with known trouble spots.
struct IntegrandSpec {
    std::function<double(double)> integrand;
    /// Points where the integrand (or a derivative) jumps. Entries outside the open
    /// integration interval are ignored; order and duplicates do not matter.
    std::vector<double> breakpoints;
    /// The integrand may blow up like (s - a)^(-1/2) at the left endpoint.
    bool singular_left = false;
    /// Absolute tolerance, must be positive.
    double tol = 1e-10;
};

/// Adaptive Gauss-Legendre quadrature (16-point panels, 8-point error estimate,
/// global bisection with a depth cap of 40). With singular_left the leftmost
/// segment is mapped through s = a + (c - a) tau^2.
///
/// Throws MaxDepthExceeded when the error estimate cannot be driven below tol and
/// NonFiniteIntegrand when a sample is NaN or infinite.
double integrate(const IntegrandSpec& spec, double a, double b);

namespace quad {

inline constexpr int kMaxDepth = 40;
inline constexpr int kOrderHigh = 16;
inline constexpr int kOrderLow = 8;

/// Gauss-Legendre nodes and weights on [-1,1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const Rule& gauss_legendre(int order);

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using VecIntegrand = std::function<Vec<N>(double)>;

/// Integrates N integrands at once over [a,b] split at the given breakpoints; the
/// error control uses the max-norm across components.
template <std::size_t N>
Vec<N> integrate_vec(const VecIntegrand<N>& f, double a, double b, std::span<const double> breakpoints,
                     bool singular_left, double tol);

extern template Vec<1> integrate_vec<1>(const VecIntegrand<1>&, double, double, std::span<const double>,
                                        bool, double);
extern template Vec<2> integrate_vec<2>(const VecIntegrand<2>&, double, double, std::span<const double>,
                                        bool, double);

}  // namespace quad

}  // namespace sepbvp
