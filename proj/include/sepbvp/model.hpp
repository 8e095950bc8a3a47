#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepbvp/kernel.hpp"

namespace sepbvp {

/// The weight g. eval must be finite on (0,1], and also at 0 unless singular_left.
struct Weight {
    std::string name;
    std::function<double(double)> eval;
    /// g behaves like t^(-1/2) at t = 0.
    bool singular_left = false;
    std::optional<double> l1_bound_hint;
};

enum class CurveKind { Viable, Inviable };

/// A curve t -> gamma(t) on [a,b] along which f(t, .) may jump.
struct DiscontinuityCurve {
    std::string id;
    double a = 0.0;
    double b = 1.0;
    std::function<double(double)> value;
    std::function<double(double)> second_derivative;
    /// Half-width of the tube used when classifying the curve.
    double epsilon = 0.05;
    std::optional<CurveKind> kind_hint;

    bool contains(double t) const noexcept { return t >= a && t <= b; }
};

/// The nonlinearity f(t,u) together with its declared discontinuity structure.
struct Nonlinearity {
    std::string name;
    std::function<double(double, double)> eval;
    std::vector<DiscontinuityCurve> curves;
    /// (t, R) -> H_R(t). Empty means H_R is estimated by sampling.
    std::function<double(double, double)> local_bound;
};

/// Node values and derivative values of a C^1 function on a grid of [0,1].
class GridFunction {
public:
    GridFunction() = default;
    /// Throws DomainError on length mismatch, non-increasing nodes, nodes not
    /// spanning [0,1] or non-finite entries.
    GridFunction(std::vector<double> nodes, std::vector<double> values, std::vector<double> derivatives);

    /// Uniform grid with n nodes and all entries zero.
    static GridFunction zeros(std::size_t n);
    /// Samples u and u' at n uniform nodes.
    static GridFunction sample(std::size_t n, const std::function<double(double)>& u,
                               const std::function<double(double)>& du);
    /// Same node set as `like`, new data.
    static GridFunction on_nodes_of(const GridFunction& like, std::vector<double> values,
                                    std::vector<double> derivatives);

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& derivatives() const noexcept { return derivatives_; }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);

    friend GridFunction operator+(GridFunction x, const GridFunction& y) { return x += y; }
    friend GridFunction operator-(GridFunction x, const GridFunction& y) { return x -= y; }
    friend GridFunction operator*(double c, GridFunction x) { return x *= c; }

private:
    void require_same_nodes(const GridFunction& other) const;

    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> derivatives_;
};

struct PointValue {
    double value;
    double derivative;
};

/// Cubic Hermite interpolation of (u, u') on the panel containing t.
PointValue grid_eval(const GridFunction& u, double t);

/// max_i |u_i| + max_i |u'_i|.
double norm_c1(const GridFunction& u);

/// Uniformly spaced nodes 0 = t_0 < ... < t_{n-1} = 1.
std::vector<double> uniform_nodes(std::size_t n);

/// The boundary value problem u'' + g(t) f(t,u) = 0 with separated BCs, posed in the
/// closed ball of radius R of C^1[0,1].
struct ProblemSpec {
    BoundaryParams params = BoundaryParams::dirichlet();
    Weight weight;
    Nonlinearity nonlinearity;
    double radius = 1.0;
    double quad_tol = 1e-10;
    std::size_t grid_size = 129;

    /// Throws DomainError unless radius > 0, quad_tol > 0, grid_size odd and >= 3,
    /// and both weight and nonlinearity are callable.
    void validate() const;
};

/// Built-in weights and nonlinearities addressable by name from config files.
namespace catalog {

Weight constant_weight(double c);
/// g(t) = t^(-1/2).
Weight inv_sqrt_weight();
/// g(t) = t^p. Flagged singular at 0 when p < 0.
Weight power_weight(double p);

Nonlinearity constant(double c);
/// f(t,u) = sum_k coeffs[k] u^k.
Nonlinearity polynomial(std::vector<double> coeffs);
/// f(t,u) = below for u < threshold, above otherwise; declares the curve gamma == threshold.
Nonlinearity step(double threshold, double below, double above, double epsilon);
/// f(t,u) = amplitude * sin(frequency * pi * t).
Nonlinearity sine_forcing(double amplitude, double frequency);

}  // namespace catalog

}  // namespace sepbvp
