#include "sepbvp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sepbvp/errors.hpp"

namespace sepbvp {

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values,
                           std::vector<double> derivatives)
    : nodes_(std::move(nodes)), values_(std::move(values)), derivatives_(std::move(derivatives)) {
    if (nodes_.size() < 2 || values_.size() != nodes_.size() || derivatives_.size() != nodes_.size()) {
        throw DomainError("grid function needs at least two nodes and matching value/derivative lengths");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
        throw DomainError("grid nodes must start at 0 and end at 1");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(values_[i]) || !std::isfinite(derivatives_[i])) {
            std::ostringstream os;
            os << "non-finite grid data at node " << i;
            throw DomainError(os.str());
        }
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
            throw DomainError("grid nodes must be strictly increasing");
        }
    }
}

std::vector<double> uniform_nodes(std::size_t n) {
    if (n < 2) {
        throw DomainError("a grid needs at least two nodes");
    }
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    }
    t.back() = 1.0;
    return t;
}

GridFunction GridFunction::zeros(std::size_t n) {
    return {uniform_nodes(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

GridFunction GridFunction::sample(std::size_t n, const std::function<double(double)>& u,
                                  const std::function<double(double)>& du) {
    auto t = uniform_nodes(n);
    std::vector<double> v(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = u(t[i]);
        d[i] = du(t[i]);
    }
    return {std::move(t), std::move(v), std::move(d)};
}

GridFunction GridFunction::on_nodes_of(const GridFunction& like, std::vector<double> values,
                                       std::vector<double> derivatives) {
    return {like.nodes_, std::move(values), std::move(derivatives)};
}

void GridFunction::require_same_nodes(const GridFunction& other) const {
    if (nodes_ != other.nodes_) {
        throw DomainError("grid functions live on different node sets");
    }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_nodes(other);
    for (std::size_t i = 0; i < size(); ++i) {
        values_[i] += other.values_[i];
        derivatives_[i] += other.derivatives_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_nodes(other);
    for (std::size_t i = 0; i < size(); ++i) {
        values_[i] -= other.values_[i];
        derivatives_[i] -= other.derivatives_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (std::size_t i = 0; i < size(); ++i) {
        values_[i] *= c;
        derivatives_[i] *= c;
    }
    return *this;
}

PointValue grid_eval(const GridFunction& u, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "grid_eval at t = " << t << " outside [0,1]";
        throw DomainError(os.str());
    }
    const auto& x = u.nodes();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (i + 1 >= x.size()) {
        i = x.size() - 2;
    }
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    if (s == 0.0) {
        return {u.values()[i], u.derivatives()[i]};
    }
    if (s == 1.0) {
        return {u.values()[i + 1], u.derivatives()[i + 1]};
    }
    const double y0 = u.values()[i];
    const double y1 = u.values()[i + 1];
    const double m0 = u.derivatives()[i] * h;
    const double m1 = u.derivatives()[i + 1] * h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    const double d00 = 6 * s2 - 6 * s;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = -6 * s2 + 6 * s;
    const double d11 = 3 * s2 - 2 * s;
    return {h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1, (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h};
}

double norm_c1(const GridFunction& u) {
    double mv = 0.0;
    double md = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mv = std::max(mv, std::abs(u.values()[i]));
        md = std::max(md, std::abs(u.derivatives()[i]));
    }
    return mv + md;
}

void ProblemSpec::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("ball radius R must be positive");
    }
    if (!(quad_tol > 0.0)) {
        throw DomainError("quad_tol must be positive");
    }
    if (grid_size < 3 || grid_size % 2 == 0) {
        throw DomainError("grid_size must be odd and at least 3");
    }
    if (!weight.eval) {
        throw DomainError("weight has no evaluator");
    }
    if (!nonlinearity.eval) {
        throw DomainError("nonlinearity has no evaluator");
    }
    for (const auto& c : nonlinearity.curves) {
        if (!(c.a >= 0.0 && c.a < c.b && c.b <= 1.0)) {
            throw DomainError("curve " + c.id + " has a domain outside [0,1]");
        }
        if (!(c.epsilon > 0.0)) {
            throw DomainError("curve " + c.id + " needs a positive tube half-width");
        }
    }
}

namespace catalog {

Weight constant_weight(double c) {
    return {"constant", [c](double) { return c; }, false, std::abs(c)};
}

Weight inv_sqrt_weight() {
    return {"inv-sqrt", [](double t) { return 1.0 / std::sqrt(t); }, true, 2.0};
}

Weight power_weight(double p) {
    std::optional<double> hint;
    if (p > -1.0) {
        hint = 1.0 / (p + 1.0);
    }
    return {"power", [p](double t) { return std::pow(t, p); }, p < 0.0, hint};
}

Nonlinearity constant(double c) {
    Nonlinearity f;
    f.name = "constant";
    f.eval = [c](double, double) { return c; };
    f.local_bound = [c](double, double) { return std::abs(c); };
    return f;
}

Nonlinearity polynomial(std::vector<double> coeffs) {
    Nonlinearity f;
    f.name = "polynomial";
    f.eval = [coeffs](double, double u) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            acc = acc * u + *it;
        }
        return acc;
    };
    f.local_bound = [coeffs](double, double r) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            acc = acc * r + std::abs(*it);
        }
        return acc;
    };
    return f;
}

Nonlinearity step(double threshold, double below, double above, double epsilon) {
    Nonlinearity f;
    f.name = "step";
    f.eval = [=](double, double u) { return u < threshold ? below : above; };
    f.local_bound = [=](double, double r) {
        const bool reach_below = -r < threshold;
        const bool reach_above = r >= threshold;
        double b = 0.0;
        if (reach_below) {
            b = std::max(b, std::abs(below));
        }
        if (reach_above) {
            b = std::max(b, std::abs(above));
        }
        return b;
    };
    DiscontinuityCurve c;
    c.id = "step";
    c.a = 0.0;
    c.b = 1.0;
    c.value = [threshold](double) { return threshold; };
    c.second_derivative = [](double) { return 0.0; };
    c.epsilon = epsilon;
    f.curves.push_back(std::move(c));
    return f;
}

Nonlinearity sine_forcing(double amplitude, double frequency) {
    Nonlinearity f;
    f.name = "sine-forcing";
    f.eval = [=](double t, double) { return amplitude * std::sin(frequency * std::numbers::pi * t); };
    f.local_bound = [=](double t, double) {
        return std::abs(amplitude * std::sin(frequency * std::numbers::pi * t));
    };
    return f;
}

}  // namespace catalog

}  // namespace sepbvp
