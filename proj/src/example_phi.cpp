#include "sepbvp/example_phi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sepbvp/errors.hpp"

namespace sepbvp::phi_example {

namespace {

constexpr std::uint64_t kTableSize = 1u << 16;
constexpr double kMaxIndex = 9007199254740992.0;  // 2^53

std::uint64_t count_divisors(std::uint64_t n) {
    std::uint64_t count = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            count += (d * d == n) ? 1 : 2;
        }
    }
    return count;
}

const std::vector<std::uint32_t>& divisor_table() {
    // Sieve; built once, read-only afterwards.
    static const std::vector<std::uint32_t> table = [] {
        std::vector<std::uint32_t> d(kTableSize, 0);
        for (std::uint64_t i = 1; i < kTableSize; ++i) {
            for (std::uint64_t j = i; j < kTableSize; j += i) {
                ++d[j];
            }
        }
        return d;
    }();
    return table;
}

std::uint64_t checked_index(double x, double t, double u) {
    if (!(x < kMaxIndex)) {
        std::ostringstream os;
        os << "band index at (t, u) = (" << t << ", " << u << ") is not representable";
        throw DomainError(os.str());
    }
    return static_cast<std::uint64_t>(x);
}

bool in_i_band(double t, double u, std::uint64_t n) {
    const double r = std::sqrt(t);
    return n >= 1 && u >= 0.0 && static_cast<double>(n - 1) * r <= u && u < static_cast<double>(n) * r;
}

bool in_j_band(double t, double u, std::uint64_t n) {
    return n >= 1 && u >= -t && u < 0.0 && -t / static_cast<double>(n) <= u &&
           u < -t / static_cast<double>(n + 1);
}

}  // namespace

std::uint64_t phi(std::uint64_t n) {
    if (n < 1) {
        throw DomainError("phi is defined for n >= 1");
    }
    if (n == 1) {
        return 2;
    }
    if (n < kTableSize) {
        return divisor_table()[n];
    }
    return count_divisors(n);
}

std::uint64_t region_index(double t, double u) {
    if (!(t > 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "region_index needs t in (0,1], got " << t;
        throw DomainError(os.str());
    }
    if (!std::isfinite(u)) {
        throw DomainError("region_index needs a finite u");
    }
    if (u < -t) {
        return 1;
    }
    if (u < 0.0) {
        std::uint64_t n = checked_index(std::floor(t / -u), t, u);
        n = std::max<std::uint64_t>(n, 1);
        // floor() of a rounded quotient can be off by one; settle it with the defining inequalities.
        while (n > 1 && !(-t / static_cast<double>(n) <= u)) {
            --n;
        }
        while (!(u < -t / static_cast<double>(n + 1))) {
            ++n;
        }
        return n;
    }
    const double r = std::sqrt(t);
    std::uint64_t n = checked_index(std::floor(u / r), t, u) + 1;
    while (n > 1 && !(static_cast<double>(n - 1) * r <= u)) {
        --n;
    }
    while (!(u < static_cast<double>(n) * r)) {
        ++n;
    }
    return n;
}

double f_value(double lambda, double t, double u) {
    return -std::pow(static_cast<double>(phi(region_index(t, u))), lambda);
}

ProblemSpec build_problem(const PhiExample& ex, const BoundaryParams& params, double radius) {
    if (!(ex.lambda > 0.0 && ex.lambda < 1.0)) {
        throw DomainError("phi-example lambda must lie in (0,1)");
    }
    if (!(ex.epsilon > 0.0)) {
        throw DomainError("phi-example epsilon must be positive");
    }
    const double lambda = ex.lambda;

    ProblemSpec spec;
    spec.params = params;
    spec.weight = catalog::inv_sqrt_weight();
    spec.radius = radius;
    spec.nonlinearity.name = "phi-example";
    spec.nonlinearity.eval = [lambda](double t, double u) { return f_value(lambda, t, u); };
    spec.nonlinearity.local_bound = [lambda](double, double r) { return std::pow(std::max(2.0, r), lambda); };

    for (std::size_t k = 1; k <= ex.curve_count; ++k) {
        const double kd = static_cast<double>(k);
        DiscontinuityCurve up;
        up.id = "gamma_" + std::to_string(k);
        up.value = [kd](double t) { return kd * std::sqrt(t); };
        up.second_derivative = [kd](double t) { return -kd / (4.0 * t * std::sqrt(t)); };
        up.epsilon = ex.epsilon;
        up.kind_hint = CurveKind::Inviable;
        spec.nonlinearity.curves.push_back(std::move(up));

        DiscontinuityCurve down;
        down.id = "gamma_hat_" + std::to_string(k);
        down.value = [kd](double t) { return -t / (kd + 1.0); };
        down.second_derivative = [](double) { return 0.0; };
        down.epsilon = ex.epsilon;
        down.kind_hint = CurveKind::Inviable;
        spec.nonlinearity.curves.push_back(std::move(down));
    }
    return spec;
}

DecompositionReport measurable_decomposition(const GridFunction& u, const std::vector<double>& t_grid,
                                             double lambda) {
    DecompositionReport rep;
    for (double t : t_grid) {
        if (!(t > 0.0)) {
            continue;
        }
        const double y = grid_eval(u, t).value;
        const bool in_k = y < -t;
        const bool j_side = y >= -t && y < 0.0;
        const bool i_side = y >= 0.0;
        if (int(in_k) + int(j_side) + int(i_side) != 1) {
            rep.exhaustive_and_disjoint = false;
            continue;
        }

        BandEntry e{t, y, BandSet::K, 1, 0.0};
        if (!in_k) {
            const double r = std::sqrt(t);
            // Direct inversion of the band inequalities, independent of region_index.
            const double guess = i_side ? std::floor(y / r) + 1.0 : std::floor(t / -y);
            std::uint64_t n = static_cast<std::uint64_t>(std::max(1.0, guess));
            auto member = [&](std::uint64_t m) { return i_side ? in_i_band(t, y, m) : in_j_band(t, y, m); };
            if (!member(n)) {
                if (n > 1 && member(n - 1)) {
                    --n;
                } else if (member(n + 1)) {
                    ++n;
                } else {
                    rep.exhaustive_and_disjoint = false;
                    continue;
                }
            }
            if ((n > 1 && member(n - 1)) || member(n + 1)) {
                rep.exhaustive_and_disjoint = false;
            }
            e.set = i_side ? BandSet::I : BandSet::J;
            e.n = n;
        }
        e.f_from_set = -std::pow(static_cast<double>(phi(e.n)), lambda);
        if (e.n != region_index(t, y) || e.f_from_set != f_value(lambda, t, y)) {
            rep.consistent = false;
        }
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace sepbvp::phi_example
