#include "sepbvp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sepbvp/errors.hpp"

namespace sepbvp {

namespace quad {

namespace {

Rule build_rule(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

template <std::size_t N>
struct Panel {
    double a;
    double b;
    int depth;
    Vec<N> value;
    double err;
};

template <std::size_t N>
struct PanelOrder {
    bool operator()(const Panel<N>& x, const Panel<N>& y) const { return x.err < y.err; }
};

template <std::size_t N>
double max_abs(const Vec<N>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

template <std::size_t N>
Panel<N> eval_panel(const VecIntegrand<N>& f, double a, double b, int depth) {
    const Rule& hi = gauss_legendre(kOrderHigh);
    const Rule& lo = gauss_legendre(kOrderLow);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Vec<N> qh{};
    Vec<N> ql{};
    auto sample = [&](double x) {
        const Vec<N> v = f(mid + half * x);
        for (double c : v) {
            if (!std::isfinite(c)) {
                std::ostringstream os;
                os << "integrand is not finite at s = " << (mid + half * x);
                throw NonFiniteIntegrand(os.str());
            }
        }
        return v;
    };
    for (int i = 0; i < kOrderHigh; ++i) {
        const Vec<N> v = sample(hi.nodes[i]);
        for (std::size_t c = 0; c < N; ++c) {
            qh[c] += hi.weights[i] * v[c];
        }
    }
    for (int i = 0; i < kOrderLow; ++i) {
        const Vec<N> v = sample(lo.nodes[i]);
        for (std::size_t c = 0; c < N; ++c) {
            ql[c] += lo.weights[i] * v[c];
        }
    }
    Vec<N> diff{};
    for (std::size_t c = 0; c < N; ++c) {
        qh[c] *= half;
        ql[c] *= half;
        diff[c] = qh[c] - ql[c];
    }
    return {a, b, depth, qh, max_abs(diff)};
}

template <std::size_t N>
Vec<N> adaptive(const VecIntegrand<N>& f, double a, double b, double tol,
                const std::function<double(double)>& to_s) {
    constexpr std::size_t kMaxPanels = 1u << 18;
    const PanelOrder<N> order;
    std::vector<Panel<N>> heap{eval_panel(f, a, b, 0)};
    double total_err = heap.front().err;
    double total_abs = max_abs(heap.front().value);

    auto resum = [&]() {
        total_err = 0.0;
        total_abs = 0.0;
        for (const auto& p : heap) {
            total_err += p.err;
            total_abs += max_abs(p.value);
        }
    };

    // The roundoff floor keeps tiny tolerances on large results from looping forever.
    while (total_err > std::max(tol, 64.0 * std::numeric_limits<double>::epsilon() * total_abs)) {
        const Panel<N>& worst = heap.front();
        if (worst.depth >= kMaxDepth || heap.size() >= kMaxPanels) {
            std::ostringstream os;
            os << "adaptive quadrature on [" << to_s(a) << ", " << to_s(b) << "] stalled near s = "
               << to_s(0.5 * (worst.a + worst.b)) << " (error estimate " << total_err << ", tol " << tol << ")";
            throw MaxDepthExceeded(os.str());
        }
        std::pop_heap(heap.begin(), heap.end(), order);
        const Panel<N> parent = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (parent.a + parent.b);
        for (Panel<N> child : {eval_panel(f, parent.a, mid, parent.depth + 1),
                               eval_panel(f, mid, parent.b, parent.depth + 1)}) {
            total_err += child.err;
            total_abs += max_abs(child.value);
            heap.push_back(child);
            std::push_heap(heap.begin(), heap.end(), order);
        }
        total_err -= parent.err;
        total_abs -= max_abs(parent.value);
        if (heap.size() % 64 == 0) {
            resum();
        }
    }
    // Sum smallest contributions first.
    std::sort(heap.begin(), heap.end(),
              [](const Panel<N>& x, const Panel<N>& y) { return max_abs(x.value) < max_abs(y.value); });
    Vec<N> result{};
    for (const auto& p : heap) {
        for (std::size_t c = 0; c < N; ++c) {
            result[c] += p.value[c];
        }
    }
    return result;
}

}  // namespace

const Rule& gauss_legendre(int order) {
    static const Rule r16 = build_rule(16);
    static const Rule r8 = build_rule(8);
    if (order == 16) {
        return r16;
    }
    if (order == 8) {
        return r8;
    }
    throw DomainError("only 8- and 16-point Gauss-Legendre rules are tabulated");
}

template <std::size_t N>
Vec<N> integrate_vec(const VecIntegrand<N>& f, double a, double b, std::span<const double> breakpoints,
                     bool singular_left, double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("quadrature tolerance must be positive");
    }
    if (!(a >= 0.0 && a <= b && b <= 1.0)) {
        std::ostringstream os;
        os << "integration interval [" << a << ", " << b << "] is not inside [0,1]";
        throw DomainError(os.str());
    }
    Vec<N> total{};
    if (a == b) {
        return total;
    }
    std::vector<double> cuts;
    cuts.reserve(breakpoints.size() + 2);
    cuts.push_back(a);
    for (double c : breakpoints) {
        if (c > a && c < b) {
            cuts.push_back(c);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double length = b - a;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        const double seg_tol = tol * (hi - lo) / length;
        Vec<N> part;
        if (i == 0 && singular_left) {
            const double w = hi - lo;
            VecIntegrand<N> mapped = [&f, lo, w](double tau) {
                Vec<N> v = f(lo + w * tau * tau);
                const double jac = 2.0 * w * tau;
                for (double& c : v) {
                    c *= jac;
                }
                return v;
            };
            part = adaptive<N>(mapped, 0.0, 1.0, seg_tol, [lo, w](double tau) { return lo + w * tau * tau; });
        } else {
            part = adaptive<N>(f, lo, hi, seg_tol, [](double s) { return s; });
        }
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += part[c];
        }
    }
    return total;
}

template Vec<1> integrate_vec<1>(const VecIntegrand<1>&, double, double, std::span<const double>, bool,
                                 double);
template Vec<2> integrate_vec<2>(const VecIntegrand<2>&, double, double, std::span<const double>, bool,
                                 double);

}  // namespace quad

double integrate(const IntegrandSpec& spec, double a, double b) {
    if (!spec.integrand) {
        throw DomainError("integrand is empty");
    }
    const auto& h = spec.integrand;
    quad::VecIntegrand<1> f = [&h](double s) { return quad::Vec<1>{h(s)}; };
    return quad::integrate_vec<1>(f, a, b, spec.breakpoints, spec.singular_left, spec.tol)[0];
}

}  // namespace sepbvp
