#include "sepbvp/hammerstein.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <sstream>

#include "sepbvp/errors.hpp"
#include "sepbvp/quadrature.hpp"

namespace sepbvp {

namespace {

constexpr double kCrossingTol = 1e-12;
constexpr int kCrossingSubsamples = 4;

double bisect_crossing(const DiscontinuityCurve& c, const GridFunction& u, double lo, double hi, double dlo) {
    while (hi - lo > kCrossingTol) {
        const double mid = 0.5 * (lo + hi);
        const double dm = grid_eval(u, mid).value - c.value(mid);
        if ((dm > 0.0) == (dlo > 0.0) && dm != 0.0) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double grid_step(const GridFunction& u) {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        h = std::max(h, u.nodes()[i + 1] - u.nodes()[i]);
    }
    return h;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double& arg) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    if (f1 >= f2) {
        arg = x1;
        return f1;
    }
    arg = x2;
    return f2;
}

struct SupResult {
    double value;
    double arg;
};

SupResult grid_sup(const std::function<double(double)>& profile, std::size_t n) {
    const auto t = uniform_nodes(n);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = profile(t[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = t[best == 0 ? 0 : best - 1];
    const double hi = t[std::min(best + 1, n - 1)];
    double arg = t[best];
    const double refined = golden_max(profile, lo, hi, arg);
    if (refined > best_val) {
        return {refined, arg};
    }
    return {best_val, t[best]};
}

}  // namespace

std::vector<CurveCrossings> find_crossings(const Nonlinearity& f, const GridFunction& u) {
    std::vector<CurveCrossings> out;
    const auto& x = u.nodes();
    for (const auto& c : f.curves) {
        CurveCrossings cc{c.id, {}};
        for (std::size_t j = 0; j + 1 < x.size(); ++j) {
            const double lo = std::max(x[j], c.a);
            const double hi = std::min(x[j + 1], c.b);
            if (!(hi > lo)) {
                continue;
            }
            double prev_s = lo;
            double prev_d = 0.0;
            for (int k = 0; k <= kCrossingSubsamples; ++k) {
                const double s = lo + (hi - lo) * k / kCrossingSubsamples;
                const double d = grid_eval(u, s).value - c.value(s);
                if (d == 0.0) {
                    cc.points.push_back(s);
                } else if (k > 0 && prev_d != 0.0 && (d > 0.0) != (prev_d > 0.0)) {
                    cc.points.push_back(bisect_crossing(c, u, prev_s, s, prev_d));
                }
                prev_s = s;
                prev_d = d;
            }
        }
        std::sort(cc.points.begin(), cc.points.end());
        cc.points.erase(std::unique(cc.points.begin(), cc.points.end()), cc.points.end());
        out.push_back(std::move(cc));
    }
    return out;
}

double check_slack(double quad_tol, double h, double curvature) {
    return 10.0 * quad_tol + curvature * h * h;
}

GridFunction apply_T(const ProblemSpec& spec, const GridFunction& u) {
    spec.validate();
    const double norm = norm_c1(u);
    const double h = grid_step(u);
    if (norm > spec.radius + check_slack(spec.quad_tol, h)) {
        std::ostringstream os;
        os << "norm_c1(u) = " << norm << " exceeds R = " << spec.radius;
        throw BallViolation(os.str());
    }

    std::vector<double> crossings;
    for (const auto& cc : find_crossings(spec.nonlinearity, u)) {
        crossings.insert(crossings.end(), cc.points.begin(), cc.points.end());
    }
    std::sort(crossings.begin(), crossings.end());

    const auto& g = spec.weight.eval;
    const auto& f = spec.nonlinearity.eval;
    quad::VecIntegrand<2> moments = [&](double s) {
        const double w = g(s) * f(s, grid_eval(u, s).value);
        return quad::Vec<2>{w, s * w};
    };

    const auto& x = u.nodes();
    const std::size_t n = x.size();
    // cum0[i] = int_0^{t_i} g f ds, cum1[i] = int_0^{t_i} s g f ds
    std::vector<double> cum0(n, 0.0);
    std::vector<double> cum1(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const auto first = std::upper_bound(crossings.begin(), crossings.end(), x[j]);
        const auto last = std::lower_bound(first, crossings.end(), x[j + 1]);
        const auto bps = std::span<const double>(crossings)
                             .subspan(static_cast<std::size_t>(first - crossings.begin()),
                                      static_cast<std::size_t>(last - first));
        const bool singular = (j == 0) && spec.weight.singular_left;
        const auto part = quad::integrate_vec<2>(moments, x[j], x[j + 1], bps, singular,
                                                 spec.quad_tol * (x[j + 1] - x[j]));
        cum0[j + 1] = cum0[j] + part[0];
        cum1[j + 1] = cum1[j] + part[1];
    }

    const BoundaryParams& p = spec.params;
    const double al = p.alpha();
    const double be = p.beta();
    const double ga = p.gamma();
    const double de = p.delta();
    const double inv = 1.0 / p.gamma_const();
    const double total0 = cum0.back();
    const double total1 = cum1.back();
    std::vector<double> values(n);
    std::vector<double> derivs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i];
        // Left part uses k = (ga + de - ga t)(be + al s), right part (be + al t)(ga + de - ga s).
        const double left = be * cum0[i] + al * cum1[i];
        const double right = (ga + de) * (total0 - cum0[i]) - ga * (total1 - cum1[i]);
        values[i] = inv * ((ga + de - ga * t) * left + (be + al * t) * right);
        derivs[i] = inv * (-ga * left + al * right);
    }
    return GridFunction::on_nodes_of(u, std::move(values), std::move(derivs));
}

double residual(const ProblemSpec& spec, const GridFunction& u) {
    return norm_c1(u - apply_T(spec, u));
}

double m1_profile(const ProblemSpec& spec, double t) {
    const auto& g = spec.weight.eval;
    const BoundaryParams& p = spec.params;
    IntegrandSpec is{[&](double s) { return k_eval(p, t, s) * std::abs(g(s)); }, {t}, spec.weight.singular_left,
                     spec.quad_tol};
    return integrate(is, 0.0, 1.0);
}

double m2_profile(const ProblemSpec& spec, double t) {
    const auto& g = spec.weight.eval;
    const BoundaryParams& p = spec.params;
    IntegrandSpec is{[&](double s) { return std::abs(dk_dt(p, t, s)) * std::abs(g(s)); }, {t},
                     spec.weight.singular_left, spec.quad_tol};
    return integrate(is, 0.0, 1.0);
}

BoundsReport compute_bounds(const ProblemSpec& spec) {
    spec.validate();
    const auto s1 = grid_sup([&](double t) { return m1_profile(spec, t); }, spec.grid_size);
    const auto s2 = grid_sup([&](double t) { return m2_profile(spec, t); }, spec.grid_size);
    return {s1.value, s2.value, s1.arg, s2.arg, spec.quad_tol};
}

double sample_local_bound(const Nonlinearity& f, double t, double radius, std::size_t n_samples) {
    n_samples = std::max<std::size_t>(n_samples, 2);
    double best = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double y = -radius + 2.0 * radius * static_cast<double>(k) / static_cast<double>(n_samples - 1);
        best = std::max(best, std::abs(f.eval(t, y)));
    }
    for (const auto& c : f.curves) {
        if (!c.contains(t)) {
            continue;
        }
        const double gv = c.value(t);
        for (double y : {gv - 0.5 * c.epsilon, gv + 0.5 * c.epsilon}) {
            if (std::abs(y) <= radius) {
                best = std::max(best, std::abs(f.eval(t, y)));
            }
        }
    }
    return best;
}

double local_bound_at(const ProblemSpec& spec, double t) {
    if (spec.nonlinearity.local_bound) {
        return spec.nonlinearity.local_bound(t, spec.radius);
    }
    return sample_local_bound(spec.nonlinearity, t, spec.radius);
}

EquicontinuityReport equicontinuity_check(const ProblemSpec& spec, const GridFunction& u, double t_min,
                                          double curvature) {
    const GridFunction tu = apply_T(spec, u);
    const auto& x = tu.nodes();
    const auto& v = tu.values();
    EquicontinuityReport rep;
    rep.slack = check_slack(spec.quad_tol, grid_step(u), curvature);
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const double floor_t = spec.weight.singular_left ? std::max(t_min, 0.0) : t_min;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double lo = x[i - 1];
        const double hi = x[i + 1];
        if (lo < floor_t || (spec.weight.singular_left && lo <= 0.0)) {
            ++rep.skipped;
            continue;
        }
        const double hl = x[i] - lo;
        const double hr = hi - x[i];
        const double d2 = 2.0 * (hl * v[i + 1] - (hl + hr) * v[i] + hr * v[i - 1]) / (hl * hr * (hl + hr));
        double bound = 0.0;
        for (int k = 0; k <= 4; ++k) {
            const double t = lo + (hi - lo) * k / 4.0;
            bound = std::max(bound, std::abs(spec.weight.eval(t)) * local_bound_at(spec, t));
        }
        rep.nodes.push_back(x[i]);
        rep.second_diff.push_back(std::abs(d2));
        rep.bound.push_back(bound);
        rep.max_violation = std::max(rep.max_violation, std::abs(d2) - bound - rep.slack);
    }
    if (rep.nodes.empty()) {
        rep.max_violation = 0.0;
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

}  // namespace sepbvp
