#include "sepbvp/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sepbvp/errors.hpp"
#include "sepbvp/quadrature.hpp"

namespace sepbvp {

H1Result check_h1(const Weight& weight, double tol) {
    H1Result r;
    try {
        IntegrandSpec is{[&](double s) { return std::abs(weight.eval(s)); }, {}, weight.singular_left, tol};
        r.l1_norm = integrate(is, 0.0, 1.0);
        r.pass = std::isfinite(r.l1_norm);
        if (!r.pass) {
            r.message = "integral of |g| is not finite";
        }
    } catch (const QuadratureError& e) {
        r.pass = false;
        r.l1_norm = std::numeric_limits<double>::infinity();
        r.message = e.what();
    }
    return r;
}

bool endpoint_growth(std::span<const double> profile) {
    const std::size_t n = profile.size();
    const std::size_t k = std::max<std::size_t>(1, n / 10);
    if (n < 2 * k + 1) {
        return false;
    }
    auto max_of = [&](std::size_t lo, std::size_t hi) {
        return *std::max_element(profile.begin() + static_cast<std::ptrdiff_t>(lo),
                                 profile.begin() + static_cast<std::ptrdiff_t>(hi));
    };
    const double left = max_of(0, k);
    const double right = max_of(n - k, n);
    const double middle = max_of(k, n - k);
    const double margin = 1e-12 * std::max(1.0, std::abs(middle));
    return left > middle + margin || right > middle + margin;
}

HREstimate estimate_HR(const ProblemSpec& spec, double radius, const std::vector<double>& t_grid,
                       std::size_t u_samples, std::optional<BoundSource> source) {
    if (!(radius > 0.0)) {
        throw DomainError("H_R needs R > 0");
    }
    HREstimate est;
    est.t_grid = t_grid;
    const bool declared = spec.nonlinearity.local_bound && source.value_or(BoundSource::Declared) ==
                                                                 BoundSource::Declared;
    est.source = declared ? BoundSource::Declared : BoundSource::Empirical;
    est.profile.reserve(t_grid.size());
    for (double t : t_grid) {
        const double v = declared ? spec.nonlinearity.local_bound(t, radius)
                                  : sample_local_bound(spec.nonlinearity, t, radius, u_samples);
        est.profile.push_back(v);
        est.sup = std::max(est.sup, v);
    }
    est.uniformity_flag = endpoint_growth(est.profile);
    if (!declared) {
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double fine = sample_local_bound(spec.nonlinearity, t_grid[i], radius, 4 * u_samples - 3);
            est.refined_sup = std::max(est.refined_sup, fine);
            est.resolution_sensitive = est.resolution_sensitive || fine > est.profile[i] * (1.0 + 1e-12);
        }
    }
    return est;
}

H3Result check_h3(const BoundsReport& bounds, double hr_sup, double radius) {
    H3Result r;
    r.m1 = bounds.m1;
    r.m2 = bounds.m2;
    r.hr_sup = hr_sup;
    r.radius = radius;
    r.product = hr_sup * (bounds.m1 + bounds.m2);
    r.pass = r.product <= radius;
    return r;
}

int minimal_R_power(double m_total, double lambda) {
    if (!(m_total > 0.0) || !std::isfinite(m_total)) {
        throw DomainError("minimal_R_power needs a positive finite M1 + M2");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw DomainError("minimal_R_power needs lambda in (0,1)");
    }
    int r = 2;
    while (std::pow(static_cast<double>(r), 1.0 - lambda) < m_total) {
        ++r;
    }
    return r;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Viable:
            return "Viable";
        case Verdict::InviableLower:
            return "Inviable_lower";
        case Verdict::InviableUpper:
            return "Inviable_upper";
        case Verdict::Indeterminate:
            return "Indeterminate";
    }
    return "Indeterminate";
}

ClassificationResult classify_curve(const ProblemSpec& spec, const DiscontinuityCurve& curve,
                                    const ClassifyOptions& opt) {
    const double lo = std::max(curve.a, opt.t_min);
    const double hi = curve.b;
    if (!(hi > lo)) {
        throw DomainError("curve " + curve.id + " has nothing left after clipping at t_min");
    }
    if (opt.n_t < 2 || opt.n_y < 2) {
        throw DomainError("classification needs at least two samples per axis");
    }

    std::vector<double> ts;
    ts.reserve(2 * opt.n_t);
    for (std::size_t i = 0; i < opt.n_t; ++i) {
        ts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(opt.n_t - 1));
    }
    if (lo > 0.0 && lo < 0.01 * hi) {
        // Geometric samples resolve the layer next to a clipped singular endpoint.
        const double ratio = std::log(hi / lo);
        for (std::size_t i = 1; i + 1 < opt.n_t; ++i) {
            ts.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(opt.n_t - 1)));
        }
    }

    const auto& g = spec.weight.eval;
    const auto& f = spec.nonlinearity.eval;
    const double eps = curve.epsilon;
    double defect = 0.0;
    double min_upper = std::numeric_limits<double>::infinity();
    double min_lower = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        const double curvature = -curve.second_derivative(t);
        const double gv = curve.value(t);
        const double gw = g(t);
        defect = std::max(defect, std::abs(curvature - gw * f(t, gv)));
        for (std::size_t j = 0; j < opt.n_y; ++j) {
            const double y = gv - eps + 2.0 * eps * static_cast<double>(j) / static_cast<double>(opt.n_y - 1);
            const double rhs = gw * f(t, y);
            min_upper = std::min(min_upper, curvature - rhs);
            min_lower = std::min(min_lower, rhs - curvature);
        }
    }

    ClassificationResult r;
    r.curve_id = curve.id;
    r.viability_defect = defect;
    r.epsilon_used = eps;
    r.t_min_clip = lo;
    r.clipped_measure = lo - curve.a;
    r.n_t = opt.n_t;
    r.n_y = opt.n_y;
    if (defect <= opt.viability_tol) {
        r.verdict = Verdict::Viable;
    } else if (min_upper > 0.0) {
        r.verdict = Verdict::InviableUpper;
        r.psi_margin = min_upper;
    } else if (min_lower > 0.0) {
        r.verdict = Verdict::InviableLower;
        r.psi_margin = min_lower;
    }
    return r;
}

HypothesisReport certify(const ProblemSpec& spec, const BoundsReport& bounds, const ClassifyOptions& opt) {
    spec.validate();
    HypothesisReport rep;
    rep.h1 = check_h1(spec.weight, spec.quad_tol);

    auto t_grid = uniform_nodes(spec.grid_size);
    t_grid.front() = std::max(opt.t_min, std::numeric_limits<double>::min());
    const HREstimate empirical = estimate_HR(spec, spec.radius, t_grid, 2001, BoundSource::Empirical);
    rep.h2.empirical_sup = empirical.sup;
    rep.h2.uniformity_flag = empirical.uniformity_flag;
    rep.h2.refined_sup = empirical.refined_sup;
    rep.h2.resolution_sensitive = empirical.resolution_sensitive;
    if (spec.nonlinearity.local_bound) {
        const HREstimate declared = estimate_HR(spec, spec.radius, t_grid, 0, BoundSource::Declared);
        rep.h2.hr_sup = declared.sup;
        rep.h2.source = BoundSource::Declared;
        rep.h2.declared_bound_exceeded = empirical.sup > declared.sup * (1.0 + 1e-12);
    } else {
        rep.h2.hr_sup = empirical.sup;
        rep.h2.source = BoundSource::Empirical;
    }
    rep.h2.pass = std::isfinite(rep.h2.hr_sup);

    rep.h3 = check_h3(bounds, rep.h2.hr_sup, spec.radius);

    if (spec.nonlinearity.name == "phi-example") {
        rep.h4 = {"checked_by_decomposition",
                  "f(t,u(t)) is a countable sum of constants times indicators of preimages of Borel sets"};
    } else {
        rep.h4 = {"asserted", "piecewise continuous catalog nonlinearity"};
    }

    rep.h5_pass = true;
    for (const auto& c : spec.nonlinearity.curves) {
        rep.h5.push_back(classify_curve(spec, c, opt));
        rep.h5_pass = rep.h5_pass && rep.h5.back().verdict != Verdict::Indeterminate;
    }
    rep.overall = rep.h1.pass && rep.h2.pass && rep.h3.pass && rep.h5_pass;
    return rep;
}

namespace {

// Affine minimiser of |sum_r v_r d_r| subject to sum_r v_r = 1 over the offsets
// d_r = points[set[r]] - target. Solved as least squares in the differences d_r - d_0
// by modified Gram-Schmidt with one reorthogonalisation pass, which avoids squaring
// the conditioning through a Gram matrix. Returns false when the set is affinely
// dependent to working precision.
bool affine_minimiser(std::span<const double> target, const std::vector<std::vector<double>>& points,
                      const std::vector<std::size_t>& set, std::vector<double>& v) {
    const std::size_t k = set.size() - 1;
    const std::size_t dim = target.size();
    const auto& base = points[set[0]];
    std::vector<std::vector<double>> qcols(k, std::vector<double>(dim));
    std::vector<double> r(k * k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        auto& col = qcols[c];
        double norm0 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            col[d] = points[set[c + 1]][d] - base[d];
            norm0 += col[d] * col[d];
        }
        norm0 = std::sqrt(norm0);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < c; ++j) {
                double dot = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    dot += qcols[j][d] * col[d];
                }
                r[j * k + c] += dot;
                for (std::size_t d = 0; d < dim; ++d) {
                    col[d] -= dot * qcols[j][d];
                }
            }
        }
        double norm = 0.0;
        for (double x : col) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (!(norm > 1e-11 * norm0) || norm0 == 0.0) {
            return false;
        }
        r[c * k + c] = norm;
        for (double& x : col) {
            x /= norm;
        }
    }
    // Minimise |base - y + A c|: R c = -Q'(base - y).
    std::vector<double> rhs(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            dot += qcols[c][d] * (base[d] - target[d]);
        }
        rhs[c] = -dot;
    }
    std::vector<double> coef(k);
    for (std::size_t c = k; c-- > 0;) {
        double acc = rhs[c];
        for (std::size_t j = c + 1; j < k; ++j) {
            acc -= r[c * k + j] * coef[j];
        }
        coef[c] = acc / r[c * k + c];
    }
    v.assign(k + 1, 0.0);
    double first = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        v[c + 1] = coef[c];
        first -= coef[c];
    }
    v[0] = first;
    return true;
}

}  // namespace

HullProjection project_to_hull(std::span<const double> target, const std::vector<std::vector<double>>& points,
                               const HullOptions& opt, std::span<const double> warm_start) {
    const std::size_t m = points.size();
    if (m == 0) {
        throw DomainError("convex hull of an empty point set");
    }
    const std::size_t dim = target.size();
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw DomainError("hull points and target differ in dimension");
        }
    }

    // Gram matrix of the offsets d_i = p_i - y; the objective is w'Qw = |sum w_i d_i|^2.
    std::vector<double> q(m * m);
    double scale2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                acc += (points[i][k] - target[k]) * (points[j][k] - target[k]);
            }
            q[i * m + j] = q[j * m + i] = acc;
        }
        scale2 = std::max(scale2, q[i * m + i]);
    }
    auto distance_of = [&](const std::vector<double>& w) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double x = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (w[i] != 0.0) {
                    x += w[i] * (points[i][k] - target[k]);
                }
            }
            d2 += x * x;
        }
        return std::sqrt(d2);
    };

    HullProjection out;
    if (scale2 == 0.0) {
        // Every point coincides with the target.
        out.coeffs.assign(m, 0.0);
        out.coeffs[0] = 1.0;
        return out;
    }
    const double gap_target = opt.tol * scale2;

    std::vector<double> w(m, 0.0);
    std::vector<std::size_t> set;
    auto start_at_best_vertex = [&]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (q[i * m + i] < q[best * m + best]) {
                best = i;
            }
        }
        std::fill(w.begin(), w.end(), 0.0);
        w[best] = 1.0;
        set = {best};
    };
    if (warm_start.empty()) {
        start_at_best_vertex();
    } else {
        double sum = 0.0;
        for (std::size_t i = 0; i < std::min(m, warm_start.size()); ++i) {
            if (warm_start[i] > 0.0) {
                w[i] = warm_start[i];
                sum += w[i];
                set.push_back(i);
            }
        }
        if (!(sum > 0.0)) {
            throw DomainError("warm start is not a point of the simplex");
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            for (double& x : w) {
                x /= sum;
            }
        }
    }
    const std::vector<double> start = w;

    auto objective = [&](const std::vector<double>& x) {
        double acc = 0.0;
        for (std::size_t i : set) {
            for (std::size_t j : set) {
                acc += x[i] * q[i * m + j] * x[j];
            }
        }
        return acc;
    };

    // Moves w within the current set toward the affine minimiser, dropping indices whose
    // weight reaches zero, until the minimiser lies inside the simplex.
    auto corral = [&]() -> bool {
        std::vector<double> v;
        while (!set.empty()) {
            if (!affine_minimiser(target, points, set, v)) {
                return false;
            }
            if (std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; })) {
                for (std::size_t r = 0; r < set.size(); ++r) {
                    w[set[r]] = v[r];
                }
                return true;
            }
            double theta = 1.0;
            for (std::size_t r = 0; r < set.size(); ++r) {
                const double wi = w[set[r]];
                if (v[r] <= 0.0) {
                    theta = std::min(theta, wi - v[r] > 0.0 ? wi / (wi - v[r]) : 0.0);
                }
            }
            std::vector<std::size_t> kept;
            double sum = 0.0;
            for (std::size_t r = 0; r < set.size(); ++r) {
                const std::size_t i = set[r];
                w[i] += theta * (v[r] - w[i]);
                if (w[i] > 1e-15 && !(v[r] <= 0.0 && w[i] <= theta * 1e-15)) {
                    kept.push_back(i);
                    sum += w[i];
                } else {
                    w[i] = 0.0;
                }
            }
            if (kept.size() == set.size()) {
                // The blocking index sits exactly at zero weight in rounding; drop the smallest.
                auto smallest = std::min_element(kept.begin(), kept.end(),
                                                 [&](std::size_t x, std::size_t y) { return w[x] < w[y]; });
                sum -= w[*smallest];
                w[*smallest] = 0.0;
                kept.erase(smallest);
            }
            set = std::move(kept);
            for (std::size_t i : set) {
                w[i] /= sum;
            }
        }
        return false;
    };
    if (set.size() > 1 && !corral()) {
        start_at_best_vertex();
    }

    std::size_t it = 0;
    double gap = std::numeric_limits<double>::infinity();
    std::vector<double> g(m);
    for (; it < opt.max_iter; ++it) {
        double xx = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t j : set) {
                acc += q[i * m + j] * w[j];
            }
            g[i] = acc;
        }
        for (std::size_t i : set) {
            xx += w[i] * g[i];
        }
        const std::size_t j = static_cast<std::size_t>(std::min_element(g.begin(), g.end()) - g.begin());
        gap = 2.0 * (xx - g[j]);
        if (gap <= gap_target || std::find(set.begin(), set.end(), j) != set.end()) {
            // A minimising vertex already in the set means the gap is rounding noise.
            gap = std::max(gap, 0.0);
            break;
        }
        const std::vector<double> before = w;
        const auto set_before = set;
        set.push_back(j);
        w[j] = 0.0;
        if (!corral() || objective(w) >= xx) {
            // No further decrease is representable; keep the last iterate.
            w = before;
            set = set_before;
            break;
        }
    }

    out.distance = distance_of(w);
    if (const double d0 = distance_of(start); d0 < out.distance) {
        out.distance = d0;
        w = start;
    }
    out.coeffs = std::move(w);
    out.iterations = it;
    out.gap = gap;
    if (it >= opt.max_iter && gap > gap_target) {
        std::ostringstream os;
        os << "hull projection stopped after " << it << " iterations with gap " << gap;
        throw SolverStall(os.str());
    }
    return out;
}

GridFunction probe_perturbation(const GridFunction& u, double eps, std::size_t index) {
    if (index == 0) {
        return u;
    }
    const auto& t = u.nodes();
    std::vector<double> v(t.size(), 0.0);
    std::vector<double> d(t.size(), 0.0);
    double sign = 1.0;
    if (index <= 2) {
        std::fill(v.begin(), v.end(), 1.0);
        sign = index == 1 ? 1.0 : -1.0;
    } else {
        const std::size_t j = (index - 3) / 2 + 1;
        sign = ((index - 3) % 2 == 0) ? 1.0 : -1.0;
        // Van der Corput centres keep the family nested and spread over (0,1).
        double center = 0.0;
        double base = 0.5;
        for (std::size_t q = j; q > 0; q >>= 1, base *= 0.5) {
            if (q & 1u) {
                center += base;
            }
        }
        constexpr double width = 0.25;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double z = (t[i] - center) / width;
            if (std::abs(z) < 1.0) {
                const double th = 0.5 * std::numbers::pi * z;
                v[i] = std::cos(th) * std::cos(th);
                d[i] = -std::sin(2.0 * th) * 0.5 * std::numbers::pi / width;
            }
        }
    }
    GridFunction phi = GridFunction::on_nodes_of(u, std::move(v), std::move(d));
    const double n = norm_c1(phi);
    return u + (sign * eps / n) * phi;
}

ProbeResult convexification_probe(const ProblemSpec& spec, const GridFunction& u, double eps,
                                  std::size_t n_samples, const HullOptions& opt) {
    if (!(eps > 0.0)) {
        throw DomainError("probe radius eps must be positive");
    }
    if (n_samples < 1) {
        throw DomainError("probe needs at least one sample");
    }
    constexpr std::size_t kFamilyCap = 4096;
    const double scale = 1.0 / std::sqrt(static_cast<double>(u.size()));
    auto flatten = [scale](const GridFunction& w) {
        std::vector<double> out;
        out.reserve(2 * w.size());
        for (double x : w.values()) {
            out.push_back(scale * x);
        }
        for (double x : w.derivatives()) {
            out.push_back(scale * x);
        }
        return out;
    };

    ProbeResult res;
    std::vector<std::vector<double>> images;
    std::vector<GridFunction> images_grid;
    for (std::size_t idx = 0; images.size() < n_samples && idx < kFamilyCap; ++idx) {
        GridFunction ui = probe_perturbation(u, eps, idx);
        if (norm_c1(ui) > spec.radius) {
            ++res.skipped;
            continue;
        }
        images_grid.push_back(apply_T(spec, ui));
        images.push_back(flatten(images_grid.back()));
    }
    if (images.empty()) {
        throw BallViolation("no probe sample lies inside the ball");
    }
    const auto target = flatten(u);
    // Enrich one image at a time, each projection warm-started at the previous optimum,
    // so the distance for k samples is a prefix of the computation for k + 1. The first
    // image is T u when u is in the ball, which bounds the distance by the residual.
    HullProjection proj;
    std::vector<std::vector<double>> prefix;
    for (auto& image : images) {
        prefix.push_back(std::move(image));
        proj = project_to_hull(target, prefix, opt, proj.coeffs);
        res.distance_trace.push_back(proj.distance);
        res.iterations += proj.iterations;
    }

    std::vector<double> cv(u.size(), 0.0);
    std::vector<double> cd(u.size(), 0.0);
    for (std::size_t i = 0; i < images_grid.size(); ++i) {
        for (std::size_t k = 0; k < u.size(); ++k) {
            cv[k] += proj.coeffs[i] * images_grid[i].values()[k];
            cd[k] += proj.coeffs[i] * images_grid[i].derivatives()[k];
        }
    }
    res.hull_distance = proj.distance;
    res.c1_distance = norm_c1(u - GridFunction::on_nodes_of(u, std::move(cv), std::move(cd)));
    res.coeffs = proj.coeffs;
    res.samples_used = prefix.size();
    return res;
}

}  // namespace sepbvp
