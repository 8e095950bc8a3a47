#include "sepbvp/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

#include "sepbvp/errors.hpp"
#include "sepbvp/example_phi.hpp"
#include "sepbvp/hammerstein.hpp"
#include "sepbvp/hypotheses.hpp"
#include "sepbvp/solver.hpp"

namespace sepbvp {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(path + "." + key, "missing required field");
    }
    return obj.at(key);
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "expected a finite number");
    }
    return x;
}

double positive_at(const json& v, const std::string& path) {
    const double x = number_at(v, path);
    if (!(x > 0.0)) {
        throw ConfigError(path, "must be positive");
    }
    return x;
}

std::size_t count_at(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw ConfigError(path, "expected a positive integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

double param_or(const CatalogRef& ref, const std::string& key, double fallback, const std::string& path) {
    if (!ref.params.contains(key)) {
        return fallback;
    }
    return number_at(ref.params.at(key), path + "." + key);
}

CatalogRef parse_ref(const json& v, const std::string& path) {
    CatalogRef r;
    if (v.is_string()) {
        r.id = v.get<std::string>();
        return r;
    }
    if (!v.is_object()) {
        throw ConfigError(path, "expected a catalog id or an object with an \"id\" field");
    }
    const json& id = require(v, "id", path);
    if (!id.is_string()) {
        throw ConfigError(path + ".id", "expected a string");
    }
    r.id = id.get<std::string>();
    for (const auto& [k, val] : v.items()) {
        if (k != "id") {
            r.params[k] = val;
        }
    }
    return r;
}

Weight make_weight(const CatalogRef& ref) {
    const std::string path = "problem.weight";
    if (ref.id == "constant") {
        return catalog::constant_weight(param_or(ref, "value", 1.0, path));
    }
    if (ref.id == "inv-sqrt") {
        return catalog::inv_sqrt_weight();
    }
    if (ref.id == "power") {
        return catalog::power_weight(param_or(ref, "exponent", 0.0, path));
    }
    throw ConfigError(path + ".id", "unknown weight \"" + ref.id + "\" (constant, inv-sqrt, power)");
}

Nonlinearity make_nonlinearity(const CatalogRef& ref) {
    const std::string path = "problem.nonlinearity";
    if (ref.id == "constant") {
        return catalog::constant(param_or(ref, "value", 1.0, path));
    }
    if (ref.id == "polynomial") {
        if (!ref.params.contains("coeffs") || !ref.params.at("coeffs").is_array()) {
            throw ConfigError(path + ".coeffs", "expected an array of numbers");
        }
        std::vector<double> c;
        std::size_t i = 0;
        for (const auto& x : ref.params.at("coeffs")) {
            c.push_back(number_at(x, path + ".coeffs[" + std::to_string(i++) + "]"));
        }
        return catalog::polynomial(std::move(c));
    }
    if (ref.id == "step") {
        const double eps = param_or(ref, "epsilon", 0.05, path);
        if (!(eps > 0.0)) {
            throw ConfigError(path + ".epsilon", "must be positive");
        }
        return catalog::step(param_or(ref, "threshold", 0.0, path), param_or(ref, "below", -1.0, path),
                             param_or(ref, "above", 1.0, path), eps);
    }
    if (ref.id == "sine-forcing") {
        return catalog::sine_forcing(param_or(ref, "amplitude", std::numbers::pi * std::numbers::pi, path),
                                     param_or(ref, "frequency", 1.0, path));
    }
    if (ref.id == "phi-example") {
        throw ConfigError(path, "phi-example is assembled together with its weight");
    }
    throw ConfigError(path + ".id",
                      "unknown nonlinearity \"" + ref.id +
                          "\" (constant, polynomial, step, sine-forcing, phi-example)");
}

phi_example::PhiExample phi_params(const CatalogRef& ref) {
    const std::string path = "problem.nonlinearity";
    phi_example::PhiExample ex;
    ex.lambda = param_or(ref, "lambda", ex.lambda, path);
    if (!(ex.lambda > 0.0 && ex.lambda < 1.0)) {
        throw ConfigError(path + ".lambda", "must lie in (0,1)");
    }
    if (ref.params.contains("curve_count")) {
        const json& v = ref.params.at("curve_count");
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError(path + ".curve_count", "expected a non-negative integer");
        }
        ex.curve_count = static_cast<std::size_t>(v.get<long long>());
    }
    ex.epsilon = param_or(ref, "epsilon", ex.epsilon, path);
    if (!(ex.epsilon > 0.0)) {
        throw ConfigError(path + ".epsilon", "must be positive");
    }
    return ex;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string to_string(BoundSource s) { return s == BoundSource::Declared ? "declared" : "empirical"; }

json classification_json(const ClassificationResult& r) {
    return {{"id", r.curve_id},
            {"verdict", to_string(r.verdict)},
            {"psi_margin", r.psi_margin},
            {"viability_defect", r.viability_defect},
            {"epsilon_used", r.epsilon_used},
            {"t_min_clip", r.t_min_clip},
            {"clipped_measure", r.clipped_measure},
            {"n_t", r.n_t},
            {"n_y", r.n_y}};
}

json bounds_json(const BoundsReport& b) {
    return {{"m1", b.m1},
            {"m2", b.m2},
            {"m_total", b.m1 + b.m2},
            {"argmax_t_m1", b.argmax_t_m1},
            {"argmax_t_m2", b.argmax_t_m2},
            {"quad_tol", b.quad_tol}};
}

json hypotheses_json(const HypothesisReport& h) {
    json h5 = json::array();
    for (const auto& c : h.h5) {
        h5.push_back(classification_json(c));
    }
    return {{"h1", {{"pass", h.h1.pass}, {"l1_norm", h.h1.l1_norm}, {"message", h.h1.message}}},
            {"h2",
             {{"pass", h.h2.pass},
              {"hr_sup", h.h2.hr_sup},
              {"source", to_string(h.h2.source)},
              {"empirical_sup", h.h2.empirical_sup},
              {"uniformity_flag", h.h2.uniformity_flag},
              {"refined_sup", h.h2.refined_sup},
              {"resolution_sensitive", h.h2.resolution_sensitive},
              {"declared_bound_exceeded", h.h2.declared_bound_exceeded}}},
            {"h3",
             {{"pass", h.h3.pass},
              {"m1", h.h3.m1},
              {"m2", h.h3.m2},
              {"hr_sup", h.h3.hr_sup},
              {"product", h.h3.product},
              {"R", h.h3.radius}}},
            {"h4", {{"mode", h.h4.mode}, {"note", h.h4.note}}},
            {"h5", {{"pass", h.h5_pass}, {"curves", h5}}},
            {"overall", h.overall}};
}

json solution_json(const Solution& s) {
    json crossings = json::array();
    for (const auto& c : s.curve_crossings) {
        crossings.push_back({{"id", c.curve_id}, {"count", c.count}});
    }
    return {{"converged", s.converged},
            {"residual", s.residual},
            {"iterations", s.iterations},
            {"bc_residual", {s.bc_residual_left, s.bc_residual_right}},
            {"norm", s.norm},
            {"inside_ball", s.inside_ball},
            {"relax_used", s.relax_used},
            {"update_norms", s.update_norms},
            {"curve_crossings", crossings},
            {"t", s.u.nodes()},
            {"u", s.u.values()},
            {"du", s.u.derivatives()}};
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::Check:
            return "check";
        case Task::ClassifyCurves:
            return "classify-curves";
        case Task::Solve:
            return "solve";
        case Task::Probe:
            return "probe";
    }
    return "check";
}

Task task_from_string(const std::string& name) {
    for (Task t : {Task::Check, Task::ClassifyCurves, Task::Solve, Task::Probe}) {
        if (to_string(t) == name) {
            return t;
        }
    }
    throw ConfigError("tasks", "unknown task \"" + name + "\" (check, classify-curves, solve, probe)");
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("", "config must be a JSON object");
    }
    RunConfig c;
    const json& problem = require(doc, "problem", "config");

    const json& bc = require(problem, "bc", "problem");
    if (!bc.is_array() || bc.size() != 4) {
        throw ConfigError("problem.bc", "expected [alpha, beta, gamma, delta]");
    }
    const char* names[] = {"alpha", "beta", "gamma", "delta"};
    for (std::size_t i = 0; i < 4; ++i) {
        const std::string path = "problem.bc[" + std::to_string(i) + "] (" + names[i] + ")";
        c.bc[i] = number_at(bc[i], path);
        if (c.bc[i] < 0.0) {
            throw ConfigError(path, "boundary coefficients must be non-negative");
        }
    }
    if (c.bc[2] * c.bc[1] + c.bc[0] * c.bc[2] + c.bc[0] * c.bc[3] <= 0.0) {
        throw ConfigError("problem.bc", "gamma*beta + alpha*gamma + alpha*delta must be positive");
    }

    c.weight = parse_ref(require(problem, "weight", "problem"), "problem.weight");
    c.nonlinearity = parse_ref(require(problem, "nonlinearity", "problem"), "problem.nonlinearity");

    const json& r = require(problem, "R", "problem");
    if (r.is_number()) {
        c.radius.value = positive_at(r, "problem.R");
    } else if (r.is_string() && r.get<std::string>() == "auto-power") {
        c.radius.auto_power = true;
        if (c.nonlinearity.id != "phi-example") {
            throw ConfigError("problem.R", "\"auto-power\" without a lambda needs the phi-example nonlinearity");
        }
        c.radius.lambda = phi_params(c.nonlinearity).lambda;
    } else if (r.is_object()) {
        const json& mode = require(r, "mode", "problem.R");
        if (mode != "auto-power") {
            throw ConfigError("problem.R.mode", "only \"auto-power\" is supported");
        }
        c.radius.auto_power = true;
        c.radius.lambda = number_at(require(r, "lambda", "problem.R"), "problem.R.lambda");
        if (!(c.radius.lambda > 0.0 && c.radius.lambda < 1.0)) {
            throw ConfigError("problem.R.lambda", "must lie in (0,1)");
        }
    } else {
        throw ConfigError("problem.R", "expected a positive number, \"auto-power\" or {\"mode\": \"auto-power\", ...}");
    }

    if (doc.contains("numerics")) {
        const json& n = doc.at("numerics");
        if (!n.is_object()) {
            throw ConfigError("numerics", "expected an object");
        }
        for (const auto& [key, v] : n.items()) {
            const std::string path = "numerics." + key;
            if (key == "grid_size") {
                c.numerics.grid_size = count_at(v, path);
                if (c.numerics.grid_size < 3 || c.numerics.grid_size % 2 == 0) {
                    throw ConfigError(path, "must be odd and at least 3");
                }
            } else if (key == "quad_tol") {
                c.numerics.quad_tol = positive_at(v, path);
            } else if (key == "solver_tol") {
                c.numerics.solver_tol = positive_at(v, path);
            } else if (key == "max_iter") {
                c.numerics.max_iter = count_at(v, path);
            } else if (key == "relax") {
                c.numerics.relax = positive_at(v, path);
                if (c.numerics.relax > 1.0) {
                    throw ConfigError(path, "must lie in (0,1]");
                }
            } else if (key == "t_min") {
                c.numerics.t_min = positive_at(v, path);
            } else if (key == "probe_eps") {
                c.numerics.probe_eps = positive_at(v, path);
            } else if (key == "probe_samples") {
                c.numerics.probe_samples = count_at(v, path);
            } else if (key == "classify_n_t") {
                c.numerics.classify_n_t = count_at(v, path);
            } else if (key == "classify_n_y") {
                c.numerics.classify_n_y = count_at(v, path);
            } else {
                throw ConfigError(path, "unknown numerics field");
            }
        }
    }

    if (doc.contains("tasks")) {
        const json& t = doc.at("tasks");
        if (!t.is_array() || t.empty()) {
            throw ConfigError("tasks", "expected a non-empty array of task names");
        }
        c.tasks.clear();
        for (const auto& name : t) {
            if (!name.is_string()) {
                throw ConfigError("tasks", "task names must be strings");
            }
            c.tasks.push_back(task_from_string(name.get<std::string>()));
        }
    }

    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) {
            throw ConfigError("output", "expected a file path");
        }
        c.output = doc.at("output").get<std::string>();
    }

    // Build once so catalog parameter errors surface as configuration errors.
    (void)build_spec(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& c) {
    json weight = c.weight.params;
    weight["id"] = c.weight.id;
    json nonlin = c.nonlinearity.params;
    nonlin["id"] = c.nonlinearity.id;
    json radius;
    if (c.radius.auto_power) {
        radius = {{"mode", "auto-power"}, {"lambda", c.radius.lambda}};
    } else {
        radius = c.radius.value;
    }
    json tasks = json::array();
    for (Task t : c.tasks) {
        tasks.push_back(to_string(t));
    }
    json doc = {{"problem", {{"bc", c.bc}, {"weight", weight}, {"nonlinearity", nonlin}, {"R", radius}}},
                {"numerics",
                 {{"grid_size", c.numerics.grid_size},
                  {"quad_tol", c.numerics.quad_tol},
                  {"solver_tol", c.numerics.solver_tol},
                  {"max_iter", c.numerics.max_iter},
                  {"relax", c.numerics.relax},
                  {"t_min", c.numerics.t_min},
                  {"probe_eps", c.numerics.probe_eps},
                  {"probe_samples", c.numerics.probe_samples},
                  {"classify_n_t", c.numerics.classify_n_t},
                  {"classify_n_y", c.numerics.classify_n_y}}},
                {"tasks", tasks}};
    if (!c.output.empty()) {
        doc["output"] = c.output;
    }
    return doc;
}

ProblemSpec build_spec(const RunConfig& c) {
    BoundaryParams params = BoundaryParams::dirichlet();
    try {
        params = validate_params(c.bc[0], c.bc[1], c.bc[2], c.bc[3]);
    } catch (const Error& e) {
        throw ConfigError("problem.bc", e.what());
    }
    const double radius = c.radius.auto_power ? 1.0 : c.radius.value;
    ProblemSpec spec;
    if (c.nonlinearity.id == "phi-example") {
        if (c.weight.id != "inv-sqrt") {
            throw ConfigError("problem.weight", "phi-example is posed with the inv-sqrt weight");
        }
        spec = phi_example::build_problem(phi_params(c.nonlinearity), params, radius);
    } else {
        spec.params = params;
        spec.weight = make_weight(c.weight);
        spec.nonlinearity = make_nonlinearity(c.nonlinearity);
        spec.radius = radius;
    }
    spec.quad_tol = c.numerics.quad_tol;
    spec.grid_size = c.numerics.grid_size;
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError("problem", e.what());
    }
    return spec;
}

RunResult run(const RunConfig& c) {
    ProblemSpec spec = build_spec(c);
    RunResult result;
    json& rep = result.report;
    rep["config"] = config_to_json(c);
    rep["hypotheses"] = nullptr;
    rep["bounds"] = nullptr;
    rep["curves"] = nullptr;
    rep["solution"] = nullptr;
    rep["probe"] = nullptr;
    json task_status = json::object();
    bool all_pass = true;
    auto record = [&](Task t, bool ok) {
        task_status[to_string(t)] = ok;
        all_pass = all_pass && ok;
    };
    auto has = [&](Task t) { return std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end(); };

    ClassifyOptions copt;
    copt.t_min = c.numerics.t_min;
    copt.n_t = c.numerics.classify_n_t;
    copt.n_y = c.numerics.classify_n_y;

    std::optional<BoundsReport> bounds;
    std::string radius_error;
    try {
        if (c.radius.auto_power || has(Task::Check)) {
            bounds = compute_bounds(spec);
            rep["bounds"] = bounds_json(*bounds);
        }
        if (c.radius.auto_power) {
            spec.radius = minimal_R_power(bounds->m1 + bounds->m2, c.radius.lambda);
        }
    } catch (const Error& e) {
        radius_error = e.what();
        rep["bounds"] = {{"error", radius_error}};
    }

    std::optional<Solution> solution;
    for (Task t : {Task::Check, Task::ClassifyCurves, Task::Solve, Task::Probe}) {
        if (!has(t)) {
            continue;
        }
        if (!radius_error.empty()) {
            record(t, false);
            continue;
        }
        try {
            switch (t) {
                case Task::Check: {
                    const HypothesisReport h = certify(spec, *bounds, copt);
                    rep["hypotheses"] = hypotheses_json(h);
                    record(t, h.overall);
                    break;
                }
                case Task::ClassifyCurves: {
                    json curves = json::array();
                    bool ok = true;
                    for (const auto& curve : spec.nonlinearity.curves) {
                        const auto r = classify_curve(spec, curve, copt);
                        ok = ok && r.verdict != Verdict::Indeterminate;
                        curves.push_back(classification_json(r));
                    }
                    rep["curves"] = curves;
                    record(t, ok);
                    break;
                }
                case Task::Solve: {
                    PicardOptions popt{c.numerics.relax, c.numerics.solver_tol, c.numerics.max_iter};
                    solution = solve_picard(spec, GridFunction::zeros(spec.grid_size), popt);
                    rep["solution"] = solution_json(*solution);
                    record(t, solution->converged && solution->inside_ball);
                    break;
                }
                case Task::Probe: {
                    const GridFunction target = solution ? solution->u : GridFunction::zeros(spec.grid_size);
                    const ProbeResult pr =
                        convexification_probe(spec, target, c.numerics.probe_eps, c.numerics.probe_samples);
                    rep["probe"] = {{"target", solution ? "solution" : "zero"},
                                    {"eps", c.numerics.probe_eps},
                                    {"hull_distance", pr.hull_distance},
                                    {"c1_distance", pr.c1_distance},
                                    {"distance_trace", pr.distance_trace},
                                    {"coeffs", pr.coeffs},
                                    {"samples_used", pr.samples_used},
                                    {"skipped", pr.skipped},
                                    {"iterations", pr.iterations}};
                    record(t, true);
                    break;
                }
            }
        } catch (const Error& e) {
            const char* key = t == Task::Check            ? "hypotheses"
                              : t == Task::ClassifyCurves ? "curves"
                              : t == Task::Solve          ? "solution"
                                                          : "probe";
            rep[key] = {{"error", e.what()}};
            record(t, false);
        }
    }

    rep["meta"] = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"timestamp", timestamp_now()},
                   {"radius", spec.radius},
                   {"radius_mode", c.radius.auto_power ? "auto-power" : "fixed"},
                   {"tasks", task_status}};
    result.exit_code = all_pass ? 0 : 1;
    return result;
}

json strip_timestamp(json report) {
    if (report.contains("meta") && report["meta"].is_object()) {
        report["meta"].erase("timestamp");
    }
    return report;
}

}  // namespace sepbvp
