#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "sepbvp/errors.hpp"
#include "sepbvp/example_phi.hpp"
#include "sepbvp/hammerstein.hpp"
#include "sepbvp/hypotheses.hpp"
#include "sepbvp/kernel.hpp"
#include "sepbvp/model.hpp"
#include "sepbvp/quadrature.hpp"
#include "sepbvp/run.hpp"
#include "sepbvp/solver.hpp"

namespace py = pybind11;
using namespace sepbvp;

namespace {

void bind_errors(py::module_& m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NegativeCoefficient>(m, "NegativeCoefficient", base.ptr());
    py::register_exception<DegenerateGamma>(m, "DegenerateGamma", base.ptr());
    auto quad = py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    py::register_exception<MaxDepthExceeded>(m, "MaxDepthExceeded", quad.ptr());
    py::register_exception<NonFiniteIntegrand>(m, "NonFiniteIntegrand", quad.ptr());
    py::register_exception<BallViolation>(m, "BallViolation", base.ptr());
    py::register_exception<SolverStall>(m, "SolverStall", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
}

void bind_model(py::module_& m) {
    py::class_<BoundaryParams>(m, "BoundaryParams")
        .def_property_readonly("alpha", &BoundaryParams::alpha)
        .def_property_readonly("beta", &BoundaryParams::beta)
        .def_property_readonly("gamma", &BoundaryParams::gamma)
        .def_property_readonly("delta", &BoundaryParams::delta)
        .def_property_readonly("gamma_const", &BoundaryParams::gamma_const)
        .def_static("dirichlet", &BoundaryParams::dirichlet)
        .def("__repr__", [](const BoundaryParams& p) {
            return "BoundaryParams(" + std::to_string(p.alpha()) + ", " + std::to_string(p.beta()) + ", " +
                   std::to_string(p.gamma()) + ", " + std::to_string(p.delta()) + ")";
        });

    m.def("validate_params", &validate_params, py::arg("alpha"), py::arg("beta"), py::arg("gamma"),
          py::arg("delta"));
    m.def("k_eval", &k_eval, py::arg("params"), py::arg("t"), py::arg("s"));
    m.def("dk_dt", &dk_dt, py::arg("params"), py::arg("t"), py::arg("s"));

    m.def(
        "integrate",
        [](std::function<double(double)> f, double a, double b, std::vector<double> breakpoints,
           bool singular_left, double tol) {
            return integrate(IntegrandSpec{std::move(f), std::move(breakpoints), singular_left, tol}, a, b);
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("breakpoints") = std::vector<double>{},
        py::arg("singular_left") = false, py::arg("tol") = 1e-10);

    py::class_<Weight>(m, "Weight")
        .def(py::init([](std::string name, std::function<double(double)> eval, bool singular_left) {
                 return Weight{std::move(name), std::move(eval), singular_left, std::nullopt};
             }),
             py::arg("name"), py::arg("eval"), py::arg("singular_left") = false)
        .def_readonly("name", &Weight::name)
        .def_readonly("singular_left", &Weight::singular_left)
        .def("__call__", [](const Weight& w, double t) { return w.eval(t); });

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def(py::init([](std::string name, std::function<double(double, double)> eval) {
                 Nonlinearity f;
                 f.name = std::move(name);
                 f.eval = std::move(eval);
                 return f;
             }),
             py::arg("name"), py::arg("eval"))
        .def_readonly("name", &Nonlinearity::name)
        .def_property_readonly("curve_ids",
                               [](const Nonlinearity& f) {
                                   std::vector<std::string> ids;
                                   for (const auto& c : f.curves) {
                                       ids.push_back(c.id);
                                   }
                                   return ids;
                               })
        .def("__call__", [](const Nonlinearity& f, double t, double u) { return f.eval(t, u); });

    auto cat = m.def_submodule("catalog", "Built-in weights and nonlinearities");
    cat.def("constant_weight", &catalog::constant_weight, py::arg("c"));
    cat.def("inv_sqrt_weight", &catalog::inv_sqrt_weight);
    cat.def("power_weight", &catalog::power_weight, py::arg("p"));
    cat.def("constant", &catalog::constant, py::arg("c"));
    cat.def("polynomial", &catalog::polynomial, py::arg("coeffs"));
    cat.def("step", &catalog::step, py::arg("threshold"), py::arg("below"), py::arg("above"),
            py::arg("epsilon") = 0.05);
    cat.def("sine_forcing", &catalog::sine_forcing, py::arg("amplitude"), py::arg("frequency") = 1.0);

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init<std::vector<double>, std::vector<double>, std::vector<double>>(), py::arg("nodes"),
             py::arg("values"), py::arg("derivatives"))
        .def_static("zeros", &GridFunction::zeros, py::arg("n"))
        .def_static("sample", &GridFunction::sample, py::arg("n"), py::arg("u"), py::arg("du"))
        .def_property_readonly("nodes", &GridFunction::nodes)
        .def_property_readonly("values", &GridFunction::values)
        .def_property_readonly("derivatives", &GridFunction::derivatives)
        .def("__len__", &GridFunction::size);

    m.def(
        "grid_eval",
        [](const GridFunction& u, double t) {
            const auto pv = grid_eval(u, t);
            return py::make_tuple(pv.value, pv.derivative);
        },
        py::arg("u"), py::arg("t"));
    m.def("norm_c1", &norm_c1, py::arg("u"));

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def(py::init([](const BoundaryParams& params, Weight weight, Nonlinearity f, double radius,
                         double quad_tol, std::size_t grid_size) {
                 ProblemSpec s;
                 s.params = params;
                 s.weight = std::move(weight);
                 s.nonlinearity = std::move(f);
                 s.radius = radius;
                 s.quad_tol = quad_tol;
                 s.grid_size = grid_size;
                 s.validate();
                 return s;
             }),
             py::arg("params"), py::arg("weight"), py::arg("nonlinearity"), py::arg("radius"),
             py::arg("quad_tol") = 1e-10, py::arg("grid_size") = 129)
        .def_readwrite("radius", &ProblemSpec::radius)
        .def_readwrite("quad_tol", &ProblemSpec::quad_tol)
        .def_readwrite("grid_size", &ProblemSpec::grid_size)
        .def_readonly("params", &ProblemSpec::params)
        .def_readonly("weight", &ProblemSpec::weight)
        .def_readonly("nonlinearity", &ProblemSpec::nonlinearity);
}

void bind_operators(py::module_& m) {
    py::class_<BoundsReport>(m, "BoundsReport")
        .def_readonly("m1", &BoundsReport::m1)
        .def_readonly("m2", &BoundsReport::m2)
        .def_readonly("argmax_t_m1", &BoundsReport::argmax_t_m1)
        .def_readonly("argmax_t_m2", &BoundsReport::argmax_t_m2)
        .def_readonly("quad_tol", &BoundsReport::quad_tol);

    m.def("apply_T", &apply_T, py::arg("spec"), py::arg("u"));
    m.def("residual", &residual, py::arg("spec"), py::arg("u"));
    m.def("compute_bounds", &compute_bounds, py::arg("spec"));

    py::class_<H1Result>(m, "H1Result")
        .def_readonly("passed", &H1Result::pass)
        .def_readonly("l1_norm", &H1Result::l1_norm)
        .def_readonly("message", &H1Result::message);
    m.def("check_h1", &check_h1, py::arg("weight"), py::arg("tol") = 1e-10);
    m.def("minimal_R_power", &minimal_R_power, py::arg("m_total"), py::arg("lam"));

    py::enum_<Verdict>(m, "Verdict")
        .value("Viable", Verdict::Viable)
        .value("InviableLower", Verdict::InviableLower)
        .value("InviableUpper", Verdict::InviableUpper)
        .value("Indeterminate", Verdict::Indeterminate);

    py::class_<ClassifyOptions>(m, "ClassifyOptions")
        .def(py::init<>())
        .def_readwrite("t_min", &ClassifyOptions::t_min)
        .def_readwrite("n_t", &ClassifyOptions::n_t)
        .def_readwrite("n_y", &ClassifyOptions::n_y)
        .def_readwrite("viability_tol", &ClassifyOptions::viability_tol);

    py::class_<ClassificationResult>(m, "ClassificationResult")
        .def_readonly("curve_id", &ClassificationResult::curve_id)
        .def_readonly("verdict", &ClassificationResult::verdict)
        .def_readonly("psi_margin", &ClassificationResult::psi_margin)
        .def_readonly("viability_defect", &ClassificationResult::viability_defect)
        .def_readonly("t_min_clip", &ClassificationResult::t_min_clip);

    m.def(
        "classify_curves",
        [](const ProblemSpec& spec, const ClassifyOptions& opt) {
            std::vector<ClassificationResult> out;
            for (const auto& c : spec.nonlinearity.curves) {
                out.push_back(classify_curve(spec, c, opt));
            }
            return out;
        },
        py::arg("spec"), py::arg("options") = ClassifyOptions{});

    py::class_<Solution>(m, "Solution")
        .def_readonly("u", &Solution::u)
        .def_readonly("residual", &Solution::residual)
        .def_readonly("iterations", &Solution::iterations)
        .def_readonly("bc_residual_left", &Solution::bc_residual_left)
        .def_readonly("bc_residual_right", &Solution::bc_residual_right)
        .def_readonly("norm", &Solution::norm)
        .def_readonly("inside_ball", &Solution::inside_ball)
        .def_readonly("converged", &Solution::converged)
        .def_readonly("update_norms", &Solution::update_norms);

    m.def(
        "solve_picard",
        [](const ProblemSpec& spec, std::optional<GridFunction> u0, double relax, double tol,
           std::size_t max_iter) {
            const GridFunction start = u0 ? *u0 : GridFunction::zeros(spec.grid_size);
            return solve_picard(spec, start, PicardOptions{relax, tol, max_iter});
        },
        py::arg("spec"), py::arg("u0") = py::none(), py::arg("relax") = 1.0, py::arg("tol") = 1e-10,
        py::arg("max_iter") = 200);
    m.def("bc_residual", &bc_residual, py::arg("params"), py::arg("u"));

    py::class_<ProbeResult>(m, "ProbeResult")
        .def_readonly("hull_distance", &ProbeResult::hull_distance)
        .def_readonly("c1_distance", &ProbeResult::c1_distance)
        .def_readonly("coeffs", &ProbeResult::coeffs)
        .def_readonly("distance_trace", &ProbeResult::distance_trace)
        .def_readonly("samples_used", &ProbeResult::samples_used);
    m.def(
        "convexification_probe",
        [](const ProblemSpec& spec, const GridFunction& u, double eps, std::size_t n_samples) {
            return convexification_probe(spec, u, eps, n_samples);
        },
        py::arg("spec"), py::arg("u"), py::arg("eps"), py::arg("n_samples"));
    m.def(
        "project_to_hull",
        [](std::vector<double> target, std::vector<std::vector<double>> points) {
            const auto r = project_to_hull(target, points);
            return py::make_tuple(r.distance, r.coeffs);
        },
        py::arg("target"), py::arg("points"));
}

void bind_example(py::module_& m) {
    auto ex = m.def_submodule("phi_example", "Divisor-count nonlinearity with weight 1/sqrt(t)");
    ex.def("phi", &phi_example::phi, py::arg("n"));
    ex.def("region_index", &phi_example::region_index, py::arg("t"), py::arg("u"));
    ex.def("f_value", &phi_example::f_value, py::arg("lam"), py::arg("t"), py::arg("u"));
    ex.def(
        "build_problem",
        [](double lam, std::size_t curve_count, double epsilon, const BoundaryParams& params, double radius) {
            return phi_example::build_problem({lam, curve_count, epsilon}, params, radius);
        },
        py::arg("lam") = 1.0 / 3.0, py::arg("curve_count") = 8, py::arg("epsilon") = 0.05,
        py::arg("params") = validate_params(1, 1, 1, 1), py::arg("radius") = 4.0);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Green's-function solver and hypothesis certifier for separated-BC problems";
    bind_errors(m);
    bind_model(m);
    bind_operators(m);
    bind_example(m);

    m.def(
        "run_config",
        [](const std::string& config_json) {
            const RunConfig cfg = parse_config(nlohmann::json::parse(config_json));
            const RunResult r = run(cfg);
            return py::make_tuple(r.report.dump(), r.exit_code);
        },
        py::arg("config_json"), "Runs a config given as JSON text; returns (report_json, exit_code).");
    m.attr("__version__") = kToolVersion;
}
