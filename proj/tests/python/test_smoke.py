import math
import os
import pathlib

import pytest

import sepbvp
from sepbvp import catalog, phi_example

CONFIG_DIR = pathlib.Path(os.environ.get("SEPBVP_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))


def dirichlet(f, radius=1.0):
    return sepbvp.ProblemSpec(sepbvp.BoundaryParams.dirichlet(), catalog.constant_weight(1.0), f, radius)


def test_kernel_values():
    p = sepbvp.validate_params(1, 0, 1, 0)
    assert sepbvp.k_eval(p, 0.5, 0.25) == pytest.approx(0.125)
    assert sepbvp.k_eval(p, 0.25, 0.5) == sepbvp.k_eval(p, 0.5, 0.25)
    with pytest.raises(sepbvp.DegenerateGamma):
        sepbvp.validate_params(0, 1, 0, 1)
    with pytest.raises(sepbvp.NegativeCoefficient):
        sepbvp.validate_params(-1, 0, 1, 0)


def test_integrate_singular_weight():
    val = sepbvp.integrate(lambda t: 1 / math.sqrt(t), 0.0, 1.0, singular_left=True)
    assert val == pytest.approx(2.0, abs=1e-9)


def test_bounds_and_solve_dirichlet():
    spec = dirichlet(catalog.constant(1.0))
    b = sepbvp.compute_bounds(spec)
    assert b.m1 == pytest.approx(0.125, abs=1e-10)
    assert b.m2 == pytest.approx(0.5, abs=1e-10)
    sol = sepbvp.solve_picard(spec)
    assert sol.converged
    err = max(abs(u - t * (1 - t) / 2) for t, u in zip(sol.u.nodes, sol.u.values))
    assert err <= 1e-8


def test_python_callables_as_problem_data():
    f = sepbvp.Nonlinearity("half", lambda t, u: 0.5)
    g = sepbvp.Weight("two", lambda t: 2.0)
    spec = sepbvp.ProblemSpec(sepbvp.BoundaryParams.dirichlet(), g, f, 1.0)
    tu = sepbvp.apply_T(spec, sepbvp.GridFunction.zeros(spec.grid_size))
    mid = len(tu) // 2
    assert tu.values[mid] == pytest.approx(0.125, abs=1e-12)


def test_worked_example():
    spec = phi_example.build_problem()
    b = sepbvp.compute_bounds(spec)
    assert abs(b.m1 + b.m2 - 2.336) <= 0.005
    assert sepbvp.minimal_R_power(b.m1 + b.m2, 1 / 3) == 4
    verdicts = {r.curve_id: r.verdict for r in sepbvp.classify_curves(spec)}
    assert len(verdicts) == 16
    assert all(v == sepbvp.Verdict.InviableUpper for v in verdicts.values())
    sol = sepbvp.solve_picard(spec)
    assert sol.converged and sol.inside_ball
    assert sol.residual <= 1e-4 * (1 + sol.norm)
    assert phi_example.phi(12) == 6
    assert phi_example.region_index(0.25, 0.6) == 2


def test_probe_and_hull():
    dist, coeffs = sepbvp.project_to_hull([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    assert dist == pytest.approx(math.sqrt(0.5), abs=1e-10)
    assert coeffs == pytest.approx([0.5, 0.5])
    spec = dirichlet(catalog.polynomial([1.0, 0.3]))
    sol = sepbvp.solve_picard(spec)
    probe = sepbvp.convexification_probe(spec, sol.u, 1e-3, 5)
    assert probe.hull_distance <= 2 * sepbvp.residual(spec, sol.u) + 1e-14
    trace = probe.distance_trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_ball_violation_maps_to_python():
    with pytest.raises(sepbvp.BallViolation):
        sepbvp.solve_picard(dirichlet(catalog.constant(5.0)))


def test_run_config_files():
    report, code = sepbvp.run((CONFIG_DIR / "dirichlet_smoke.json").read_text())
    assert code == 0
    assert report["bounds"]["m1"] == pytest.approx(0.125, abs=1e-10)
    report, code = sepbvp.run((CONFIG_DIR / "divisor_example.json").read_text())
    assert code == 0
    assert report["meta"]["radius"] == 4.0


def test_config_error():
    bad = {"problem": {"bc": [-1, 0, 1, 0], "weight": "constant", "nonlinearity": "constant", "R": 1}}
    with pytest.raises(sepbvp.ConfigError, match="alpha"):
        sepbvp.run(bad)
