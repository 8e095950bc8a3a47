#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../common/oracles.hpp"
#include "sepbvp/errors.hpp"
#include "sepbvp/example_phi.hpp"
#include "sepbvp/hammerstein.hpp"
#include "sepbvp/quadrature.hpp"
#include "sepbvp/solver.hpp"

using namespace sepbvp;

namespace {

ProblemSpec dirichlet(Nonlinearity f, double radius = 1.0, std::size_t n = 129) {
    ProblemSpec spec;
    spec.params = BoundaryParams::dirichlet();
    spec.weight = catalog::constant_weight(1.0);
    spec.nonlinearity = std::move(f);
    spec.radius = radius;
    spec.quad_tol = 1e-11;
    spec.grid_size = n;
    return spec;
}

ProblemSpec divisor(std::size_t n = 129, double tol = 1e-10) {
    auto spec = phi_example::build_problem({}, validate_params(1, 1, 1, 1), 4.0);
    spec.grid_size = n;
    spec.quad_tol = tol;
    return spec;
}

// Random smooth u with norm_c1(u) <= radius.
GridFunction random_in_ball(std::mt19937_64& rng, std::size_t n, double radius) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double a[4];
    for (double& x : a) {
        x = nd(rng);
    }
    const double shift = nd(rng);
    auto u = GridFunction::sample(
        n,
        [&](double t) {
            double acc = shift;
            for (int k = 0; k < 4; ++k) {
                acc += a[k] * std::sin((k + 1) * std::numbers::pi * t);
            }
            return acc;
        },
        [&](double t) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                acc += a[k] * (k + 1) * std::numbers::pi * std::cos((k + 1) * std::numbers::pi * t);
            }
            return acc;
        });
    return (radius * unit(rng) / norm_c1(u)) * u;
}

}  // namespace

TEST_CASE("apply_T on closed-form Dirichlet problems") {
    const auto spec = dirichlet(catalog::constant(1.0));
    const auto tu = apply_T(spec, GridFunction::zeros(129));
    CHECK(tu.values()[64] == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(std::abs(tu.derivatives()[64]) <= 1e-13);
    for (std::size_t i = 0; i < tu.size(); ++i) {
        const double t = tu.nodes()[i];
        CHECK(std::abs(tu.values()[i] - oracle::dirichlet_const(t)) <= 1e-12);
        CHECK(std::abs(tu.derivatives()[i] - oracle::dirichlet_const_d(t)) <= 1e-12);
    }

    const auto zero = apply_T(dirichlet(catalog::constant(0.0)), GridFunction::zeros(33));
    CHECK(norm_c1(zero) == 0.0);

    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto sine = apply_T(dirichlet(catalog::sine_forcing(pi2, 1.0), 10.0), GridFunction::zeros(129));
    CHECK(std::abs(sine.values()[64] - 1.0) <= 1e-8);
    for (std::size_t i = 0; i < sine.size(); ++i) {
        const double t = sine.nodes()[i];
        CHECK(std::abs(sine.values()[i] - std::sin(std::numbers::pi * t)) <= 1e-9);
        CHECK(std::abs(sine.derivatives()[i] - std::numbers::pi * std::cos(std::numbers::pi * t)) <= 1e-9);
    }
}

TEST_CASE("apply_T aligns panels with curve crossings") {
    // f = sign(u) along u = t - 1/2 jumps at s = 1/2; 1/2 is not a node of a 64-node grid.
    const auto spec = dirichlet(catalog::step(0.0, -1.0, 1.0, 0.05), 2.0, 65);
    const auto u = GridFunction::sample(64, [](double t) { return t - 0.5; }, [](double) { return 1.0; });
    const auto crossings = find_crossings(spec.nonlinearity, u);
    REQUIRE(crossings.size() == 1);
    REQUIRE(crossings[0].points.size() == 1);
    CHECK(std::abs(crossings[0].points[0] - 0.5) <= 1e-12);

    const auto tu = apply_T(spec, u);
    for (std::size_t i = 0; i < tu.size(); ++i) {
        const double t = tu.nodes()[i];
        CHECK(std::abs(tu.values()[i] - oracle::dirichlet_sign(t)) <= 1e-10);
        CHECK(std::abs(tu.derivatives()[i] - oracle::dirichlet_sign_d(t)) <= 1e-10);
    }
}

TEST_CASE("residual examples") {
    const auto spec = dirichlet(catalog::constant(1.0));
    const auto exact = GridFunction::sample(129, oracle::dirichlet_const, oracle::dirichlet_const_d);
    CHECK(residual(spec, exact) <= 2 * spec.quad_tol);
    CHECK(residual(spec, GridFunction::zeros(129)) == doctest::Approx(0.625).epsilon(1e-10));
    CHECK(residual(dirichlet(catalog::constant(0.0)), GridFunction::zeros(9)) == 0.0);
}

TEST_CASE("apply_T rejects functions outside the ball") {
    const auto spec = dirichlet(catalog::constant(1.0), 1.0);
    const auto big = GridFunction::sample(129, [](double t) { return 2 * t; }, [](double) { return 2.0; });
    CHECK_THROWS_AS(apply_T(spec, big), BallViolation);
}

TEST_CASE("bounds: closed forms") {
    const auto b = compute_bounds(dirichlet(catalog::constant(1.0)));
    CHECK(std::abs(b.m1 - oracle::kDirichletM1) <= 1e-10);
    CHECK(std::abs(b.m2 - oracle::kDirichletM2) <= 1e-10);

    for (double t : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        const auto spec = dirichlet(catalog::constant(1.0));
        CHECK(std::abs(m1_profile(spec, t) - oracle::dirichlet_m1_profile(t)) <= 1e-11);
        CHECK(std::abs(m2_profile(spec, t) - oracle::dirichlet_m2_profile(t)) <= 1e-11);
        const auto ps = divisor();
        CHECK(std::abs(m1_profile(ps, t) - oracle::divisor_m1_profile(t)) <= 1e-10);
        CHECK(std::abs(m2_profile(ps, t) - oracle::divisor_m2_profile(t)) <= 1e-10);
    }

    const auto pb = compute_bounds(divisor());
    CHECK(std::abs(pb.m1 - oracle::divisor_m1()) <= 1e-9);
    CHECK(std::abs(pb.m2 - oracle::kDivisorM2) <= 1e-9);
    CHECK(std::abs(pb.argmax_t_m1 - oracle::kDivisorM1Argmax) <= 1e-4);
    CHECK(pb.argmax_t_m2 == 0.0);
    CHECK(std::abs(pb.m1 + pb.m2 - 2.336) <= 0.005);

    auto zero_g = dirichlet(catalog::constant(1.0));
    zero_g.weight = catalog::constant_weight(0.0);
    const auto zb = compute_bounds(zero_g);
    CHECK(zb.m1 == 0.0);
    CHECK(zb.m2 == 0.0);
}

TEST_CASE("bounds scale linearly with the weight") {
    auto spec = divisor(65);
    const auto base = compute_bounds(spec);
    for (double c : {0.5, 3.0}) {
        auto scaled = spec;
        scaled.weight.eval = [c](double t) { return c / std::sqrt(t); };
        const auto b = compute_bounds(scaled);
        CHECK(std::abs(b.m1 - c * base.m1) <= 2 * spec.quad_tol * (1 + c));
        CHECK(std::abs(b.m2 - c * base.m2) <= 2 * spec.quad_tol * (1 + c));
    }
}

TEST_CASE("bounds are stable under grid refinement") {
    const auto b65 = compute_bounds(divisor(65));
    const auto b129 = compute_bounds(divisor(129));
    const auto b257 = compute_bounds(divisor(257));
    CHECK(std::abs(b65.m1 - b129.m1) <= 1e-4);
    CHECK(std::abs(b129.m1 - b257.m1) <= 1e-4);
    CHECK(std::abs(b65.m2 - b257.m2) <= 1e-4);
}

TEST_CASE("self-mapping of the ball when H3 holds") {
    std::mt19937_64 rng(1234);
    // |f| <= 0.5 + 0.2 R = 0.7 and M1 + M2 = 0.625, so the product is below R = 1.
    const auto poly = dirichlet(catalog::polynomial({0.5, 0.2}), 1.0, 65);
    const auto step = dirichlet(catalog::step(0.0, -1.0, 1.0, 0.05), 1.0, 65);
    for (int trial = 0; trial < 30; ++trial) {
        const auto u = random_in_ball(rng, 65, 1.0);
        const double slack = check_slack(poly.quad_tol, 1.0 / 64);
        CHECK(norm_c1(apply_T(poly, u)) <= 1.0 + slack);
        CHECK(norm_c1(apply_T(step, u)) <= 1.0 + slack);
    }
}

TEST_CASE("apply_T ignores u when f does not depend on it") {
    std::mt19937_64 rng(99);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const auto spec = dirichlet(catalog::sine_forcing(pi2, 1.0), 10.0, 33);
    const auto ref = apply_T(spec, GridFunction::zeros(33));
    for (int trial = 0; trial < 5; ++trial) {
        const auto tu = apply_T(spec, random_in_ball(rng, 33, 5.0));
        CHECK(norm_c1(tu - ref) <= 1e-12);
    }
}

TEST_CASE("outputs of apply_T satisfy the boundary conditions") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coeff(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto spec = dirichlet(catalog::polynomial({1.0, -0.5, 0.25}), 3.0, 33);
        spec.params = validate_params(coeff(rng), coeff(rng), coeff(rng) + 0.1, coeff(rng));
        const auto tu = apply_T(spec, random_in_ball(rng, 33, 3.0));
        const auto [left, right] = bc_residual(spec.params, tu);
        CHECK(left <= 1e-10);
        CHECK(right <= 1e-10);
    }
}

TEST_CASE("equicontinuity: second differences of Tu against |g| H_R") {
    const auto spec = dirichlet(catalog::constant(1.0), 1.0);
    const auto rep = equicontinuity_check(spec, GridFunction::zeros(129));
    CHECK(rep.pass);
    CHECK(rep.skipped == 0);
    REQUIRE(rep.second_diff.size() == 127);
    for (double d : rep.second_diff) {
        CHECK(d == doctest::Approx(1.0).epsilon(1e-6));
    }

    const auto zero = equicontinuity_check(dirichlet(catalog::constant(0.0)), GridFunction::zeros(17));
    for (double d : zero.second_diff) {
        CHECK(d == 0.0);
    }
    CHECK(zero.pass);
}

TEST_CASE("equicontinuity on the worked example matches direct quadrature of (Tu)''") {
    const auto spec = divisor(129);
    const auto sol = solve_picard(spec, GridFunction::zeros(129));
    REQUIRE(sol.converged);
    const double t_min = 1e-3;
    const auto rep = equicontinuity_check(spec, sol.u, t_min);
    CHECK(rep.pass);
    CHECK(rep.skipped >= 1);

    // Oracle: a centered difference equals -(1/h) int hat_i(s) g(s) f(s,u(s)) ds.
    const double h = 1.0 / 128;
    const auto tu = apply_T(spec, sol.u);
    for (std::size_t k = 0; k < rep.nodes.size(); k += 16) {
        const double ti = rep.nodes[k];
        const double direct = integrate(
            {[&](double s) {
                 const double hat = 1.0 - std::abs(s - ti) / h;
                 return hat * spec.weight.eval(s) * spec.nonlinearity.eval(s, grid_eval(sol.u, s).value);
             },
             {ti}, false, 1e-12},
            ti - h, ti + h) / h;
        CHECK(std::abs(rep.second_diff[k] - std::abs(direct)) <= 1e-6);
    }
}
