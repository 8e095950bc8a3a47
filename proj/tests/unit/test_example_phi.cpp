#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "sepbvp/errors.hpp"
#include "sepbvp/example_phi.hpp"
#include "sepbvp/hypotheses.hpp"

using namespace sepbvp;
using namespace sepbvp::phi_example;

namespace {

std::uint64_t brute_divisors(std::uint64_t n) {
    std::uint64_t count = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
        count += (n % d == 0) ? 1 : 0;
    }
    return count;
}

// Checks the defining inequalities of the band with index n at (t,u).
bool in_band(double t, double u, std::uint64_t n) {
    if (u < -t) {
        return n == 1;
    }
    const double nd = static_cast<double>(n);
    if (u < 0) {
        return -t / nd <= u && u < -t / (nd + 1);
    }
    const double r = std::sqrt(t);
    return (nd - 1) * r <= u && u < nd * r;
}

const double kLambda = 1.0 / 3.0;

}  // namespace

TEST_CASE("phi: divisor counts") {
    CHECK(phi(1) == 2);
    CHECK(phi(12) == 6);
    CHECK(phi(7) == 2);
    for (std::uint64_t n = 2; n < 2000; ++n) {
        CHECK(phi(n) == brute_divisors(n));
    }
    for (std::uint64_t n : {65536ull, 65537ull, 720720ull, 1000003ull}) {
        CHECK(phi(n) == brute_divisors(n));
    }
    CHECK(phi(1ull << 40) == 41);
    CHECK_THROWS_AS(phi(0), DomainError);
}

TEST_CASE("region_index: branch examples") {
    CHECK(region_index(0.25, 0.6) == 2);
    CHECK(region_index(0.25, -0.3) == 1);
    CHECK(region_index(0.25, -0.2) == 1);
    CHECK(region_index(0.25, 0.0) == 1);
    CHECK(region_index(0.25, -0.25) == 1);
    CHECK(region_index(0.25, 0.5) == 2);
    CHECK(region_index(0.25, -0.1) == 2);  // -1/8 <= -0.1 < -1/12
    CHECK_THROWS_AS(region_index(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(region_index(-0.1, 1.0), DomainError);
    CHECK_THROWS_AS(region_index(1.5, 1.0), DomainError);
    CHECK_THROWS_AS(region_index(1e-300, 1e300), DomainError);
}

TEST_CASE("region_index satisfies its defining inequalities") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> tdist(1e-6, 1.0);
    std::uniform_real_distribution<double> udist(-1.5, 5.0);
    for (int i = 0; i < 20000; ++i) {
        const double t = tdist(rng);
        const double u = i % 3 == 0 ? udist(rng) * t : udist(rng);
        CHECK(in_band(t, u, region_index(t, u)));
    }
    // Band edges, where floor() of a rounded quotient can be off by one.
    for (int k = 1; k <= 50; ++k) {
        for (double t : {0.01, 0.3, 0.49, 1.0}) {
            const double up = k * std::sqrt(t);
            const double down = -t / (k + 1);
            for (double u : {up, std::nextafter(up, 0.0), down, std::nextafter(down, 0.0),
                             std::nextafter(down, -1.0)}) {
                CHECK(in_band(t, u, region_index(t, u)));
            }
        }
    }
}

TEST_CASE("f jumps only on the declared curves") {
    const double t = 0.3;
    std::vector<double> edges{-t};
    // Negative bands accumulate at 0; list enough of them to resolve the sampling step.
    for (int k = 1; k <= 100000; ++k) {
        edges.push_back(k * std::sqrt(t));
        edges.push_back(-t / (k + 1));
    }
    std::sort(edges.begin(), edges.end());
    const double lo = -1.0;
    const double hi = 3.0;
    const int n = 40000;
    std::size_t jumps = 0;
    for (int i = 0; i < n; ++i) {
        const double u0 = lo + (hi - lo) * i / n;
        const double u1 = lo + (hi - lo) * (i + 1) / n;
        if (region_index(t, u0) != region_index(t, u1)) {
            ++jumps;
            const auto it = std::lower_bound(edges.begin(), edges.end(), u0);
            CHECK((it != edges.end() && *it <= u1));
        }
    }
    CHECK(jumps > 0);
}

TEST_CASE("f is bounded above by -2^lambda") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> tdist(1e-6, 1.0);
    std::uniform_real_distribution<double> udist(-10.0, 10.0);
    const double cap = -std::pow(2.0, kLambda);
    for (int i = 0; i < 5000; ++i) {
        CHECK(f_value(kLambda, tdist(rng), udist(rng)) <= cap + 1e-15);
    }
    CHECK(f_value(kLambda, 0.25, 0.6) == doctest::Approx(-std::cbrt(2.0)).epsilon(1e-15));
}

TEST_CASE("build_problem assembles weight, f and curves") {
    const auto spec = build_problem({}, validate_params(1, 1, 1, 1), 4.0);
    CHECK(spec.weight.singular_left);
    CHECK(spec.weight.eval(0.25) == doctest::Approx(2.0));
    CHECK(spec.nonlinearity.eval(0.25, 0.6) == doctest::Approx(-1.2599210498948732));
    REQUIRE(spec.nonlinearity.curves.size() == 16);

    auto find = [&](const std::string& id) -> const DiscontinuityCurve& {
        for (const auto& c : spec.nonlinearity.curves) {
            if (c.id == id) {
                return c;
            }
        }
        FAIL("missing curve " << id);
        return spec.nonlinearity.curves.front();
    };
    const auto& g1 = find("gamma_1");
    CHECK(g1.value(0.25) == doctest::Approx(0.5));
    CHECK(-g1.second_derivative(0.25) == doctest::Approx(2.0));
    const auto& h1 = find("gamma_hat_1");
    CHECK(h1.value(0.5) == doctest::Approx(-0.25));
    CHECK(h1.second_derivative(0.5) == 0.0);
    CHECK(find("gamma_8").value(1.0) == doctest::Approx(8.0));
    for (const auto& c : spec.nonlinearity.curves) {
        CHECK(c.kind_hint == CurveKind::Inviable);
        CHECK(c.epsilon == 0.05);
    }
    REQUIRE(spec.nonlinearity.local_bound);
    CHECK(spec.nonlinearity.local_bound(0.5, 4.0) == doctest::Approx(std::cbrt(4.0)));
    CHECK(spec.nonlinearity.local_bound(0.5, 1.0) == doctest::Approx(std::cbrt(2.0)));
}

TEST_CASE("measurable_decomposition") {
    const std::vector<double> ts{0.25};
    const auto pos = measurable_decomposition(GridFunction::sample(9, [](double) { return 0.6; }, [](double) { return 0.0; }), ts);
    REQUIRE(pos.entries.size() == 1);
    CHECK(pos.entries[0].set == BandSet::I);
    CHECK(pos.entries[0].n == 2);

    const auto neg = measurable_decomposition(GridFunction::sample(9, [](double) { return -1.0; }, [](double) { return 0.0; }), ts);
    CHECK(neg.entries[0].set == BandSet::K);
    CHECK(neg.entries[0].f_from_set == doctest::Approx(-std::cbrt(2.0)));

    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) {
        grid.push_back(i / 400.0);
    }
    for (int trial = 0; trial < 20; ++trial) {
        const double a = nd(rng);
        const double b = nd(rng);
        const double c = 0.3 * nd(rng);
        const auto u = GridFunction::sample(
            65, [&](double t) { return c + a * t + b * std::sin(5 * t); },
            [&](double t) { return a + 5 * b * std::cos(5 * t); });
        const auto rep = measurable_decomposition(u, grid);
        CHECK(rep.exhaustive_and_disjoint);
        CHECK(rep.consistent);
        CHECK(rep.entries.size() == 400);  // t = 0 skipped
        for (const auto& e : rep.entries) {
            CHECK(e.n == region_index(e.t, e.u));
        }
    }
}

TEST_CASE("every curve of the example is classified Inviable_upper") {
    const auto spec = build_problem({}, validate_params(1, 1, 1, 1), 4.0);
    const double floor_margin = std::pow(2.0, kLambda);
    for (const auto& curve : spec.nonlinearity.curves) {
        const int k = std::stoi(curve.id.substr(curve.id.rfind('_') + 1));
        if (k > 5) {
            continue;
        }
        const auto r = classify_curve(spec, curve);
        CHECK_MESSAGE(r.verdict == Verdict::InviableUpper, curve.id);
        CHECK(r.psi_margin > 0);
        if (curve.id.starts_with("gamma_hat")) {
            CHECK(r.psi_margin >= floor_margin * (1 - 1e-9));
        }
    }
    auto wide = spec.nonlinearity.curves.front();
    wide.epsilon = 0.1;
    CHECK(classify_curve(spec, wide).verdict == Verdict::InviableUpper);
}
