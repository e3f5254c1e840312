#include "models.hpp"

#include "spdiv/aux_solver.hpp"
#include "spdiv/mc_simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace spdiv;
using namespace spdiv::testing;

namespace {

struct Case {
    std::string name;
    AuxProblem problem;
};

std::vector<Case> twelve_cases() {
    std::vector<Case> out;
    const auto payoffs = test_payoffs();
    for (const auto& [name, s] : test_specs())
        for (std::size_t p = 0; p < payoffs.size(); ++p)
            for (double phi : {1.6, 3.0})
                out.push_back({name + "/payoff" + std::to_string(p) + "/phi" + std::to_string(phi),
                               aux(s, 0.8, 0.2, phi, payoffs[p])});
    return out;
}

}  // namespace

TEST_CASE("lambda = 0: barrier is Z^{-1}(phi) and the value solves V'' = V") {
    // sigma^2 = 2, q = 1: V = A cosh x + phi sinh x with V'(b) = 1 and V''(b) = 0.
    for (double phi : {1.5, 2.0, 4.0}) {
        const AuxSolution s = barrier_root(aux(brownian(), 0.0, 1.0, phi, make_payoff({{0.0, 0.0}}, 1.0)));
        const double b = std::acosh(phi);
        CHECK(s.barrier == doctest::Approx(b).epsilon(1e-12));
        const double A = (1.0 - phi * std::cosh(b)) / std::sinh(b);
        for (double x : {0.0, 0.3, 0.9, b}) {
            CHECK(s.value(x) == doctest::Approx(A * std::cosh(x) + phi * std::sinh(x)).epsilon(1e-11));
            CHECK(s.value_derivative(x) == doctest::Approx(A * std::sinh(x) + phi * std::cosh(x)).epsilon(1e-11));
        }
        CHECK(s.value(b + 2.0) == doctest::Approx(s.value(b) + 2.0).epsilon(1e-12));
        CHECK(s.value(-1.0) == doctest::Approx(s.value(0.0) - phi).epsilon(1e-12));
    }
}

TEST_CASE("linear payoff: value solves V'' - q V + lambda x = 0") {
    // sigma^2 = 2, zero drift, omega(x) = x: V = A cosh(r x) + B sinh(r x) + lambda x / q, r = sqrt(q).
    const double lambda = 0.6, delta = 0.4, q = 1.0, phi = 2.5, r = std::sqrt(q);
    const AuxSolution s = barrier_root(aux(brownian(), lambda, delta, phi, make_payoff({{0.0, 0.0}}, 1.0)));
    const double b = s.barrier;
    const double B = (phi - lambda / q) / r;
    const double A = (1.0 - lambda / q - B * r * std::cosh(r * b)) / (r * std::sinh(r * b));
    auto V = [&](double x) { return A * std::cosh(r * x) + B * std::sinh(r * x) + lambda * x / q; };
    for (double x : {0.0, 0.2 * b, 0.7 * b, b}) CHECK(s.value(x) == doctest::Approx(V(x)).epsilon(1e-10));
    // Unbounded variation: the optimal barrier also makes V'' vanish at b.
    CHECK(std::abs(A * r * r * std::cosh(r * b) + B * r * r * std::sinh(r * b)) < 1e-9);
}

TEST_CASE("smooth fit on the 12-case grid") {
    for (const auto& c : twelve_cases()) {
        CAPTURE(c.name);
        const AuxSolution s = barrier_root(c.problem);
        CHECK(std::abs(s.value_derivative(s.barrier) - 1.0) <= 1e-8);
        CHECK(std::abs(s.value_derivative(0.0) - c.problem.phi) <= 1e-8);
        CHECK(std::abs(ell(c.problem, s.barrier)) < 1e-10);
    }
}

TEST_CASE("value derivative matches finite differences of value") {
    for (const auto& c : twelve_cases()) {
        CAPTURE(c.name);
        const AuxSolution s = barrier_root(c.problem);
        for (double f : {0.2, 0.5, 0.8}) {
            const double x = f * s.barrier, h = 1e-6;
            const double fd = (s.value(x + h) - s.value(x - h)) / (2 * h);
            CHECK(std::abs(fd - s.value_derivative(x)) < 1e-6);
        }
    }
}

TEST_CASE("HJB residual vanishes inside and is nonpositive above the barrier") {
    for (const auto& c : twelve_cases()) {
        CAPTURE(c.name);
        const AuxSolution s = barrier_root(c.problem);
        const double b = s.barrier;
        for (int k = 1; k < 50; ++k) {
            const double x = b * k / 50.0;
            CHECK(std::abs(hjb_residual(c.problem, b, x)) <= 1e-6 * (1.0 + std::abs(s.value(x))));
            CHECK(hjb_residual(c.problem, b, b * (1.0 + k / 25.0)) <= 1e-8);
        }
        CHECK_THROWS(hjb_residual(c.problem, b, b));
        CHECK_THROWS(hjb_residual(c.problem, b, 0.0));
    }
}

TEST_CASE("optimal barrier dominates every other barrier") {
    for (const auto& c : twelve_cases()) {
        CAPTURE(c.name);
        const double bw = barrier_root(c.problem).barrier;
        for (double factor : {0.25, 0.5, 2.0, 4.0}) {
            std::vector<double> grid(200);
            for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 6.0 * bw * k / 199.0;
            const auto g = dominance_gap(c.problem, factor * bw, grid);
            for (std::size_t k = 0; k < g.size(); ++k) {
                CHECK(g[k] >= -1e-9);
                if (k) CHECK(g[k] >= g[k - 1] - 1e-9);
            }
        }
    }
}

TEST_CASE("barrier search from a warm start lands on the same root") {
    const AuxProblem p = aux(mixed(), 0.8, 0.2, 2.0, test_payoffs()[1]);
    const double b = barrier_root(p).barrier;
    for (double w : {0.01, 0.5 * b, 3.0 * b}) CHECK(barrier_root(p, w).barrier == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("ell is increasing then decreasing around the root") {
    const AuxProblem p = aux(cramer_lundberg(), 0.5, 0.3, 2.0, test_payoffs()[1]);
    const double b = barrier_root(p).barrier;
    CHECK(ell(p, 0.5 * b) < 0.0);
    CHECK(ell(p, 1.5 * b) > 0.0);
}

TEST_CASE("problem validation messages") {
    CHECK_THROWS_WITH(barrier_root(aux(brownian(), 0.0, 1.0, 0.5, make_payoff({{0.0, 0.0}}, 1.0))),
                      doctest::Contains("phi must exceed 1"));
    CHECK_THROWS_WITH(barrier_root(aux(brownian(), 0.5, 1.0, 1.2, test_payoffs()[1])),
                      doctest::Contains("payoff slope at 0+ exceeds phi"));
    CHECK_THROWS_WITH(barrier_root(aux(brownian(), 0.5, 0.0, 2.0, test_payoffs()[0])),
                      doctest::Contains("delta must be > 0"));
}

TEST_CASE("Monte Carlo NPV agrees with the closed form") {
    const AuxProblem p = aux(mixed(), 0.5, 0.5, 2.0, test_payoffs()[1]);
    const AuxSolution s = barrier_root(p);
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.rng_seed = 99;
    cfg.threads = 1;
    for (double x0 : {0.0, 0.5 * s.barrier, 1.5 * s.barrier}) {
        CAPTURE(x0);
        const SimEstimate e = simulate_aux_npv(p.spec, p.payoff.curve(), p.lambda, p.delta, p.phi, s.barrier, x0, cfg);
        CHECK(std::abs(e.mean - s.value(x0)) <= 3.0 * e.std_error);
    }
}
