#include "models.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace spdiv;
using namespace spdiv::testing;

TEST_CASE("laplace exponent of a Brownian motion is a parabola") {
    const LevySpec s{0.7, 1.3, 0.0, {}};
    for (double t : {0.0, 0.5, 2.0, 7.0})
        CHECK(laplace_exponent(s, t) == doctest::Approx(-0.7 * t + 0.5 * 1.69 * t * t).epsilon(1e-14));
}

TEST_CASE("exponent derivative matches central differences") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        for (double t : {0.1, 0.8, 3.0}) {
            const double h = 1e-5;
            const double fd = (laplace_exponent(s, t + h) - laplace_exponent(s, t - h)) / (2 * h);
            CHECK(std::abs(laplace_exponent_deriv(s, t) - fd) < 1e-6);
        }
        CHECK(laplace_exponent_deriv(s, 0.0) == doctest::Approx(-s.mean()).epsilon(1e-14));
    }
}

TEST_CASE("Phi(q) inverts psi on the positive axis") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        for (double q : {0.05, 0.5, 1.0, 4.0}) {
            const double r = phi_inverse(s, q);
            CHECK(r > 0.0);
            CHECK(laplace_exponent(s, r) == doctest::Approx(q).epsilon(1e-12));
        }
    }
}

TEST_CASE("Phi(q) of a Brownian motion with drift has the quadratic-formula value") {
    const double mu = 0.4, sigma = 1.5, q = 0.3;
    const double expected = (mu + std::sqrt(mu * mu + 2.0 * sigma * sigma * q)) / (sigma * sigma);
    CHECK(phi_inverse({mu, sigma, 0.0, {}}, q) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("mean counts drift and jumps") {
    CHECK(mixed().mean() == doctest::Approx(-0.5 + 0.6 / 2.0 + 0.4 / 5.0));
    CHECK(cramer_lundberg().mean() == doctest::Approx(0.0));
}

TEST_CASE("invalid specs are rejected") {
    CHECK(validate(brownian()) == std::nullopt);
    CHECK(validate(LevySpec{0.0, -1.0, 0.0, {}}).has_value());
    CHECK(validate(LevySpec{1.0, 0.0, 1.0, {{1.0, 1.0}}}).has_value());
    CHECK(validate(LevySpec{-1.0, 0.0, 1.0, {{0.5, 1.0}}}).has_value());
    CHECK(validate(LevySpec{-1.0, 0.0, 1.0, {{1.0, -2.0}}}).has_value());
    CHECK(validate(LevySpec{0.0, 0.0, 0.0, {}}).has_value());
    CHECK_THROWS_AS(require_valid(LevySpec{0.0, 0.0, 0.0, {}}), std::invalid_argument);
}
