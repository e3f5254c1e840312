#include "models.hpp"

#include "spdiv/scale_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace spdiv;
using namespace spdiv::testing;

TEST_CASE("sigma^2 = 2, q = 1 gives sinh and cosh") {
    const ScaleEvaluator ev(brownian(), 1.0);
    for (double x : {0.0, 0.3, 1.0, 2.5, 10.0}) {
        CHECK(ev.W(x) == doctest::Approx(std::sinh(x)).epsilon(1e-13));
        CHECK(ev.Z(x) == doctest::Approx(std::cosh(x)).epsilon(1e-13));
        CHECK(ev.Zbar(x) == doctest::Approx(std::sinh(x)).epsilon(1e-12));
    }
    CHECK(ev.W(-1.0) == 0.0);
    CHECK(ev.Z(-1.0) == 1.0);
    CHECK(ev.Z_inverse(2.0) == doctest::Approx(std::acosh(2.0)).epsilon(1e-14));
}

TEST_CASE("exponential gains: W from the two roots of a quadratic") {
    // Drift -c with Exp(mu) gains at rate eta: psi(s) - q = 0 clears to
    // c s^2 + (c mu - eta - q) s - q mu = 0.
    const double c = 1.0, eta = 1.0, mu = 1.0, q = 0.4;
    const ScaleEvaluator ev(cramer_lundberg(), q);
    const double B = c * mu - eta - q;
    const double disc = std::sqrt(B * B + 4.0 * c * q * mu);
    const double s0 = (-B + disc) / (2.0 * c), s1 = (-B - disc) / (2.0 * c);
    auto dpsi = [&](double s) { return c - eta * mu / ((mu + s) * (mu + s)); };
    for (double x : {0.0, 0.5, 2.0, 6.0}) {
        const double w = std::exp(s0 * x) / dpsi(s0) + std::exp(s1 * x) / dpsi(s1);
        CHECK(ev.W(x) == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(ev.w_at_zero() == doctest::Approx(1.0 / c).epsilon(1e-13));
    CHECK(ev.phi_q() == doctest::Approx(s0).epsilon(1e-13));
}

TEST_CASE("W at 0 is zero for unbounded variation") {
    const ScaleEvaluator ev(mixed(), 0.7);
    CHECK(std::abs(ev.W(0.0)) < 1e-14);
    CHECK(ev.w_at_zero() == 0.0);
}

TEST_CASE("derivatives and integrals agree with finite differences") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        const ScaleEvaluator ev(s, 0.6);
        for (double x : {0.2, 1.0, 3.0}) {
            const double h = 1e-5;
            CHECK(std::abs(ev.W_deriv(x) - (ev.W(x + h) - ev.W(x - h)) / (2 * h)) < 1e-6 * (1 + ev.W_deriv(x)));
            CHECK(std::abs(ev.W_second(x) - (ev.W_deriv(x + h) - ev.W_deriv(x - h)) / (2 * h)) <
                  1e-5 * (1 + std::abs(ev.W_second(x))));
            CHECK(std::abs((ev.Z(x + h) - ev.Z(x - h)) / (2 * h) - 0.6 * ev.W(x)) < 1e-6 * (1 + ev.W(x)));
            CHECK(std::abs((ev.Zbar(x + h) - ev.Zbar(x - h)) / (2 * h) - ev.Z(x)) < 1e-6 * ev.Z(x));
        }
    }
}

TEST_CASE("Laplace transform residual is tiny beyond Phi(q)") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        for (double q : {0.1, 1.0}) {
            const ScaleEvaluator ev(s, q);
            for (double off : {0.1, 0.5, 1.0, 2.0, 4.0})
                CHECK(verify_laplace_transform(ev, ev.phi_q() + off, 30.0 / off) < 1e-6);
        }
    }
}

TEST_CASE("Laplace transform by an independent trapezoid rule") {
    const ScaleEvaluator ev(mixed(), 0.5);
    const double s = ev.phi_q() + 1.0;
    const int n = 400000;
    const double H = 40.0, h = H / n;
    double sum = 0.5 * (ev.W(0.0) + std::exp(-s * H) * ev.W(H));
    for (int k = 1; k < n; ++k) sum += std::exp(-s * k * h) * ev.W(k * h);
    CHECK(sum * h == doctest::Approx(1.0 / (laplace_exponent(mixed(), s) - 0.5)).epsilon(1e-8));
}

TEST_CASE("residues sum to W(0+)") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        const ScaleEvaluator ev(s, 0.3);
        double sum = 0.0;
        for (double c : ev.residues()) sum += c;
        CHECK(std::abs(sum - ev.w_at_zero()) < 1e-12);
        for (std::size_t j = 1; j < ev.roots().size(); ++j) CHECK(ev.roots()[j] < ev.roots()[j - 1]);
    }
}

TEST_CASE("evaluation past the horizon throws") {
    const ScaleEvaluator ev(brownian(), 1.0);
    CHECK_THROWS_AS(ev.W(ev.horizon() * 1.01), std::overflow_error);
    CHECK_NOTHROW(ev.W(ev.horizon() * 0.99));
}

TEST_CASE("Z is increasing and Z_inverse inverts it") {
    for (const auto& [name, s] : test_specs()) {
        CAPTURE(name);
        const ScaleEvaluator ev(s, 0.25);
        double prev = 1.0;
        for (double x = 0.1; x < 10.0; x += 0.1) {
            CHECK(ev.Z(x) > prev);
            prev = ev.Z(x);
        }
        for (double level : {1.2, 2.0, 5.0}) CHECK(ev.Z(ev.Z_inverse(level)) == doctest::Approx(level).epsilon(1e-12));
    }
}
