#pragma once

#include "spdiv/levy_model.hpp"
#include "spdiv/payoff.hpp"
#include "spdiv/scale_functions.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdiv {

/// Single-regime dividend / capital-injection problem with a final payoff
/// omega paid at an independent exponential(lambda) time:
///
///   sup E_x[ int e^{-q t} dD - phi int e^{-q t} dR + lambda int e^{-q t} omega(U_t) dt ],
///
/// with q = delta + lambda. lambda = 0 gives the classical bail-out problem.
struct AuxProblem {
    LevySpec spec;
    double lambda = 0.0;
    double delta = 0.0;
    double phi = 2.0;
    ConcavePayoff payoff = make_payoff({{0.0, 0.0}}, 1.0);

    double q() const { return delta + lambda; }
};

std::optional<std::string> validate(const AuxProblem& problem);
void require_valid(const AuxProblem& problem);

/// Closed forms of the double-barrier NPV for a fixed evaluator and any
/// piecewise-linear payoff. Every integral of the piecewise-constant omega'_+
/// against W_q, Z_q is reduced to differences of Z_q and Zbar_q at the
/// payoff knots, so no quadrature is involved.
class AuxClosedForm {
public:
    AuxClosedForm(ScaleEvaluator eval, PiecewiseLinear omega, double lambda, double phi);

    const ScaleEvaluator& evaluator() const { return eval_; }
    const PiecewiseLinear& omega() const { return omega_; }
    double lambda() const { return lambda_; }
    double phi() const { return phi_; }
    double q() const { return eval_.q(); }

    /// l(x) = Z_q(x) - lambda int_0^x omega'_+(y) W_q(y) dy - phi.
    double ell(double x) const;
    /// l'(x) = W_q(x) (q - lambda omega'_+(x)), x > 0.
    double ell_deriv(double x) const;

    /// NPV of the (0, b) double-barrier strategy, extended linearly with
    /// slope 1 above b and slope phi below 0.
    double value(double b, double x) const;
    /// Same, for many x sharing the b-dependent constants.
    std::vector<double> values(double b, std::span<const double> xs) const;
    /// d/dx value on [0, b].
    double value_derivative(double b, double x) const;
    /// d^2/dx^2 value on (0, b); requires W_q differentiable there.
    double value_second(double b, double x) const;

private:
    struct Breaks {
        std::vector<double> t;  // 0 = t_0 < ... < t_M = upper
        std::vector<double> d;  // omega'_+ on [t_k, t_{k+1})
    };
    Breaks breaks_up_to(double upper) const;
    // sum_k d_k [F(t_{k+1} - x) - F(t_k - x)] for F in {W, Z, Zbar}
    template <class F>
    double segment_sum(const Breaks& br, double x, F&& f) const;
    double value_on_band(const Breaks& br, double b, double ell_b, double w_b, double x) const;

    ScaleEvaluator eval_;
    PiecewiseLinear omega_;
    double lambda_;
    double phi_;
};

struct AuxSolution {
    double barrier = 0.0;
    AuxProblem problem;
    AuxClosedForm closed_form;

    double value(double x) const { return closed_form.value(barrier, x); }
    double value_derivative(double x) const { return closed_form.value_derivative(barrier, x); }
};

/// l(x) for the problem's payoff.
double ell(const AuxProblem& problem, double x);

/// Unique zero b^omega of l. The search starts at Z_q^{-1}(phi), or at
/// `warm_start` when given, and expands the bracket geometrically before
/// polishing to |l| < 1e-12.
AuxSolution barrier_root(const AuxProblem& problem, std::optional<double> warm_start = std::nullopt);

/// Same search on an already-built closed form (used by the regime solver).
double barrier_root(const AuxClosedForm& form, std::optional<double> warm_start = std::nullopt);

double value(const AuxProblem& problem, double b, double x);
double value_derivative(const AuxProblem& problem, double b, double x);

/// g(x) = V_{0,b^omega}(x) - V_{0,b}(x) on the grid.
std::vector<double> dominance_gap(const AuxProblem& problem, double b, std::span<const double> grid);

/// (A - q) V_{0,b}(x) + lambda omega(x) for x > 0, x != b, with
///   A f = drift_mu f' + sigma^2/2 f'' + eta int (f(x+z) - f(x)) dF(z).
double hjb_residual(const AuxProblem& problem, double b, double x);
double hjb_residual(const AuxClosedForm& form, double b, double x);

}  // namespace spdiv
