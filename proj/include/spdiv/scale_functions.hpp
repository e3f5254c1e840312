#pragma once

#include "spdiv/levy_model.hpp"

#include <vector>

namespace spdiv {

/// Exact q-scale functions of a spectrally positive Levy process with
/// hyperexponential jumps.
///
/// 1/(psi(s) - q) is a proper rational function with simple real poles
/// s_0 = Phi(q) > 0 > s_1 > ... > s_n, so the scale function is the
/// exponential sum
///
///   W_q(x) = sum_j c_j exp(s_j x),   c_j = 1 / psi'(s_j),   x >= 0,
///
/// and W_q(x) = 0 for x < 0. Z_q and Zbar_q follow by integrating termwise.
///
/// The exponential in s_0 overflows for large x, so evaluation is capped at
/// s_0 * x <= 700 and throws std::overflow_error beyond.
class ScaleEvaluator {
public:
    ScaleEvaluator(const LevySpec& spec, double q);

    double q() const { return q_; }
    const std::vector<double>& roots() const { return roots_; }
    const std::vector<double>& residues() const { return residues_; }
    double phi_q() const { return roots_.front(); }
    /// W_q(0+): 0 for unbounded variation, 1/c for bounded variation.
    double w_at_zero() const { return w_at_zero_; }
    /// Largest x accepted by the evaluation functions.
    double horizon() const { return horizon_; }
    /// -psi'(0+) = E[X_1].
    double mean_increment() const { return spec_.mean(); }
    const LevySpec& spec() const { return spec_; }

    double W(double x) const;
    /// W_q'(x) for x > 0.
    double W_deriv(double x) const;
    /// W_q''(x) for x > 0.
    double W_second(double x) const;
    double Z(double x) const;
    double Zbar(double x) const;
    /// Smallest x >= 0 with Z_q(x) = level (level >= 1).
    double Z_inverse(double level) const;

private:
    void check_horizon(double x) const;

    LevySpec spec_;
    double q_;
    std::vector<double> roots_;
    std::vector<double> residues_;
    double w_at_zero_;
    double horizon_;
};

/// Convenience spelling of the ScaleEvaluator constructor.
ScaleEvaluator build_scale_evaluator(const LevySpec& spec, double q);

/// Relative error between numerical quadrature of
/// int_0^horizon exp(-s x) W_q(x) dx and 1/(psi(s) - q).
double verify_laplace_transform(const ScaleEvaluator& eval, double s, double horizon);

}  // namespace spdiv
