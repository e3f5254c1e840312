#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spdiv {

/// One exponential component of a hyperexponential jump law: density weight * rate * exp(-rate * z).
struct JumpTerm {
    double weight = 1.0;
    double rate = 1.0;

    bool operator==(const JumpTerm&) const = default;
};

/// Spectrally positive Levy process in natural parameterization:
///
///   X_t = drift_mu * t + sigma * B_t + sum of upward jumps,
///
/// where the jumps arrive at rate jump_rate and follow the hyperexponential
/// mixture jump_mix. The Laplace exponent psi(theta) = log E[exp(-theta X_1)] is
///
///   psi(theta) = -drift_mu theta + sigma^2 theta^2 / 2
///                + jump_rate (sum_k w_k mu_k / (mu_k + theta) - 1).
///
/// When sigma == 0 the paths have bounded variation and the linear drift is
/// -c with c = -drift_mu > 0.
struct LevySpec {
    double drift_mu = 0.0;
    double sigma = 0.0;
    double jump_rate = 0.0;
    std::vector<JumpTerm> jump_mix;

    bool has_jumps() const { return jump_rate > 0.0 && !jump_mix.empty(); }
    bool bounded_variation() const { return sigma == 0.0; }

    /// Mean upward jump size (0 without jumps).
    double mean_jump() const;
    /// E[X_1] = drift_mu + jump_rate * mean_jump().
    double mean() const;

    bool operator==(const LevySpec&) const = default;
};

/// Checks every LevySpec invariant. Returns the first violated invariant, or
/// nullopt when the spec is valid.
std::optional<std::string> validate(const LevySpec& spec);

/// Throws std::invalid_argument carrying the diagnostic of validate().
void require_valid(const LevySpec& spec);

/// psi(theta); theta must be >= 0.
double laplace_exponent(const LevySpec& spec, double theta);
/// psi'(theta); theta must be >= 0. psi'(0) = -E[X_1].
double laplace_exponent_deriv(const LevySpec& spec, double theta);

/// Rational-function versions without the theta >= 0 restriction. Used by the
/// scale-function root finder on the negative axis; undefined at the poles
/// theta = -mu_k.
double psi_unrestricted(const LevySpec& spec, double theta);
double psi_deriv_unrestricted(const LevySpec& spec, double theta);

/// Phi(q) = largest root of psi(s) = q, for q > 0.
double phi_inverse(const LevySpec& spec, double q);

}  // namespace spdiv
