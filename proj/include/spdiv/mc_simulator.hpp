#pragma once

#include "spdiv/levy_model.hpp"
#include "spdiv/payoff.hpp"
#include "spdiv/regime_solver.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spdiv {

struct SimConfig {
    std::size_t n_paths = 10000;
    /// Step for the Brownian part; steps also stop at every jump and switch.
    double dt = 1e-3;
    /// Path truncation horizon; 0 picks the smallest t with e^{-q t} < 1e-8.
    double t_max = 0.0;
    std::uint64_t rng_seed = 1;
    /// Pairs paths with negated Gaussian increments; n_paths must then be even.
    bool antithetic = false;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;

    bool operator==(const SimConfig&) const = default;
};

/// Horizon actually used for discount rate q_min.
double effective_horizon(const SimConfig& config, double q_min);

std::optional<std::string> validate(const SimConfig& config, double q_min);

struct SimEstimate {
    double mean = 0.0;
    /// Sample standard error plus the truncation bias allowance.
    double std_error = 0.0;
    /// Independent samples (antithetic pairs count once).
    std::size_t n_effective = 0;
};

/// NPV of the (0, b) strategy for the single-regime problem:
/// E_x[ int e^{-qt} dD + lambda int e^{-qt} omega(U_t) dt - phi int e^{-qt} dR ],
/// q = delta + lambda.
SimEstimate simulate_aux_npv(const LevySpec& spec, const PiecewiseLinear& payoff, double lambda, double delta,
                             double phi, double b, double x0, const SimConfig& config);

struct ExitEstimates {
    /// E_x[e^{-q tau_0^-}; tau_0^- < tau_b^+]
    SimEstimate down_first;
    /// E_x[e^{-q tau_b^+}; tau_b^+ < tau_0^-]
    SimEstimate up_first;
    /// E_x[e^{-q sigma_b^+}], X reflected from above at b, until it reaches 0.
    SimEstimate reflected_down;
};

ExitEstimates estimate_exit_identities(const LevySpec& spec, double q, double b, double x, const SimConfig& config);

/// NPV of the (0, b_{Y_t}) strategy for the regime-switching model started at (x0, i0).
SimEstimate simulate_regime_npv(const RegimeModel& model, const std::vector<double>& barriers, double x0,
                                std::size_t i0, const SimConfig& config);

struct BoundIntegrals {
    /// E_{0,i}[ int e^{-delta_min t} d(inf_{s<=t} X_s ^ 0) ] (<= 0)
    SimEstimate lower;
    /// E_{0,i}[ int e^{-delta_min t} d(sup_{s<=t} X_s v 0) ] (>= 0)
    SimEstimate upper;
    /// Whether the upper integral has settled: its increment over the second
    /// half of the horizon is within noise.
    bool upper_converged = false;
};

/// Integrals for the bounds x + phi * lower <= V(x, i) <= x + upper.
BoundIntegrals estimate_value_bounds(const RegimeModel& model, std::size_t i0, const SimConfig& config);

}  // namespace spdiv
