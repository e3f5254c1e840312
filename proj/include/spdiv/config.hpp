#pragma once

#include "spdiv/aux_solver.hpp"
#include "spdiv/levy_model.hpp"
#include "spdiv/mc_simulator.hpp"
#include "spdiv/payoff.hpp"
#include "spdiv/regime_solver.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdiv {

/// Parse or semantic error, already formatted as "source:line: key: message".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Source lines of keys and sections, for diagnostics. Not part of equality.
struct ConfigLocations {
    std::string source;
    std::map<std::string, int> lines;

    bool operator==(const ConfigLocations&) const { return true; }
};

struct LevySection {
    std::string name;
    LevySpec spec;

    bool operator==(const LevySection&) const = default;
};

struct ChainSection {
    std::vector<std::string> states;
    std::vector<std::vector<double>> switch_rates;
    std::vector<double> discounts;

    bool operator==(const ChainSection&) const = default;
};

struct JumpSection {
    std::string from;
    std::string to;
    SwitchJump jump;

    bool operator==(const JumpSection&) const = default;
};

struct ProblemSection {
    std::optional<double> phi;
    std::vector<Knot> payoff_knots{{0.0, 0.0}};
    double payoff_tail = 1.0;
    std::optional<double> lambda;
    std::optional<double> delta;
    std::optional<std::string> state;

    bool operator==(const ProblemSection&) const = default;
};

/// One document drives every command; each section is optional until a
/// command needs it.
///
///   [levy.<state>]     drift_mu, sigma, jump_rate, jump_mix = "w:rate, w:rate"
///   [chain]            states = "a, b", switch_rates = "0, 1; 0.5, 0", discounts
///   [jumps.<i>.<j>]    kind = none | hyperexp, weights, rates
///   [problem]          phi, payoff_knots = "x:v, x:v", payoff_tail, lambda, delta, state
///   [solver]           tol, max_iter, grid_points
///   [sim]              paths, dt, tmax, seed, antithetic
///
/// Lines starting with '#' are comments.
struct ModelConfig {
    std::vector<LevySection> levy;
    std::optional<ChainSection> chain;
    std::vector<JumpSection> jumps;
    ProblemSection problem;
    SolverOptions solver;
    SimConfig sim;
    ConfigLocations where;

    bool operator==(const ModelConfig&) const = default;

    const LevySection* find_levy(const std::string& name) const;
};

ModelConfig parse_config(const std::string& text, const std::string& source = "<config>");
ModelConfig load_config(const std::string& path);
/// Writes every field with 17 significant digits, so parsing the output
/// reproduces the same ModelConfig.
std::string serialize(const ModelConfig& config);

/// Single-regime problem from [problem] and the selected [levy.*] section
/// (problem.state, or the only one present).
AuxProblem to_aux_problem(const ModelConfig& config);
/// Name of the state to_aux_problem uses.
std::string aux_state(const ModelConfig& config);

/// Regime-switching model from [chain], [levy.*], [jumps.*] and problem.phi.
RegimeModel to_regime_model(const ModelConfig& config);

}  // namespace spdiv
