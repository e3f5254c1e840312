#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spdiv {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitVerify = 4 };

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> paths;
    std::optional<double> dt;
    std::optional<double> tmax;
    std::optional<std::uint64_t> seed;
    std::optional<bool> antithetic;
    std::optional<std::string> state;
    std::optional<double> x0;
    /// Barrier override for simulate: one value, or one per chain state.
    std::optional<std::vector<double>> barriers;
    /// summary.txt written by solve-aux / solve-regime, read for barriers.
    std::optional<std::string> from_summary;
    std::optional<std::size_t> points;
};

/// Prints the barrier, V(0) and smooth-fit residuals of the single-regime problem.
int cmd_solve_aux(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// Prints the optimal barrier per state, the iteration trace and the final rho.
int cmd_solve_regime(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// Monte Carlo NPV of a barrier strategy next to its analytic value.
int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// Runs the identity battery and prints one PASS/FAIL line per check.
int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err);
/// Scale functions and value curve (single regime) or per-state value curves.
int cmd_curve(const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Dispatches by command name; unknown names return kExitConfig.
int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Parses "1.5, 2" into numbers; throws std::invalid_argument.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace spdiv
