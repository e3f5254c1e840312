#pragma once

#include "spdiv/aux_solver.hpp"
#include "spdiv/levy_model.hpp"
#include "spdiv/payoff.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spdiv {

/// Law of the jump J_ij <= 0 applied at a switch i -> j: either none
/// (point mass at 0) or J = -Y with Y hyperexponential.
struct SwitchJump {
    enum class Kind { none, hyperexp };
    Kind kind = Kind::none;
    std::vector<JumpTerm> mix;

    /// E[J] (<= 0).
    double mean() const;

    bool operator==(const SwitchJump&) const = default;
};

struct RegimeModel {
    std::vector<std::string> states;
    /// switch_rates[i][j] = lambda_ij for i != j; the diagonal is ignored.
    std::vector<std::vector<double>> switch_rates;
    std::vector<double> discounts;
    std::vector<LevySpec> levy;
    /// switch_jumps[i][j], used only where lambda_ij > 0.
    std::vector<std::vector<SwitchJump>> switch_jumps;
    double phi = 2.0;

    std::size_t size() const { return states.size(); }
    double lambda(std::size_t i) const;
    double q(std::size_t i) const { return discounts[i] + lambda(i); }
    /// max_i lambda_i / (lambda_i + delta_i), the contraction modulus.
    double beta() const;
};

std::optional<std::string> validate(const RegimeModel& model);
void require_valid(const RegimeModel& model);

/// Per-state values on a uniform grid [0, x_max], extended with slope phi
/// below 0 and slope 1 above x_max.
struct ValueField {
    std::vector<double> grid;
    std::vector<std::vector<double>> values;  // values[i][k] = V(grid[k], i)
    double phi = 2.0;

    std::size_t states() const { return values.size(); }
    double h() const { return grid[1] - grid[0]; }
    double x_max() const { return grid.back(); }
    double eval(double x, std::size_t i) const;
};

using FieldInit = std::function<double(double x, std::size_t state)>;

ValueField make_field(std::size_t states, double x_max, std::size_t intervals, double phi, const FieldInit& init);
/// The same field sampled (through its extensions) on a grid with a new x_max.
ValueField resample(const ValueField& f, double x_max);

/// Membership in C: per state concave on the grid with slopes in
/// [1 - 1e-8, phi + 1e-8]. Returns a diagnostic when it fails.
std::optional<std::string> check_concave_class(const ValueField& f);

/// Raw f_hat(., i) on f's grid, no shape check and no concavification.
std::vector<double> hat_values(const RegimeModel& model, const ValueField& f, std::size_t i);

/// f_hat(., i) for f in C, concavified with tail slope 1.
/// Throws std::invalid_argument "f not in C" on bad input and
/// std::runtime_error when concavify has to move values by more than 1e-6.
ConcavePayoff hat_operator(const RegimeModel& model, const ValueField& f, std::size_t i);

/// Closed form of the state-i auxiliary problem with payoff omega.
AuxClosedForm state_closed_form(const RegimeModel& model, std::size_t i, PiecewiseLinear omega);

ValueField apply_T_b(const RegimeModel& model, const ValueField& f, const std::vector<double>& b);

struct SupStep {
    ValueField field;
    std::vector<double> barriers;
};

SupStep apply_T_sup(const RegimeModel& model, const ValueField& f,
                    const std::optional<std::vector<double>>& warm = std::nullopt);

/// max_i sup_x |f(x,i) - g(x,i)|. Both extensions have matching slopes, so
/// the sup over them is attained at the grid ends. Throws "grid mismatch".
double rho_metric(const ValueField& f, const ValueField& g);

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 2000;
    std::size_t grid_points = 2000;
    /// Initial grid end; default is 4x the largest single-regime lambda = 0 barrier.
    std::optional<double> x_max;

    bool operator==(const SolverOptions&) const = default;
};

struct TraceEntry {
    int iteration = 0;
    double rho = 0.0;
    double x_max = 0.0;
    std::vector<double> barriers;
};

struct RegimeSolution {
    ValueField value;
    std::vector<double> barriers;
    int iterations = 0;
    double final_rho = 0.0;
    /// rho(T_sup V, V) from one extra application after convergence.
    double post_check_rho = 0.0;
    std::vector<TraceEntry> trace;

    /// rho_{n+1} / rho_n over trace entries on the final grid.
    std::vector<double> decay_ratios() const;
};

/// V_{0,b}: the fixed point of T_b for a fixed barrier vector, iterated from
/// f(x, i) = x on a grid reaching at least 1.25 max_i b_i.
struct BarrierValue {
    ValueField value;
    int iterations = 0;
    double final_rho = 0.0;
};
BarrierValue barrier_value(const RegimeModel& model, const std::vector<double>& b, const SolverOptions& options = {});

/// Iterates T_sup from the seed (default f(x, i) = x) until rho < tol.
/// Throws std::runtime_error "no convergence ..." after max_iter.
RegimeSolution solve(const RegimeModel& model, const SolverOptions& options = {}, const FieldInit& seed = {});

}  // namespace spdiv
