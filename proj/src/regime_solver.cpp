#include "spdiv/regime_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdiv {

double SwitchJump::mean() const {
    if (kind == Kind::none) return 0.0;
    double m = 0.0;
    for (const auto& t : mix) m += t.weight / t.rate;
    return -m;
}

double RegimeModel::lambda(std::size_t i) const {
    double total = 0.0;
    for (std::size_t j = 0; j < size(); ++j)
        if (j != i) total += switch_rates[i][j];
    return total;
}

double RegimeModel::beta() const {
    double b = 0.0;
    for (std::size_t i = 0; i < size(); ++i) b = std::max(b, lambda(i) / q(i));
    return b;
}

std::optional<std::string> validate(const RegimeModel& m) {
    const std::size_t n = m.size();
    if (n < 2) return "at least two states are required (every state must switch)";
    if (m.switch_rates.size() != n || m.discounts.size() != n || m.levy.size() != n || m.switch_jumps.size() != n)
        return "per-state lists must all have one entry per state";
    if (!(m.phi > 1.0) || !std::isfinite(m.phi)) return "phi must exceed 1";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string tag = "state " + m.states[i] + ": ";
        if (m.switch_rates[i].size() != n) return tag + "switch_rates row has wrong length";
        if (m.switch_jumps[i].size() != n) return tag + "switch_jumps row has wrong length";
        if (!(m.discounts[i] > 0.0) || !std::isfinite(m.discounts[i])) return tag + "discount must be > 0";
        if (auto d = validate(m.levy[i])) return tag + *d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = m.switch_rates[i][j];
            if (!(r >= 0.0) || !std::isfinite(r)) return tag + "switch rates must be >= 0";
            const SwitchJump& jump = m.switch_jumps[i][j];
            if (r == 0.0 || jump.kind == SwitchJump::Kind::none) continue;
            if (jump.mix.empty()) return tag + "hyperexp switch jump needs weights and rates";
            double total = 0.0;
            for (const auto& t : jump.mix) {
                if (!(t.weight > 0.0 && t.weight <= 1.0)) return tag + "switch jump weight outside (0,1]";
                if (!(t.rate > 0.0) || !std::isfinite(t.rate)) return tag + "switch jump rate must be > 0";
                total += t.weight;
            }
            if (std::abs(total - 1.0) > 1e-12) return tag + "switch jump weights sum \xe2\x89\xa0 1";
        }
        if (!(m.lambda(i) > 0.0)) return tag + "total switch rate must be > 0";
    }
    return std::nullopt;
}

void require_valid(const RegimeModel& m) {
    if (auto d = validate(m)) throw std::invalid_argument("invalid RegimeModel: " + *d);
}

double ValueField::eval(double x, std::size_t i) const {
    const auto& v = values[i];
    if (x < 0.0) return v.front() + phi * x;
    if (x >= grid.back()) return v.back() + (x - grid.back());
    const double step = h();
    const std::size_t k = std::min(static_cast<std::size_t>(x / step), grid.size() - 2);
    const double t = (x - grid[k]) / step;
    return v[k] + t * (v[k + 1] - v[k]);
}

ValueField make_field(std::size_t states, double x_max, std::size_t intervals, double phi, const FieldInit& init) {
    if (!(x_max > 0.0) || intervals < 2) throw std::invalid_argument("field grid needs x_max > 0 and >= 2 intervals");
    ValueField f;
    f.phi = phi;
    f.grid.resize(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) f.grid[k] = x_max * static_cast<double>(k) / intervals;
    f.values.assign(states, std::vector<double>(intervals + 1));
    for (std::size_t i = 0; i < states; ++i)
        for (std::size_t k = 0; k <= intervals; ++k) f.values[i][k] = init(f.grid[k], i);
    return f;
}

ValueField resample(const ValueField& f, double x_max) {
    return make_field(f.states(), x_max, f.grid.size() - 1, f.phi,
                      [&](double x, std::size_t i) { return f.eval(x, i); });
}

std::optional<std::string> check_concave_class(const ValueField& f) {
    constexpr double tol = 1e-8;
    const double step = f.h();
    for (std::size_t i = 0; i < f.states(); ++i) {
        const auto& v = f.values[i];
        double prev = f.phi;
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const double s = (v[k + 1] - v[k]) / step;
            std::ostringstream where;
            where << "state " << i << ", x = " << f.grid[k] << ": slope " << s;
            if (s < 1.0 - tol) return where.str() + " below 1";
            if (s > f.phi + tol) return where.str() + " above phi";
            if (s > prev + tol) return where.str() + " increases";
            prev = s;
        }
    }
    return std::nullopt;
}

namespace {

// G(x_k) = E[f_ext(x_k - Y, j)], Y ~ Exp(r), on the grid by the recursion
// G(x_{k+1}) = e^{-rh} G(x_k) + int_0^h f(x_{k+1} - y) r e^{-ry} dy.
void add_exp_average(const ValueField& f, std::size_t j, double r, double weight, std::vector<double>& out) {
    const auto& v = f.values[j];
    const double step = f.h();
    const double rh = r * step;
    const double e = std::exp(-rh);
    const double one_minus_e = -std::expm1(-rh);
    const double first_moment = (one_minus_e - rh * e) / r;  // int_0^h y r e^{-ry} dy
    double g = v[0] - f.phi / r;
    out[0] += weight * g;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double s = (v[k + 1] - v[k]) / step;
        g = e * g + v[k + 1] * one_minus_e - s * first_moment;
        out[k + 1] += weight * g;
    }
}

std::vector<Knot> to_knots(const ValueField& f, const std::vector<double>& values) {
    std::vector<Knot> knots(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) knots[k] = {f.grid[k], values[k]};
    return knots;
}

}  // namespace

std::vector<double> hat_values(const RegimeModel& model, const ValueField& f, std::size_t i) {
    std::vector<double> out(f.grid.size(), 0.0);
    const double lam = model.lambda(i);
    for (std::size_t j = 0; j < model.size(); ++j) {
        if (j == i || model.switch_rates[i][j] == 0.0) continue;
        const double p = model.switch_rates[i][j] / lam;
        const SwitchJump& jump = model.switch_jumps[i][j];
        if (jump.kind == SwitchJump::Kind::none) {
            for (std::size_t k = 0; k < out.size(); ++k) out[k] += p * f.values[j][k];
        } else {
            for (const auto& t : jump.mix) add_exp_average(f, j, t.rate, p * t.weight, out);
        }
    }
    return out;
}

ConcavePayoff hat_operator(const RegimeModel& model, const ValueField& f, std::size_t i) {
    if (auto d = check_concave_class(f)) throw std::invalid_argument("f not in \xf0\x9d\x93\x92: " + *d);
    Concavified c = concavify(to_knots(f, hat_values(model, f, i)), 1.0);
    if (c.warning) throw std::runtime_error("hat operator, state " + std::to_string(i) + ": " + *c.warning);
    return std::move(c.payoff);
}

AuxClosedForm state_closed_form(const RegimeModel& model, std::size_t i, PiecewiseLinear omega) {
    return AuxClosedForm(ScaleEvaluator(model.levy[i], model.q(i)), std::move(omega), model.lambda(i), model.phi);
}

ValueField apply_T_b(const RegimeModel& model, const ValueField& f, const std::vector<double>& b) {
    if (b.size() != model.size()) throw std::invalid_argument("apply_T_b: one barrier per state required");
    ValueField out = f;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!(b[i] > 0.0)) throw std::invalid_argument("apply_T_b: barriers must be > 0");
        PiecewiseLinear omega(to_knots(f, hat_values(model, f, i)), 1.0);
        out.values[i] = state_closed_form(model, i, std::move(omega)).values(b[i], f.grid);
    }
    return out;
}

SupStep apply_T_sup(const RegimeModel& model, const ValueField& f, const std::optional<std::vector<double>>& warm) {
    SupStep step{f, std::vector<double>(model.size())};
    for (std::size_t i = 0; i < model.size(); ++i) {
        const AuxClosedForm form = state_closed_form(model, i, hat_operator(model, f, i).curve());
        std::optional<double> start;
        if (warm) start = (*warm)[i];
        step.barriers[i] = barrier_root(form, start);
        step.field.values[i] = form.values(step.barriers[i], f.grid);
    }
    if (auto d = check_concave_class(step.field))
        throw std::runtime_error("T_sup output left \xf0\x9d\x93\x92: " + *d);
    return step;
}

double rho_metric(const ValueField& f, const ValueField& g) {
    if (f.grid.size() != g.grid.size() || f.states() != g.states() || f.x_max() != g.x_max() || f.phi != g.phi)
        throw std::invalid_argument("grid mismatch");
    double rho = 0.0;
    for (std::size_t i = 0; i < f.states(); ++i)
        for (std::size_t k = 0; k < f.grid.size(); ++k) rho = std::max(rho, std::abs(f.values[i][k] - g.values[i][k]));
    return rho;
}

std::vector<double> RegimeSolution::decay_ratios() const {
    std::vector<double> out;
    for (std::size_t n = 1; n < trace.size(); ++n) {
        const auto& a = trace[n - 1];
        const auto& b = trace[n];
        if (a.x_max != b.x_max || !std::isfinite(a.rho) || !std::isfinite(b.rho) || a.rho == 0.0) continue;
        out.push_back(b.rho / a.rho);
    }
    return out;
}

BarrierValue barrier_value(const RegimeModel& model, const std::vector<double>& b, const SolverOptions& opt) {
    require_valid(model);
    if (b.size() != model.size()) throw std::invalid_argument("barrier_value: one barrier per state required");
    const double b_max = *std::max_element(b.begin(), b.end());
    const double x_max = std::max(opt.x_max.value_or(0.0), 1.25 * b_max);
    BarrierValue out;
    out.value = make_field(model.size(), x_max, opt.grid_points, model.phi, [](double x, std::size_t) { return x; });
    for (int n = 1; n <= opt.max_iter; ++n) {
        ValueField next = apply_T_b(model, out.value, b);
        out.final_rho = rho_metric(next, out.value);
        out.value = std::move(next);
        out.iterations = n;
        if (out.final_rho < opt.tol) return out;
    }
    throw std::runtime_error("no convergence of T_b iteration: rho=" + std::to_string(out.final_rho));
}

RegimeSolution solve(const RegimeModel& model, const SolverOptions& opt, const FieldInit& seed) {
    require_valid(model);
    if (!(opt.tol > 0.0)) throw std::invalid_argument("solver tol must be > 0");
    if (opt.max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");

    double x_max = 0.0;
    if (opt.x_max) {
        x_max = *opt.x_max;
    } else {
        for (std::size_t i = 0; i < model.size(); ++i)
            x_max = std::max(x_max, 4.0 * ScaleEvaluator(model.levy[i], model.q(i)).Z_inverse(model.phi));
    }

    const FieldInit init = seed ? seed : FieldInit([](double x, std::size_t) { return x; });
    ValueField f = make_field(model.size(), x_max, opt.grid_points, model.phi, init);
    std::optional<std::vector<double>> warm;
    RegimeSolution sol;
    bool converged = false;

    for (int n = 1; n <= opt.max_iter; ++n) {
        SupStep step = apply_T_sup(model, f, warm);
        warm = step.barriers;
        sol.iterations = n;
        const double b_max = *std::max_element(step.barriers.begin(), step.barriers.end());
        if (b_max > 0.8 * f.x_max()) {
            double grown = f.x_max();
            while (b_max > 0.8 * grown) grown *= 2.0;
            f = resample(step.field, grown);
            sol.trace.push_back({n, std::nan(""), grown, step.barriers});
            continue;
        }
        const double rho = rho_metric(step.field, f);
        sol.trace.push_back({n, rho, f.x_max(), step.barriers});
        f = std::move(step.field);
        sol.final_rho = rho;
        if (rho < opt.tol) {
            converged = true;
            break;
        }
    }

    if (!converged) {
        const auto ratios = sol.decay_ratios();
        std::ostringstream msg;
        msg << "no convergence after " << opt.max_iter << " iterations: rho=" << sol.final_rho
            << ", last decay ratio=" << (ratios.empty() ? std::nan("") : ratios.back())
            << ", beta=" << model.beta();
        throw std::runtime_error(msg.str());
    }

    SupStep check = apply_T_sup(model, f, warm);
    sol.post_check_rho = rho_metric(check.field, f);
    sol.barriers = std::move(check.barriers);
    sol.value = std::move(f);
    return sol;
}

}  // namespace spdiv
