#include "spdiv/commands.hpp"

#include "spdiv/aux_solver.hpp"
#include "spdiv/config.hpp"
#include "spdiv/mc_simulator.hpp"
#include "spdiv/regime_solver.hpp"
#include "spdiv/scale_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace spdiv {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class KeyValues {
public:
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, num(value)); }
    std::string str() const {
        std::string out;
        for (const auto& [k, v] : rows_) out += k + "=" + v + "\n";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

void write_file(const CommandOptions& opt, const std::string& name, const std::string& content) {
    if (!opt.out_dir) return;
    std::filesystem::create_directories(*opt.out_dir);
    const auto path = std::filesystem::path(*opt.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

std::string csv_row(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) out += (k ? "," : "") + num(values[k]);
    return out + "\n";
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? sep : "") + items[k];
    return out;
}

SimConfig sim_config(const ModelConfig& cfg, const CommandOptions& opt) {
    SimConfig s = cfg.sim;
    if (opt.paths) s.n_paths = *opt.paths;
    if (opt.dt) s.dt = *opt.dt;
    if (opt.tmax) s.t_max = *opt.tmax;
    if (opt.seed) s.rng_seed = *opt.seed;
    if (opt.antithetic) s.antithetic = *opt.antithetic;
    return s;
}

std::map<std::string, std::string> read_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open summary file");
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

double summary_number(const std::map<std::string, std::string>& s, const std::string& key, const std::string& path) {
    auto it = s.find(key);
    if (it == s.end()) throw ConfigError(path + ": missing " + key);
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError(path + ": " + key + " is not a number");
    }
}

std::size_t state_index(const RegimeModel& m, const std::optional<std::string>& name) {
    if (!name) return 0;
    auto it = std::find(m.states.begin(), m.states.end(), *name);
    if (it == m.states.end()) throw ConfigError("--state: unknown state '" + *name + "'");
    return static_cast<std::size_t>(it - m.states.begin());
}

// Config problems exit 2, anything thrown by the numerics exits 3.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

bool is_regime(const ModelConfig& cfg) { return cfg.chain.has_value(); }

KeyValues aux_report(const ModelConfig& cfg, const AuxProblem& p, const AuxSolution& s) {
    KeyValues kv;
    kv.add("state", aux_state(cfg));
    kv.add("q", p.q());
    kv.add("barrier", s.barrier);
    kv.add("ell_at_barrier", s.closed_form.ell(s.barrier));
    kv.add("value_at_0", s.value(0.0));
    kv.add("value_at_barrier", s.value(s.barrier));
    kv.add("smooth_fit_barrier", std::abs(s.value_derivative(s.barrier) - 1.0));
    kv.add("smooth_fit_zero", std::abs(s.value_derivative(0.0) - p.phi));
    return kv;
}

// ------------------------------------------------------------------ verify

struct Check {
    std::string name;
    std::string model;
    bool passed = false;
    std::string observed;
    std::string expected;
};

std::string check_line(const Check& c) {
    return std::string(c.passed ? "PASS" : "FAIL") + " check=" + c.name + " model=" + c.model +
           " observed=" + c.observed + " expected=" + c.expected + "\n";
}

Check laplace_check(const std::string& model, const ScaleEvaluator& ev) {
    double worst = 0.0;
    for (double off : {0.1, 0.5, 1.0, 2.0, 4.0})
        worst = std::max(worst, verify_laplace_transform(ev, ev.phi_q() + off, 30.0 / off));
    return {"laplace_transform", model, worst < 1e-6, num(worst), "<1e-06"};
}

Check exit_check(const std::string& model, const ScaleEvaluator& ev, const SimConfig& sim) {
    const double b = 2.0;
    double worst = 0.0;
    for (double x : {0.25 * b, 0.5 * b, 0.75 * b}) {
        const ExitEstimates e = estimate_exit_identities(ev.spec(), ev.q(), b, x, sim);
        const double f1 = ev.W(b - x) / ev.W(b);
        const double f2 = ev.Z(b - x) - ev.Z(b) / ev.W(b) * ev.W(b - x);
        const double f3 = ev.Z(b - x) / ev.Z(b);
        worst = std::max({worst, std::abs(e.down_first.mean - f1) / e.down_first.std_error,
                          std::abs(e.up_first.mean - f2) / e.up_first.std_error,
                          std::abs(e.reflected_down.mean - f3) / e.reflected_down.std_error});
    }
    return {"exit_identities", model, worst <= 3.0, num(worst) + "SE", "<=3SE"};
}

std::vector<Check> aux_checks(const std::string& model, const AuxProblem& p) {
    std::vector<Check> out;
    const AuxSolution s = barrier_root(p);
    const double b = s.barrier;

    const double fit = std::max(std::abs(s.value_derivative(b) - 1.0), std::abs(s.value_derivative(0.0) - p.phi));
    out.push_back({"smooth_fit", model, fit <= 1e-8, num(fit), "<=1e-08"});

    double inside = 0.0;
    double above = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 50; ++k) {
        const double x = k < 50 ? b * k / 50.0 : b * (1.0 - 1e-9);
        inside = std::max(inside, std::abs(hjb_residual(s.closed_form, b, x)) / (1.0 + std::abs(s.value(x))));
        above = std::max(above, hjb_residual(s.closed_form, b, b * (1.0 + k / 25.0)));
    }
    out.push_back({"hjb_inside", model, inside <= 1e-6, num(inside), "<=1e-06*(1+|V|)"});
    out.push_back({"hjb_above", model, above <= 1e-8, num(above), "<=1e-08"});

    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_drop = 0.0;
    for (double factor : {0.25, 0.5, 2.0, 4.0}) {
        std::vector<double> grid(200);
        const double hi = 1.5 * std::max(b, factor * b);
        for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = hi * static_cast<double>(k) / (grid.size() - 1);
        const auto g = s.closed_form.values(b, grid);
        const auto other = s.closed_form.values(factor * b, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double gap = g[k] - other[k];
            worst_gap = std::min(worst_gap, gap);
            if (k > 0) worst_drop = std::max(worst_drop, (g[k - 1] - other[k - 1]) - gap);
        }
    }
    const bool dom = worst_gap >= -1e-9 && worst_drop <= 1e-9;
    out.push_back({"dominance", model, dom, "min_gap=" + num(worst_gap) + ",max_drop=" + num(worst_drop),
                   "gap>=-1e-09,drop<=1e-09"});
    return out;
}

std::vector<Check> regime_checks(const RegimeModel& m, const SolverOptions& solver) {
    std::vector<Check> out;
    const RegimeSolution sol = solve(m, solver);
    const std::string model = "regime(" + join(m.states, ",") + ")";
    const auto ratios = sol.decay_ratios();
    const double worst = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    out.push_back({"contraction", model, worst <= m.beta() + 1e-3, num(worst), "<=" + num(m.beta() + 1e-3)});
    out.push_back({"fixed_point", model, sol.post_check_rho <= 2.0 * solver.tol, num(sol.post_check_rho),
                   "<=" + num(2.0 * solver.tol)});
    const auto cls = check_concave_class(sol.value);
    out.push_back({"concave_class", model, !cls.has_value(), cls.value_or("ok"), "ok"});
    double fit = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const AuxClosedForm form = state_closed_form(m, i, hat_operator(m, sol.value, i).curve());
        const double b = sol.barriers[i];
        fit = std::max({fit, std::abs(form.value_derivative(b, b) - 1.0),
                        std::abs(form.value_derivative(b, 0.0) - m.phi)});
    }
    out.push_back({"smooth_fit", model, fit <= 1e-6, num(fit), "<=1e-06"});
    return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + item + "'");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw std::invalid_argument("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

int cmd_solve_aux(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ModelConfig cfg = load_config(opt.config_path);
        const AuxProblem p = to_aux_problem(cfg);
        const AuxSolution s = barrier_root(p);
        const KeyValues kv = aux_report(cfg, p, s);
        out << kv.str();
        if (opt.out_dir) {
            write_file(opt, "summary.txt", kv.str());
            const std::size_t n = opt.points.value_or(401);
            std::string csv = "x,value,derivative\n";
            for (std::size_t k = 0; k < n; ++k) {
                const double x = 2.0 * s.barrier * static_cast<double>(k) / (n - 1);
                const double d = x <= s.barrier ? s.value_derivative(x) : 1.0;
                csv += csv_row({x, s.value(x), d});
            }
            write_file(opt, "aux_value.csv", csv);
        }
        return kExitOk;
    });
}

int cmd_solve_regime(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ModelConfig cfg = load_config(opt.config_path);
        const RegimeModel m = to_regime_model(cfg);
        RegimeSolution sol;
        try {
            sol = solve(m, cfg.solver);
        } catch (const std::runtime_error& e) {
            err << "solver error: " << e.what() << "\n";
            return kExitSolver;
        }
        KeyValues kv;
        kv.add("states", join(m.states, ","));
        for (std::size_t i = 0; i < m.size(); ++i) kv.add("barrier." + m.states[i], sol.barriers[i]);
        for (std::size_t i = 0; i < m.size(); ++i) kv.add("value_at_0." + m.states[i], sol.value.values[i][0]);
        kv.add("iterations", std::to_string(sol.iterations));
        kv.add("final_rho", sol.final_rho);
        kv.add("post_check_rho", sol.post_check_rho);
        kv.add("beta", m.beta());
        const auto ratios = sol.decay_ratios();
        kv.add("max_decay_ratio", ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end()));
        kv.add("grid_x_max", sol.value.x_max());
        out << kv.str();

        std::string trace = "n,rho,x_max";
        for (const auto& s : m.states) trace += ",b_" + s;
        trace += "\n";
        for (const auto& t : sol.trace) {
            std::vector<double> row{static_cast<double>(t.iteration), t.rho, t.x_max};
            row.insert(row.end(), t.barriers.begin(), t.barriers.end());
            out << "trace=" << csv_row(row);
            trace += csv_row(row);
        }
        if (opt.out_dir) {
            write_file(opt, "summary.txt", kv.str());
            write_file(opt, "regime_trace.csv", trace);
            for (std::size_t i = 0; i < m.size(); ++i) {
                std::string csv = "x,value\n";
                for (std::size_t k = 0; k < sol.value.grid.size(); ++k)
                    csv += csv_row({sol.value.grid[k], sol.value.values[i][k]});
                write_file(opt, "value_" + m.states[i] + ".csv", csv);
            }
        }
        return kExitOk;
    });
}

int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ModelConfig cfg = load_config(opt.config_path);
        const SimConfig sim = sim_config(cfg, opt);
        std::string header = "state,x0,barrier,mean,std_error,n_effective,analytic\n";
        std::string row;

        if (is_regime(cfg)) {
            const RegimeModel m = to_regime_model(cfg);
            std::vector<double> b;
            if (opt.barriers) {
                b = *opt.barriers;
            } else if (opt.from_summary) {
                const auto s = read_summary(*opt.from_summary);
                for (const auto& name : m.states) b.push_back(summary_number(s, "barrier." + name, *opt.from_summary));
            } else {
                b = solve(m, cfg.solver).barriers;
            }
            if (b.size() != m.size()) throw ConfigError("--barriers: expected one barrier per chain state");
            for (double v : b)
                if (!(v > 0.0)) throw ConfigError("--barriers: barriers must be > 0");
            const std::size_t i0 = state_index(m, opt.state);
            const double x0 = opt.x0.value_or(0.5 * b[i0]);
            if (!(x0 >= 0.0)) throw ConfigError("--x0: must be >= 0");
            if (auto d = validate(sim, *std::min_element(m.discounts.begin(), m.discounts.end())))
                throw ConfigError("sim: " + *d);
            const SimEstimate e = simulate_regime_npv(m, b, x0, i0, sim);
            const double analytic = barrier_value(m, b, cfg.solver).value.eval(x0, i0);
            std::vector<std::string> bs;
            for (double v : b) bs.push_back(num(v));
            row = m.states[i0] + "," + num(x0) + "," + join(bs, ";") + "," + num(e.mean) + "," + num(e.std_error) +
                  "," + std::to_string(e.n_effective) + "," + num(analytic) + "\n";
        } else {
            const AuxProblem p = to_aux_problem(cfg);
            double b = 0.0;
            if (opt.barriers) {
                if (opt.barriers->size() != 1) throw ConfigError("--barriers: expected a single barrier");
                b = opt.barriers->front();
            } else if (opt.from_summary) {
                b = summary_number(read_summary(*opt.from_summary), "barrier", *opt.from_summary);
            } else {
                b = barrier_root(p).barrier;
            }
            if (!(b > 0.0)) throw ConfigError("--barriers: barrier must be > 0");
            const double x0 = opt.x0.value_or(0.5 * b);
            if (!(x0 >= 0.0)) throw ConfigError("--x0: must be >= 0");
            if (auto d = validate(sim, p.q())) throw ConfigError("sim: " + *d);
            const SimEstimate e =
                simulate_aux_npv(p.spec, p.payoff.curve(), p.lambda, p.delta, p.phi, b, x0, sim);
            const double analytic = value(p, b, x0);
            row = aux_state(cfg) + "," + num(x0) + "," + num(b) + "," + num(e.mean) + "," + num(e.std_error) + "," +
                  std::to_string(e.n_effective) + "," + num(analytic) + "\n";
        }
        out << header << row;
        write_file(opt, "simulate.csv", header + row);
        return kExitOk;
    });
}

int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ModelConfig cfg = load_config(opt.config_path);
        const SimConfig sim = sim_config(cfg, opt);
        std::vector<Check> checks;
        const bool aux_mode = cfg.problem.delta.has_value();
        if (!aux_mode && !is_regime(cfg))
            throw ConfigError(cfg.where.source + ": nothing to verify (needs problem.delta or [chain])");

        if (aux_mode) {
            const AuxProblem p = to_aux_problem(cfg);
            const std::string name = aux_state(cfg);
            const ScaleEvaluator ev(p.spec, p.q());
            checks.push_back(laplace_check(name, ev));
            checks.push_back(exit_check(name, ev, sim));
            for (auto& c : aux_checks(name, p)) checks.push_back(std::move(c));
        }
        if (is_regime(cfg)) {
            const RegimeModel m = to_regime_model(cfg);
            for (std::size_t i = 0; i < m.size(); ++i) {
                const ScaleEvaluator ev(m.levy[i], m.q(i));
                checks.push_back(laplace_check(m.states[i], ev));
                if (!aux_mode) checks.push_back(exit_check(m.states[i], ev, sim));
            }
            for (auto& c : regime_checks(m, cfg.solver)) checks.push_back(std::move(c));
        }

        std::string report;
        bool all = true;
        for (const auto& c : checks) {
            report += check_line(c);
            all = all && c.passed;
        }
        report += std::string("verify=") + (all ? "PASS" : "FAIL") + "\n";
        out << report;
        write_file(opt, "verify.txt", report);
        if (!all) err << "verification failed\n";
        return all ? kExitOk : kExitVerify;
    });
}

int cmd_curve(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const ModelConfig cfg = load_config(opt.config_path);
        const std::size_t n = opt.points.value_or(201);
        if (n < 2) throw ConfigError("--points: must be >= 2");
        std::string csv;
        if (is_regime(cfg)) {
            const RegimeModel m = to_regime_model(cfg);
            const RegimeSolution sol = solve(m, cfg.solver);
            const std::size_t i = state_index(m, opt.state);
            const double hi = 2.0 * sol.barriers[i];
            csv = "x,value\n";
            for (std::size_t k = 0; k < n; ++k) {
                const double x = hi * static_cast<double>(k) / (n - 1);
                csv += csv_row({x, sol.value.eval(x, i)});
            }
        } else {
            const AuxProblem p = to_aux_problem(cfg);
            const AuxSolution s = barrier_root(p);
            const ScaleEvaluator& ev = s.closed_form.evaluator();
            const double hi = 2.0 * s.barrier;
            csv = "x,W,Z,Zbar,value\n";
            for (std::size_t k = 0; k < n; ++k) {
                const double x = hi * static_cast<double>(k) / (n - 1);
                csv += csv_row({x, ev.W(x), ev.Z(x), ev.Zbar(x), s.value(x)});
            }
        }
        out << csv;
        write_file(opt, "curve.csv", csv);
        return kExitOk;
    });
}

int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    if (name == "solve-aux") return cmd_solve_aux(opt, out, err);
    if (name == "solve-regime") return cmd_solve_regime(opt, out, err);
    if (name == "simulate") return cmd_simulate(opt, out, err);
    if (name == "verify") return cmd_verify(opt, out, err);
    if (name == "curve") return cmd_curve(opt, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
}

}  // namespace spdiv
