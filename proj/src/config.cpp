#include "spdiv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace spdiv {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::map<std::string, RawEntry> keys;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Reader {
public:
    explicit Reader(ConfigLocations& where) : where_(where) {}

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        std::ostringstream out;
        out << where_.source;
        auto it = where_.lines.find(key);
        if (it == where_.lines.end()) {
            const auto dot = key.rfind('.');
            if (dot != std::string::npos) it = where_.lines.find(key.substr(0, dot));
        }
        if (it != where_.lines.end()) out << ':' << it->second;
        out << ": " << key << ": " << message;
        throw ConfigError(out.str());
    }

    double number(const std::string& key, const std::string& text) const {
        double v = 0.0;
        const char* end = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
            fail(key, "expected a number, got '" + text + "'");
        return v;
    }

    std::uint64_t integer(const std::string& key, const std::string& text) const {
        std::uint64_t v = 0;
        const char* end = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (text.empty() || ec != std::errc() || ptr != end)
            fail(key, "expected a non-negative integer, got '" + text + "'");
        return v;
    }

    bool boolean(const std::string& key, const std::string& text) const {
        if (text == "true" || text == "yes" || text == "1") return true;
        if (text == "false" || text == "no" || text == "0") return false;
        fail(key, "expected true or false, got '" + text + "'");
    }

    std::vector<double> numbers(const std::string& key, const std::string& text) const {
        std::vector<double> out;
        for (const auto& item : split(text, ',')) out.push_back(number(key, item));
        return out;
    }

    std::vector<std::pair<double, double>> pairs(const std::string& key, const std::string& text) const {
        std::vector<std::pair<double, double>> out;
        for (const auto& item : split(text, ',')) {
            const auto parts = split(item, ':');
            if (parts.size() != 2) fail(key, "expected 'a:b' pairs, got '" + item + "'");
            out.emplace_back(number(key, parts[0]), number(key, parts[1]));
        }
        return out;
    }

private:
    ConfigLocations& where_;
};

std::vector<RawSection> tokenize(const std::string& text, ConfigLocations& where) {
    std::vector<RawSection> sections;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    auto error = [&](const std::string& msg) {
        throw ConfigError(where.source + ":" + std::to_string(line) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') error("unterminated section header");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty()) error("empty section name");
            if (!seen.insert(name).second) error(name + ": duplicate section");
            sections.push_back({name, line, {}});
            where.lines[name] = line;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) error("expected 'key = value'");
        if (sections.empty()) error("key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) error("empty key");
        auto& sec = sections.back();
        if (!sec.keys.emplace(key, RawEntry{value, line}).second) error(sec.name + "." + key + ": duplicate key");
        where.lines[sec.name + "." + key] = line;
    }
    return sections;
}

void check_keys(const Reader& r, const RawSection& sec, std::initializer_list<const char*> allowed) {
    for (const auto& [key, entry] : sec.keys) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) r.fail(sec.name + "." + key, "unknown key");
    }
}

const RawEntry* get(const RawSection& sec, const std::string& key) {
    auto it = sec.keys.find(key);
    return it == sec.keys.end() ? nullptr : &it->second;
}

std::vector<JumpTerm> terms(const Reader& r, const std::string& key, const std::vector<double>& w,
                            const std::vector<double>& rates) {
    if (w.size() != rates.size()) r.fail(key, "weights and rates must have the same length");
    std::vector<JumpTerm> out;
    for (std::size_t k = 0; k < w.size(); ++k) out.push_back({w[k], rates[k]});
    return out;
}

void read_levy(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"drift_mu", "sigma", "jump_rate", "jump_mix"});
    LevySection out;
    out.name = sec.name.substr(5);
    if (out.name.empty() || out.name.find('.') != std::string::npos) r.fail(sec.name, "bad state name");
    const std::string p = sec.name + ".";
    if (auto e = get(sec, "drift_mu")) out.spec.drift_mu = r.number(p + "drift_mu", e->value);
    if (auto e = get(sec, "sigma")) out.spec.sigma = r.number(p + "sigma", e->value);
    if (auto e = get(sec, "jump_rate")) out.spec.jump_rate = r.number(p + "jump_rate", e->value);
    if (auto e = get(sec, "jump_mix"))
        for (auto [w, rate] : r.pairs(p + "jump_mix", e->value)) out.spec.jump_mix.push_back({w, rate});
    if (auto d = validate(out.spec)) r.fail(sec.name, *d);
    cfg.levy.push_back(std::move(out));
}

void read_chain(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"states", "switch_rates", "discounts"});
    ChainSection c;
    auto need = [&](const char* key) {
        const RawEntry* e = get(sec, key);
        if (!e) r.fail(std::string("chain.") + key, "required");
        return e->value;
    };
    for (const auto& name : split(need("states"), ',')) {
        if (name.empty() || name.find('.') != std::string::npos) r.fail("chain.states", "bad state name '" + name + "'");
        c.states.push_back(name);
    }
    const std::size_t n = c.states.size();
    for (const auto& row : split(need("switch_rates"), ';')) {
        c.switch_rates.push_back(r.numbers("chain.switch_rates", row));
        if (c.switch_rates.back().size() != n) r.fail("chain.switch_rates", "each row needs one entry per state");
    }
    if (c.switch_rates.size() != n) r.fail("chain.switch_rates", "needs one row per state");
    c.discounts = r.numbers("chain.discounts", need("discounts"));
    if (c.discounts.size() != n) r.fail("chain.discounts", "needs one entry per state");
    cfg.chain = std::move(c);
}

void read_jump(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"kind", "weights", "rates"});
    const auto parts = split(sec.name, '.');
    if (parts.size() != 3 || parts[1].empty() || parts[2].empty()) r.fail(sec.name, "expected [jumps.<from>.<to>]");
    JumpSection j{parts[1], parts[2], {}};
    const RawEntry* kind = get(sec, "kind");
    const std::string k = kind ? kind->value : "none";
    if (k == "none") {
        j.jump.kind = SwitchJump::Kind::none;
        if (get(sec, "weights") || get(sec, "rates")) r.fail(sec.name + ".kind", "kind none takes no weights or rates");
    } else if (k == "hyperexp") {
        j.jump.kind = SwitchJump::Kind::hyperexp;
        const RawEntry* w = get(sec, "weights");
        const RawEntry* rates = get(sec, "rates");
        if (!w) r.fail(sec.name + ".weights", "required");
        if (!rates) r.fail(sec.name + ".rates", "required");
        j.jump.mix = terms(r, sec.name + ".rates", r.numbers(sec.name + ".weights", w->value),
                           r.numbers(sec.name + ".rates", rates->value));
    } else {
        r.fail(sec.name + ".kind", "expected none or hyperexp, got '" + k + "'");
    }
    cfg.jumps.push_back(std::move(j));
}

void read_problem(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"phi", "payoff_knots", "payoff_tail", "lambda", "delta", "state"});
    ProblemSection& p = cfg.problem;
    if (auto e = get(sec, "phi")) p.phi = r.number("problem.phi", e->value);
    if (auto e = get(sec, "lambda")) p.lambda = r.number("problem.lambda", e->value);
    if (auto e = get(sec, "delta")) p.delta = r.number("problem.delta", e->value);
    if (auto e = get(sec, "state")) p.state = e->value;
    if (auto e = get(sec, "payoff_tail")) p.payoff_tail = r.number("problem.payoff_tail", e->value);
    if (auto e = get(sec, "payoff_knots")) {
        p.payoff_knots.clear();
        for (auto [x, v] : r.pairs("problem.payoff_knots", e->value)) p.payoff_knots.push_back({x, v});
    }
}

void read_solver(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"tol", "max_iter", "grid_points"});
    if (auto e = get(sec, "tol")) cfg.solver.tol = r.number("solver.tol", e->value);
    if (auto e = get(sec, "max_iter")) cfg.solver.max_iter = static_cast<int>(r.integer("solver.max_iter", e->value));
    if (auto e = get(sec, "grid_points")) cfg.solver.grid_points = r.integer("solver.grid_points", e->value);
    if (!(cfg.solver.tol > 0.0)) r.fail("solver.tol", "must be > 0");
    if (cfg.solver.max_iter < 1) r.fail("solver.max_iter", "must be >= 1");
    if (cfg.solver.grid_points < 2) r.fail("solver.grid_points", "must be >= 2");
}

void read_sim(const Reader& r, const RawSection& sec, ModelConfig& cfg) {
    check_keys(r, sec, {"paths", "dt", "tmax", "seed", "antithetic"});
    if (auto e = get(sec, "paths")) cfg.sim.n_paths = r.integer("sim.paths", e->value);
    if (auto e = get(sec, "dt")) cfg.sim.dt = r.number("sim.dt", e->value);
    if (auto e = get(sec, "tmax")) cfg.sim.t_max = r.number("sim.tmax", e->value);
    if (auto e = get(sec, "seed")) cfg.sim.rng_seed = r.integer("sim.seed", e->value);
    if (auto e = get(sec, "antithetic")) cfg.sim.antithetic = r.boolean("sim.antithetic", e->value);
    if (cfg.sim.n_paths < 1) r.fail("sim.paths", "must be >= 1");
    if (!(cfg.sim.dt > 0.0)) r.fail("sim.dt", "must be > 0");
    if (cfg.sim.t_max < 0.0) r.fail("sim.tmax", "must be >= 0");
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) out += (k ? sep : "") + items[k];
    return out;
}

std::string join_numbers(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(fmt(x));
    return join(s, ", ");
}

}  // namespace

const LevySection* ModelConfig::find_levy(const std::string& name) const {
    for (const auto& l : levy)
        if (l.name == name) return &l;
    return nullptr;
}

ModelConfig parse_config(const std::string& text, const std::string& source) {
    ModelConfig cfg;
    cfg.where.source = source;
    const auto sections = tokenize(text, cfg.where);
    Reader r(cfg.where);
    for (const auto& sec : sections) {
        if (sec.name.rfind("levy.", 0) == 0)
            read_levy(r, sec, cfg);
        else if (sec.name == "chain")
            read_chain(r, sec, cfg);
        else if (sec.name.rfind("jumps.", 0) == 0)
            read_jump(r, sec, cfg);
        else if (sec.name == "problem")
            read_problem(r, sec, cfg);
        else if (sec.name == "solver")
            read_solver(r, sec, cfg);
        else if (sec.name == "sim")
            read_sim(r, sec, cfg);
        else
            r.fail(sec.name, "unknown section");
    }
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string serialize(const ModelConfig& cfg) {
    std::ostringstream out;
    for (const auto& l : cfg.levy) {
        out << "[levy." << l.name << "]\n";
        out << "drift_mu = " << fmt(l.spec.drift_mu) << "\n";
        out << "sigma = " << fmt(l.spec.sigma) << "\n";
        out << "jump_rate = " << fmt(l.spec.jump_rate) << "\n";
        if (!l.spec.jump_mix.empty()) {
            std::vector<std::string> items;
            for (const auto& t : l.spec.jump_mix) items.push_back(fmt(t.weight) + ":" + fmt(t.rate));
            out << "jump_mix = " << join(items, ", ") << "\n";
        }
        out << "\n";
    }
    if (cfg.chain) {
        out << "[chain]\n";
        out << "states = " << join(cfg.chain->states, ", ") << "\n";
        std::vector<std::string> rows;
        for (const auto& row : cfg.chain->switch_rates) rows.push_back(join_numbers(row));
        out << "switch_rates = " << join(rows, "; ") << "\n";
        out << "discounts = " << join_numbers(cfg.chain->discounts) << "\n\n";
    }
    for (const auto& j : cfg.jumps) {
        out << "[jumps." << j.from << "." << j.to << "]\n";
        if (j.jump.kind == SwitchJump::Kind::none) {
            out << "kind = none\n\n";
            continue;
        }
        std::vector<double> w;
        std::vector<double> rates;
        for (const auto& t : j.jump.mix) {
            w.push_back(t.weight);
            rates.push_back(t.rate);
        }
        out << "kind = hyperexp\nweights = " << join_numbers(w) << "\nrates = " << join_numbers(rates) << "\n\n";
    }
    const ProblemSection& p = cfg.problem;
    out << "[problem]\n";
    if (p.phi) out << "phi = " << fmt(*p.phi) << "\n";
    std::vector<std::string> knots;
    for (const auto& k : p.payoff_knots) knots.push_back(fmt(k.x) + ":" + fmt(k.value));
    out << "payoff_knots = " << join(knots, ", ") << "\n";
    out << "payoff_tail = " << fmt(p.payoff_tail) << "\n";
    if (p.lambda) out << "lambda = " << fmt(*p.lambda) << "\n";
    if (p.delta) out << "delta = " << fmt(*p.delta) << "\n";
    if (p.state) out << "state = " << *p.state << "\n";
    out << "\n[solver]\n";
    out << "tol = " << fmt(cfg.solver.tol) << "\n";
    out << "max_iter = " << cfg.solver.max_iter << "\n";
    out << "grid_points = " << cfg.solver.grid_points << "\n";
    out << "\n[sim]\n";
    out << "paths = " << cfg.sim.n_paths << "\n";
    out << "dt = " << fmt(cfg.sim.dt) << "\n";
    out << "tmax = " << fmt(cfg.sim.t_max) << "\n";
    out << "seed = " << cfg.sim.rng_seed << "\n";
    out << "antithetic = " << (cfg.sim.antithetic ? "true" : "false") << "\n";
    return out.str();
}

std::string aux_state(const ModelConfig& cfg) {
    ConfigLocations where = cfg.where;
    Reader r(where);
    if (cfg.problem.state) {
        if (!cfg.find_levy(*cfg.problem.state))
            r.fail("problem.state", "no [levy." + *cfg.problem.state + "] section");
        return *cfg.problem.state;
    }
    if (cfg.levy.empty()) r.fail("levy", "at least one [levy.<state>] section is required");
    if (cfg.levy.size() > 1) r.fail("problem.state", "required when several levy sections exist");
    return cfg.levy.front().name;
}

AuxProblem to_aux_problem(const ModelConfig& cfg) {
    ConfigLocations where = cfg.where;
    Reader r(where);
    const ProblemSection& p = cfg.problem;
    if (!p.phi) r.fail("problem.phi", "required");
    if (!(*p.phi > 1.0)) r.fail("problem.phi", "phi must exceed 1");
    if (!p.delta) r.fail("problem.delta", "required");

    AuxProblem out;
    out.spec = cfg.find_levy(aux_state(cfg))->spec;
    out.phi = *p.phi;
    out.lambda = p.lambda.value_or(0.0);
    out.delta = *p.delta;
    try {
        out.payoff = make_payoff(p.payoff_knots, p.payoff_tail);
    } catch (const std::invalid_argument& e) {
        r.fail("problem.payoff_knots", e.what());
    }
    if (auto d = validate(out)) r.fail("problem", *d);
    return out;
}

RegimeModel to_regime_model(const ModelConfig& cfg) {
    ConfigLocations where = cfg.where;
    Reader r(where);
    if (!cfg.chain) r.fail("chain", "required");
    if (!cfg.problem.phi) r.fail("problem.phi", "required");
    if (!(*cfg.problem.phi > 1.0)) r.fail("problem.phi", "phi must exceed 1");
    const ChainSection& c = *cfg.chain;
    const std::size_t n = c.states.size();

    RegimeModel m;
    m.states = c.states;
    m.switch_rates = c.switch_rates;
    m.discounts = c.discounts;
    m.phi = *cfg.problem.phi;
    m.switch_jumps.assign(n, std::vector<SwitchJump>(n));
    for (const auto& name : c.states) {
        const LevySection* l = cfg.find_levy(name);
        if (!l) r.fail("levy." + name, "required for chain state '" + name + "'");
        m.levy.push_back(l->spec);
    }
    auto index = [&](const std::string& name, const std::string& key) {
        auto it = std::find(c.states.begin(), c.states.end(), name);
        if (it == c.states.end()) r.fail(key, "unknown state '" + name + "'");
        return static_cast<std::size_t>(it - c.states.begin());
    };
    for (const auto& j : cfg.jumps) {
        const std::string key = "jumps." + j.from + "." + j.to;
        const std::size_t a = index(j.from, key);
        const std::size_t b = index(j.to, key);
        if (a == b) r.fail(key, "a state cannot jump to itself");
        m.switch_jumps[a][b] = j.jump;
    }
    if (auto d = validate(m)) r.fail("chain", *d);
    return m;
}

}  // namespace spdiv
