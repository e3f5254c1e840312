#pragma once

#include "spdiv/aux_solver.hpp"
#include "spdiv/levy_model.hpp"
#include "spdiv/regime_solver.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace spdiv::testing {

// sigma^2 = 2: with q = 1 the scale functions are sinh and cosh.
inline LevySpec brownian() { return {0.0, std::sqrt(2.0), 0.0, {}}; }

// Dual risk model: drift -1, Exp(1) gains at rate 1.
inline LevySpec cramer_lundberg() { return {-1.0, 0.0, 1.0, {{1.0, 1.0}}}; }

inline LevySpec mixed() { return {-0.5, 1.0, 1.0, {{0.6, 2.0}, {0.4, 5.0}}}; }

struct NamedSpec {
    std::string name;
    LevySpec spec;
};

inline std::vector<NamedSpec> test_specs() {
    return {{"brownian", brownian()}, {"cramer_lundberg", cramer_lundberg()}, {"mixed", mixed()}};
}

inline std::vector<ConcavePayoff> test_payoffs() {
    return {make_payoff({{0.0, 0.0}}, 1.0), make_payoff({{0.0, 0.5}, {1.0, 2.0}, {3.0, 4.5}}, 0.8)};
}

inline AuxProblem aux(const LevySpec& spec, double lambda, double delta, double phi, ConcavePayoff payoff) {
    AuxProblem p;
    p.spec = spec;
    p.lambda = lambda;
    p.delta = delta;
    p.phi = phi;
    p.payoff = std::move(payoff);
    return p;
}

inline RegimeModel two_state(double phi = 2.0) {
    RegimeModel m;
    m.states = {"calm", "stress"};
    m.switch_rates = {{0.0, 0.5}, {1.0, 0.0}};
    m.discounts = {0.3, 0.4};
    m.levy = {mixed(), {0.5, 1.0, 1.0, {{1.0, 1.0}}}};
    SwitchJump down;
    down.kind = SwitchJump::Kind::hyperexp;
    down.mix = {{1.0, 2.0}};
    m.switch_jumps = {{SwitchJump{}, down}, {SwitchJump{}, SwitchJump{}}};
    m.phi = phi;
    return m;
}

inline RegimeModel three_state(double phi = 1.8) {
    RegimeModel m;
    m.states = {"a", "b", "c"};
    m.switch_rates = {{0.0, 0.3, 0.2}, {0.4, 0.0, 0.4}, {0.5, 0.5, 0.0}};
    m.discounts = {0.3, 0.5, 0.6};
    m.levy = {brownian(), mixed(), cramer_lundberg()};
    SwitchJump exp1;
    exp1.kind = SwitchJump::Kind::hyperexp;
    exp1.mix = {{1.0, 1.5}};
    SwitchJump two;
    two.kind = SwitchJump::Kind::hyperexp;
    two.mix = {{0.5, 1.0}, {0.5, 4.0}};
    m.switch_jumps = {{{}, exp1, two}, {{}, {}, exp1}, {two, {}, {}}};
    m.phi = phi;
    return m;
}

// Both states share dynamics and discount and switch without jumps.
inline RegimeModel identical_states(const LevySpec& spec, double delta, double phi) {
    RegimeModel m;
    m.states = {"one", "two"};
    m.switch_rates = {{0.0, 0.7}, {0.4, 0.0}};
    m.discounts = {delta, delta};
    m.levy = {spec, spec};
    m.switch_jumps = {{{}, {}}, {{}, {}}};
    m.phi = phi;
    return m;
}

}  // namespace spdiv::testing
