#include "spdiv/config.hpp"

#include <doctest.h>

using namespace spdiv;

namespace {

const char* kFull = R"(# two regimes
[levy.calm]
drift_mu = -1
sigma = 1
jump_rate = 0.5
jump_mix = 0.6:2, 0.4:5

[levy.stress]
drift_mu = 0.5
sigma = 1
jump_rate = 1
jump_mix = 1:1

[chain]
states = calm, stress
switch_rates = 0, 0.5; 1, 0
discounts = 0.1, 0.15

[jumps.calm.stress]
kind = hyperexp
weights = 1
rates = 2

[problem]
phi = 2
payoff_knots = 0:0, 1:1.5
payoff_tail = 1
lambda = 0.5
delta = 0.25
state = stress

[solver]
tol = 1e-9
max_iter = 50
grid_points = 300

[sim]
paths = 1000
dt = 0.002
tmax = 0
seed = 12345678901234
antithetic = true
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "cfg.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("full config parses") {
    const ModelConfig c = parse_config(kFull, "full.ini");
    REQUIRE(c.levy.size() == 2);
    CHECK(c.find_levy("calm")->spec.jump_mix.size() == 2);
    REQUIRE(c.chain);
    CHECK(c.chain->switch_rates[1][0] == 1.0);
    CHECK(c.jumps.size() == 1);
    CHECK(c.problem.phi == 2.0);
    CHECK(c.solver.grid_points == 300);
    CHECK(c.sim.rng_seed == 12345678901234ull);
    CHECK(c.sim.antithetic);
    CHECK(aux_state(c) == "stress");
    const AuxProblem p = to_aux_problem(c);
    CHECK(p.q() == doctest::Approx(0.75));
    const RegimeModel m = to_regime_model(c);
    CHECK(m.switch_jumps[0][1].kind == SwitchJump::Kind::hyperexp);
    CHECK(m.switch_jumps[1][0].kind == SwitchJump::Kind::none);
}

TEST_CASE("serialize then parse round-trips") {
    const ModelConfig c = parse_config(kFull);
    const ModelConfig again = parse_config(serialize(c));
    CHECK(again == c);
    CHECK(serialize(again) == serialize(c));
    ModelConfig odd = c;
    odd.levy[0].spec.drift_mu = 0.1 + 0.2;
    odd.problem.phi = 1.0 / 3.0 + 1.0;
    CHECK(parse_config(serialize(odd)) == odd);
}

TEST_CASE("diagnostics carry the source line") {
    CHECK(error_of("[levy.a]\nsigma = x\n") == "cfg.ini:2: levy.a.sigma: expected a number, got 'x'");
    CHECK(error_of("[levy.a]\nsigma = 1\nsigma = 2\n").find("cfg.ini:3:") == 0);
    CHECK(error_of("[levy.a]\nsigmaa = 1\n").find("cfg.ini:2:") == 0);
    CHECK(error_of("[nonsense]\n").find("cfg.ini:1:") == 0);
    CHECK(error_of("no section = 1\n").find("cfg.ini:1:") == 0);
}

TEST_CASE("aux mode needs phi and delta") {
    const ModelConfig c = parse_config("[levy.a]\nsigma = 1\n[problem]\nlambda = 0\n");
    CHECK_THROWS_WITH(to_aux_problem(c), doctest::Contains("problem.phi: required"));
    const ModelConfig d = parse_config("[levy.a]\nsigma = 1\n[problem]\nphi = 2\n");
    CHECK_THROWS_WITH(to_aux_problem(d), doctest::Contains("problem.delta: required"));
    const ModelConfig e = parse_config("[levy.a]\nsigma = 1\n[problem]\nphi = 0.5\ndelta = 1\n");
    CHECK_THROWS_WITH(to_aux_problem(e), doctest::Contains("problem.phi: phi must exceed 1"));
}

TEST_CASE("chain validation") {
    std::string text = kFull;
    text.replace(text.find("discounts = 0.1, 0.15"), 21, "discounts = 0.1");
    CHECK_THROWS_AS(to_regime_model(parse_config(text)), ConfigError);
}
