#include "spdiv/mc_simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace spdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bridge crossing probabilities below e^{-32} are treated as zero.
constexpr double kNegligibleExponent = 32.0;
constexpr double kTruncationLevel = 1e-8;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum Substream : std::uint64_t { kGauss = 1, kEvents = 2, kBridge = 3 };

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t kind, std::uint64_t index, std::uint64_t sub) {
    return splitmix64(splitmix64(splitmix64(seed) ^ kind) ^ index) ^ splitmix64(sub);
}

// Independent RNG substreams for one path, so paths that share an index use
// the same Gaussian increments and event times whatever the barriers.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t kind, std::uint64_t index, double sign)
        : gauss_(stream_seed(seed, kind, index, kGauss)),
          events_(stream_seed(seed, kind, index, kEvents)),
          bridge_(stream_seed(seed, kind, index, kBridge)),
          sign_(sign) {}

    double gaussian() { return sign_ * normal_(gauss_); }
    double event_uniform() { return open_unit(events_); }
    double exp_time(double rate) { return rate > 0.0 ? -std::log(open_unit(events_)) / rate : kInf; }
    double bridge_uniform() { return open_unit(bridge_); }

private:
    // uniform on (0, 1]
    static double open_unit(std::mt19937_64& g) { return 1.0 - static_cast<double>(g() >> 11) * 0x1.0p-53; }

    std::mt19937_64 gauss_, events_, bridge_;
    std::normal_distribution<double> normal_;
    double sign_;
};

double sample_mix(const std::vector<JumpTerm>& mix, PathRng& rng) {
    const double pick = rng.event_uniform();
    const double e = -std::log(rng.event_uniform());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < mix.size(); ++k) {
        acc += mix[k].weight;
        if (pick <= acc) return e / mix[k].rate;
    }
    return e / mix.back().rate;
}

// Minimum (sign -1) or maximum (sign +1) of a Brownian bridge from a to c
// with variance var over the step, sampled by inverting its exact tail.
double bridge_extreme(double a, double c, double var, double sign, double v) {
    const double d = c - a;
    return 0.5 * (a + c + sign * std::sqrt(d * d - 2.0 * var * std::log(v)));
}

struct StateDyn {
    double mu = 0.0;
    double sigma = 0.0;
    double eta = 0.0;
    std::vector<JumpTerm> mix;
    double rate = 0.0;  // discount rate while in this state
    double switch_rate = 0.0;
    std::vector<std::size_t> dest;
    std::vector<double> dest_cum;
    std::vector<SwitchJump> jumps;  // parallel to dest
    double barrier = kInf;
};

StateDyn from_levy(const LevySpec& spec, double rate, double barrier) {
    StateDyn s;
    s.mu = spec.drift_mu;
    s.sigma = spec.sigma;
    s.eta = spec.has_jumps() ? spec.jump_rate : 0.0;
    s.mix = spec.jump_mix;
    s.rate = rate;
    s.barrier = barrier;
    return s;
}

std::vector<StateDyn> regime_dynamics(const RegimeModel& m, const std::vector<double>* barriers, bool discount) {
    std::vector<StateDyn> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        StateDyn s = from_levy(m.levy[i], discount ? m.discounts[i] : 0.0, barriers ? (*barriers)[i] : kInf);
        s.switch_rate = m.lambda(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j == i || m.switch_rates[i][j] == 0.0) continue;
            acc += m.switch_rates[i][j] / s.switch_rate;
            s.dest.push_back(j);
            s.dest_cum.push_back(acc);
            s.jumps.push_back(m.switch_jumps[i][j]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

struct SwitchDraw {
    std::size_t to;
    double jump;  // <= 0
};

SwitchDraw draw_switch(const StateDyn& s, PathRng& rng) {
    const double pick = rng.event_uniform();
    std::size_t k = 0;
    while (k + 1 < s.dest.size() && pick > s.dest_cum[k]) ++k;
    double jump = 0.0;
    if (s.jumps[k].kind == SwitchJump::Kind::hyperexp) jump = -sample_mix(s.jumps[k].mix, rng);
    return {s.dest[k], jump};
}

// Advances t toward t_end in steps of at most dt, calling step(tau) each time.
template <class Step>
void march(double& t, double t_end, double dt, Step&& step) {
    while (t < t_end) {
        const double tau = (t_end - t <= dt * (1.0 + 1e-9)) ? t_end - t : dt;
        if (!step(tau)) return;
        t = (tau == t_end - t) ? t_end : t + tau;
    }
}

// ---------------------------------------------------------------- NPV paths

// Discounting at the state-dependent rate is represented by killing the path
// at an independent exponential time, so the cash flows are undiscounted and
// a path lasts 1/rate on average instead of the whole horizon.

struct NpvSetup {
    std::vector<StateDyn> states;
    double phi = 2.0;
    const PiecewiseLinear* payoff = nullptr;
    double payoff_rate = 0.0;  // lambda
    double dt = 1e-3;
    double t_max = 0.0;
};

double npv_path(const NpvSetup& setup, double x0, std::size_t i0, PathRng& rng) {
    const double phi = setup.phi;
    std::size_t i = i0;
    const StateDyn* s = &setup.states[i];
    double u = x0;
    double t = 0.0;
    double total = 0.0;
    auto omega = [&](double x) { return setup.payoff ? setup.payoff_rate * setup.payoff->eval(x) : 0.0; };

    if (u > s->barrier) {
        total += u - s->barrier;
        u = s->barrier;
    }
    double w_prev = omega(u);
    double kill = rng.exp_time(s->rate);
    double next_jump = rng.exp_time(s->eta);
    double next_switch = rng.exp_time(s->switch_rate);

    auto step = [&](double tau) {
        const double b = s->barrier;
        if (s->sigma > 0.0) {
            const double var = s->sigma * s->sigma * tau;
            const double u0 = u;
            double c = u0 + s->mu * tau + std::sqrt(var) * rng.gaussian();
            double inj = 0.0;
            double div = 0.0;
            if (c <= 0.0 || 2.0 * u0 * c / var < kNegligibleExponent) {
                const double m = bridge_extreme(u0, c, var, -1.0, rng.bridge_uniform());
                if (m < 0.0) inj = -m;
            }
            c += inj;
            if (c >= b || 2.0 * (b - u0) * (b - c) / var < kNegligibleExponent) {
                const double mx = bridge_extreme(u0, c, var, 1.0, rng.bridge_uniform());
                if (mx > b) div = mx - b;
            }
            c -= div;
            if (c < 0.0) {  // both barriers touched within one step
                inj -= c;
                c = 0.0;
            }
            u = std::min(c, b);
            total += div - phi * inj;
        } else {
            // Bounded variation: deterministic drift mu < 0, exact hitting time of 0.
            double c = u + s->mu * tau;
            if (c < 0.0) {
                total += phi * c;
                c = 0.0;
            }
            u = c;
        }
        if (!(u >= 0.0 && u <= b)) throw std::logic_error("reflected path left [0, b]");
        const double w_now = omega(u);
        total += 0.5 * tau * (w_prev + w_now);
        w_prev = w_now;
        return true;
    };

    const double stop = std::min(kill, setup.t_max);
    double horizon = stop;
    while (t < horizon) {
        const double t_end = std::min({next_jump, next_switch, horizon});
        march(t, t_end, setup.dt, step);
        if (t >= horizon) break;
        if (next_jump <= next_switch) {
            u += sample_mix(s->mix, rng);
            if (u > s->barrier) {
                total += u - s->barrier;
                u = s->barrier;
            }
            next_jump = t + rng.exp_time(s->eta);
        } else {
            const SwitchDraw sw = draw_switch(*s, rng);
            u += sw.jump;
            if (u < 0.0) {
                total += phi * u;
                u = 0.0;
            }
            i = sw.to;
            s = &setup.states[i];
            if (u > s->barrier) {
                total += u - s->barrier;
                u = s->barrier;
            }
            next_jump = t + rng.exp_time(s->eta);
            next_switch = t + rng.exp_time(s->switch_rate);
            kill = t + rng.exp_time(s->rate);
            horizon = std::min(kill, setup.t_max);
        }
        w_prev = omega(u);
    }
    return total;
}

// ---------------------------------------------------------------- exit paths

// Returns {down_first, up_first} for the path killed at rate q. Crossings
// between grid times enter through exact Brownian-bridge probabilities,
// carried as a survival weight.
std::array<double, 2> two_sided_exit_path(const StateDyn& s, double b, double x, double dt, double t_max,
                                          PathRng& rng) {
    if (x <= 0.0 && (s.sigma > 0.0 || s.mu < 0.0)) return {1.0, 0.0};
    if (x >= b && s.sigma > 0.0) return {0.0, 1.0};

    double u = x;
    double t = 0.0;
    double alive = 1.0;
    double down = 0.0;
    double up = 0.0;
    bool done = false;
    const double horizon = std::min(rng.exp_time(s.rate), t_max);
    double next_jump = rng.exp_time(s.eta);

    auto step = [&](double tau) {
        if (s.sigma > 0.0) {
            const double var = s.sigma * s.sigma * tau;
            const double c = u + s.mu * tau + std::sqrt(var) * rng.gaussian();
            if (c <= 0.0) {
                down += alive;
                done = true;
            } else if (c >= b) {
                up += alive;
                done = true;
            } else {
                const double a0 = 2.0 * u * c / var;
                const double ab = 2.0 * (b - u) * (b - c) / var;
                const double p0 = a0 < kNegligibleExponent ? std::exp(-a0) : 0.0;
                const double pb = ab < kNegligibleExponent ? std::exp(-ab) : 0.0;
                down += alive * p0;
                up += alive * pb;
                alive *= std::max(0.0, 1.0 - p0 - pb);
                u = c;
            }
        } else {
            u += s.mu * tau;
            if (u < 0.0) {
                down += alive;
                done = true;
            }
        }
        return !done;
    };

    while (!done && t < horizon) {
        const double t_end = std::min(next_jump, horizon);
        march(t, t_end, s.sigma > 0.0 ? dt : kInf, step);
        if (done || t >= horizon) break;
        u += sample_mix(s.mix, rng);
        if (u > b) {
            up += alive;
            done = true;
        }
        next_jump = t + rng.exp_time(s.eta);
    }
    return {down, up};
}

// Indicator that the path reflected from above at b reaches 0 before being
// killed at rate q, i.e. an unbiased sample of e^{-q sigma_b^+}.
double reflected_exit_path(const StateDyn& s, double b, double x, double dt, double t_max, PathRng& rng) {
    if (x <= 0.0) return 1.0;
    double u = std::min(x, b);
    double t = 0.0;
    double alive = 1.0;
    double hit = 0.0;
    bool done = false;
    const double horizon = std::min(rng.exp_time(s.rate), t_max);
    double next_jump = rng.exp_time(s.eta);

    auto step = [&](double tau) {
        if (s.sigma > 0.0) {
            const double var = s.sigma * s.sigma * tau;
            double c = u + s.mu * tau + std::sqrt(var) * rng.gaussian();
            if (c >= b || 2.0 * (b - u) * (b - c) / var < kNegligibleExponent) {
                const double mx = bridge_extreme(u, c, var, 1.0, rng.bridge_uniform());
                if (mx > b) c -= mx - b;
            }
            if (c <= 0.0) {
                hit += alive;
                done = true;
            } else {
                const double a0 = 2.0 * u * c / var;
                const double p0 = a0 < kNegligibleExponent ? std::exp(-a0) : 0.0;
                hit += alive * p0;
                alive *= 1.0 - p0;
                u = c;
            }
        } else {
            u += s.mu * tau;
            if (u <= 0.0) {
                hit += alive;
                done = true;
            }
        }
        return !done;
    };

    while (!done && t < horizon) {
        const double t_end = std::min(next_jump, horizon);
        march(t, t_end, s.sigma > 0.0 ? dt : kInf, step);
        if (done || t >= horizon) break;
        u = std::min(u + sample_mix(s.mix, rng), b);
        next_jump = t + rng.exp_time(s.eta);
    }
    return hit;
}

// ---------------------------------------------------------------- bound paths

// {int e^{-d t} d(inf X ^ 0), int e^{-d t} d(sup X v 0), part of the latter after t_max / 2}
std::array<double, 3> bound_path(const std::vector<StateDyn>& states, double delta, std::size_t i0, double dt,
                                 double t_max, PathRng& rng) {
    std::size_t i = i0;
    const StateDyn* s = &states[i];
    double u = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double t = 0.0;
    double disc = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    double upper_late = 0.0;
    const double half = 0.5 * t_max;
    double next_jump = rng.exp_time(s->eta);
    double next_switch = rng.exp_time(s->switch_rate);

    auto add_upper = [&](double amount) {
        upper += amount;
        if (t >= half) upper_late += amount;
    };

    auto step = [&](double tau) {
        const double disc_mid = disc * std::exp(-0.5 * delta * tau);
        if (s->sigma > 0.0) {
            const double var = s->sigma * s->sigma * tau;
            const double c = u + s->mu * tau + std::sqrt(var) * rng.gaussian();
            if (c <= lo || 2.0 * (u - lo) * (c - lo) / var < kNegligibleExponent) {
                const double m = bridge_extreme(u, c, var, -1.0, rng.bridge_uniform());
                if (m < lo) {
                    lower += disc_mid * (m - lo);
                    lo = m;
                }
            }
            if (c >= hi || 2.0 * (hi - u) * (hi - c) / var < kNegligibleExponent) {
                const double m = bridge_extreme(u, c, var, 1.0, rng.bridge_uniform());
                if (m > hi) {
                    add_upper(disc_mid * (m - hi));
                    hi = m;
                }
            }
            u = c;
        } else {
            const double c = u + s->mu * tau;
            if (c < lo) {
                const double from = (u - lo) / -s->mu;
                lower += s->mu * disc * (std::exp(-delta * from) - std::exp(-delta * tau)) / delta;
                lo = c;
            }
            u = c;
        }
        disc *= std::exp(-delta * tau);
        return true;
    };

    while (t < t_max) {
        const double t_end = std::min({next_jump, next_switch, t_max});
        march(t, t_end, dt, step);
        if (t >= t_max) break;
        if (next_jump <= next_switch) {
            u += sample_mix(s->mix, rng);
            if (u > hi) {
                add_upper(disc * (u - hi));
                hi = u;
            }
            next_jump = t + rng.exp_time(s->eta);
        } else {
            const SwitchDraw sw = draw_switch(*s, rng);
            u += sw.jump;
            if (u < lo) {
                lower += disc * (u - lo);
                lo = u;
            }
            i = sw.to;
            s = &states[i];
            next_jump = t + rng.exp_time(s->eta);
            next_switch = t + rng.exp_time(s->switch_rate);
        }
    }
    return {lower, upper, upper_late};
}

// ---------------------------------------------------------------- driver

enum PathKind : std::uint64_t { kNpvPaths = 11, kExitPaths = 12, kReflectedPaths = 13, kBoundPaths = 14 };

// Runs fn(rng) for every path (or antithetic pair) and returns per-sample
// results in index order, so the merge is independent of the thread split.
template <std::size_t K, class Fn>
std::vector<std::array<double, K>> run_paths(const SimConfig& cfg, std::uint64_t kind, Fn&& fn) {
    const std::size_t samples = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    std::vector<std::array<double, K>> out(samples);
    auto work = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to; ++k) {
            PathRng rng(cfg.rng_seed, kind, k, 1.0);
            std::array<double, K> r = fn(rng);
            if (cfg.antithetic) {
                PathRng twin(cfg.rng_seed, kind, k, -1.0);
                const std::array<double, K> r2 = fn(twin);
                for (std::size_t c = 0; c < K; ++c) r[c] = 0.5 * (r[c] + r2[c]);
            }
            out[k] = r;
        }
    };

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(samples, 1)));
    if (workers <= 1) {
        work(0, samples);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (samples + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t from = std::min(samples, w * chunk);
        const std::size_t to = std::min(samples, from + chunk);
        pool.emplace_back([&, w, from, to] {
            try {
                work(from, to);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <std::size_t K>
SimEstimate summarize(const std::vector<std::array<double, K>>& samples, std::size_t column, double allowance) {
    const std::size_t n = samples.size();
    double mean = 0.0;
    for (const auto& s : samples) mean += s[column];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : samples) ss += (s[column] - mean) * (s[column] - mean);
    const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return {mean, se + allowance, n};
}

void require_config(const SimConfig& cfg, double q_min) {
    if (auto d = validate(cfg, q_min)) throw std::invalid_argument("invalid SimConfig: " + *d);
}

// Growth bound on |E[future NPV]| per unit of discounted time.
double activity_bound(const LevySpec& spec) {
    return std::abs(spec.drift_mu) + spec.sigma + (spec.has_jumps() ? spec.jump_rate * spec.mean_jump() : 0.0);
}

}  // namespace

double effective_horizon(const SimConfig& cfg, double q_min) {
    if (cfg.t_max > 0.0) return cfg.t_max;
    return -std::log(kTruncationLevel) / q_min * (1.0 + 1e-6);
}

std::optional<std::string> validate(const SimConfig& cfg, double q_min) {
    if (cfg.n_paths < 1) return "n_paths must be >= 1";
    if (cfg.antithetic && (cfg.n_paths < 2 || cfg.n_paths % 2 != 0)) return "antithetic sampling needs an even n_paths";
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) return "dt must be > 0";
    if (!(q_min > 0.0)) return "discount rate must be > 0";
    if (cfg.t_max < 0.0 || !std::isfinite(cfg.t_max)) return "t_max must be >= 0";
    if (!(std::exp(-q_min * effective_horizon(cfg, q_min)) < kTruncationLevel))
        return "t_max too short: exp(-q t_max) must be < 1e-8";
    return std::nullopt;
}

SimEstimate simulate_aux_npv(const LevySpec& spec, const PiecewiseLinear& payoff, double lambda, double delta,
                             double phi, double b, double x0, const SimConfig& cfg) {
    require_valid(spec);
    if (!(lambda >= 0.0) || !(delta > 0.0) || !(phi > 1.0)) throw std::invalid_argument("simulate_aux_npv: bad rates");
    if (!(b > 0.0) || !(x0 >= 0.0)) throw std::invalid_argument("simulate_aux_npv: need b > 0 and x0 >= 0");
    const double q = delta + lambda;
    require_config(cfg, q);

    NpvSetup setup;
    setup.states.push_back(from_levy(spec, q, b));
    setup.phi = phi;
    setup.payoff = lambda > 0.0 ? &payoff : nullptr;
    setup.payoff_rate = lambda;
    setup.dt = cfg.dt;
    setup.t_max = effective_horizon(cfg, q);

    const auto samples = run_paths<1>(cfg, kNpvPaths, [&](PathRng& rng) {
        return std::array<double, 1>{npv_path(setup, x0, 0, rng)};
    });
    const double payoff_bound = std::abs(payoff.eval(0.0)) + std::abs(payoff.eval(b));
    const double bound = b + (phi * activity_bound(spec) + lambda * payoff_bound) / q;
    return summarize(samples, 0, std::exp(-q * setup.t_max) * bound);
}

ExitEstimates estimate_exit_identities(const LevySpec& spec, double q, double b, double x, const SimConfig& cfg) {
    require_valid(spec);
    if (!(q > 0.0) || !(b > 0.0)) throw std::invalid_argument("estimate_exit_identities: need q > 0 and b > 0");
    if (!(x >= 0.0 && x <= b)) throw std::invalid_argument("estimate_exit_identities: x outside [0, b]");
    require_config(cfg, q);
    const StateDyn s = from_levy(spec, q, b);
    const double t_max = effective_horizon(cfg, q);
    const double allowance = std::exp(-q * t_max);

    const auto two = run_paths<2>(cfg, kExitPaths, [&](PathRng& rng) {
        return two_sided_exit_path(s, b, x, cfg.dt, t_max, rng);
    });
    const auto refl = run_paths<1>(cfg, kReflectedPaths, [&](PathRng& rng) {
        return std::array<double, 1>{reflected_exit_path(s, b, x, cfg.dt, t_max, rng)};
    });
    return {summarize(two, 0, allowance), summarize(two, 1, allowance), summarize(refl, 0, allowance)};
}

SimEstimate simulate_regime_npv(const RegimeModel& model, const std::vector<double>& barriers, double x0,
                                std::size_t i0, const SimConfig& cfg) {
    require_valid(model);
    if (barriers.size() != model.size()) throw std::invalid_argument("simulate_regime_npv: one barrier per state");
    for (double b : barriers)
        if (!(b > 0.0)) throw std::invalid_argument("simulate_regime_npv: barriers must be > 0");
    if (i0 >= model.size() || !(x0 >= 0.0)) throw std::invalid_argument("simulate_regime_npv: bad start");
    const double delta_min = *std::min_element(model.discounts.begin(), model.discounts.end());
    require_config(cfg, delta_min);

    NpvSetup setup;
    setup.states = regime_dynamics(model, &barriers, true);
    setup.phi = model.phi;
    setup.dt = cfg.dt;
    setup.t_max = effective_horizon(cfg, delta_min);

    const auto samples = run_paths<1>(cfg, kNpvPaths, [&](PathRng& rng) {
        return std::array<double, 1>{npv_path(setup, x0, i0, rng)};
    });
    double activity = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        double jumps = 0.0;
        for (std::size_t j = 0; j < model.size(); ++j)
            if (j != i) jumps += model.switch_rates[i][j] * -model.switch_jumps[i][j].mean();
        activity = std::max(activity, activity_bound(model.levy[i]) + jumps);
    }
    const double b_max = *std::max_element(barriers.begin(), barriers.end());
    const double bound = std::max(x0, b_max) + model.phi * activity / delta_min;
    return summarize(samples, 0, std::exp(-delta_min * setup.t_max) * bound);
}

BoundIntegrals estimate_value_bounds(const RegimeModel& model, std::size_t i0, const SimConfig& cfg) {
    require_valid(model);
    if (i0 >= model.size()) throw std::invalid_argument("estimate_value_bounds: bad start state");
    const double delta_min = *std::min_element(model.discounts.begin(), model.discounts.end());
    require_config(cfg, delta_min);
    const auto states = regime_dynamics(model, nullptr, false);
    const double t_max = effective_horizon(cfg, delta_min);

    const auto samples = run_paths<3>(cfg, kBoundPaths, [&](PathRng& rng) {
        return bound_path(states, delta_min, i0, cfg.dt, t_max, rng);
    });
    BoundIntegrals out;
    out.lower = summarize(samples, 0, 0.0);
    out.upper = summarize(samples, 1, 0.0);
    const SimEstimate late = summarize(samples, 2, 0.0);
    out.upper_converged = std::isfinite(out.upper.mean) && late.mean <= std::max(out.upper.std_error, 1e-6);
    return out;
}

}  // namespace spdiv
