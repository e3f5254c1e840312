#include "spdiv/levy_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spdiv {

double LevySpec::mean_jump() const {
    if (!has_jumps()) return 0.0;
    double m = 0.0;
    for (const auto& t : jump_mix) m += t.weight / t.rate;
    return m;
}

double LevySpec::mean() const { return drift_mu + jump_rate * mean_jump(); }

std::optional<std::string> validate(const LevySpec& spec) {
    if (!std::isfinite(spec.drift_mu) || !std::isfinite(spec.sigma) || !std::isfinite(spec.jump_rate))
        return "non-finite parameter";
    if (spec.sigma < 0.0) return "sigma must be >= 0";
    if (spec.jump_rate < 0.0) return "jump_rate must be >= 0";
    if (spec.jump_rate > 0.0) {
        if (spec.jump_mix.empty()) return "jump_rate > 0 requires a jump mixture";
        double total = 0.0;
        for (const auto& t : spec.jump_mix) {
            if (!(t.weight > 0.0 && t.weight <= 1.0)) return "mixture weight outside (0,1]";
            if (!(t.rate > 0.0) || !std::isfinite(t.rate)) return "mixture rate must be > 0";
            total += t.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) return "weights sum \xe2\x89\xa0 1";
        for (std::size_t a = 0; a < spec.jump_mix.size(); ++a)
            for (std::size_t b = a + 1; b < spec.jump_mix.size(); ++b)
                if (spec.jump_mix[a].rate == spec.jump_mix[b].rate)
                    return "mixture rates must be pairwise distinct";
    }
    if (spec.sigma == 0.0) {
        if (spec.jump_rate == 0.0) return "monotone paths: pure drift";
        if (spec.drift_mu >= 0.0) return "monotone paths: subordinator";
    }
    return std::nullopt;
}

void require_valid(const LevySpec& spec) {
    if (auto diag = validate(spec)) throw std::invalid_argument("invalid LevySpec: " + *diag);
}

double psi_unrestricted(const LevySpec& spec, double theta) {
    double v = -spec.drift_mu * theta + 0.5 * spec.sigma * spec.sigma * theta * theta;
    if (spec.has_jumps()) {
        double mix = 0.0;
        for (const auto& t : spec.jump_mix) mix += t.weight * t.rate / (t.rate + theta);
        v += spec.jump_rate * (mix - 1.0);
    }
    return v;
}

double psi_deriv_unrestricted(const LevySpec& spec, double theta) {
    double v = -spec.drift_mu + spec.sigma * spec.sigma * theta;
    if (spec.has_jumps()) {
        double mix = 0.0;
        for (const auto& t : spec.jump_mix) {
            const double d = t.rate + theta;
            mix += t.weight * t.rate / (d * d);
        }
        v -= spec.jump_rate * mix;
    }
    return v;
}

double laplace_exponent(const LevySpec& spec, double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("laplace_exponent: theta must be >= 0");
    return psi_unrestricted(spec, theta);
}

double laplace_exponent_deriv(const LevySpec& spec, double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("laplace_exponent_deriv: theta must be >= 0");
    return psi_deriv_unrestricted(spec, theta);
}

double phi_inverse(const LevySpec& spec, double q) {
    if (!(q > 0.0)) throw std::domain_error("phi_inverse: q must be > 0");
    auto f = [&](double s) { return psi_unrestricted(spec, s) - q; };

    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("phi_inverse: bracket expansion failed");
    }

    // psi is convex, so Newton started right of the root decreases
    // monotonically; bisection takes over whenever a step leaves the bracket.
    double s = hi;
    for (int it = 0; it < 200; ++it) {
        const double fs = f(s);
        if (fs > 0.0) hi = s; else lo = s;
        if (fs == 0.0 || hi - lo <= 1e-13) break;
        const double d = psi_deriv_unrestricted(spec, s);
        double next = (d > 0.0) ? s - fs / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-13 * std::max(1.0, s)) {
            s = next;
            break;
        }
        s = next;
    }
    return s;
}

}  // namespace spdiv
