#include "spdiv/aux_solver.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdiv {

std::optional<std::string> validate(const AuxProblem& p) {
    if (auto d = validate(p.spec)) return "levy: " + *d;
    if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) return "lambda must be >= 0";
    if (!(p.delta > 0.0) || !std::isfinite(p.delta)) return "delta must be > 0";
    if (!(p.phi > 1.0) || !std::isfinite(p.phi)) return "phi must exceed 1";
    if (p.payoff.right_derivative(0.0) > p.phi) return "payoff slope at 0+ exceeds phi";
    return std::nullopt;
}

void require_valid(const AuxProblem& p) {
    if (auto d = validate(p)) throw std::invalid_argument("invalid AuxProblem: " + *d);
}

AuxClosedForm::AuxClosedForm(ScaleEvaluator eval, PiecewiseLinear omega, double lambda, double phi)
    : eval_(std::move(eval)), omega_(std::move(omega)), lambda_(lambda), phi_(phi) {}

AuxClosedForm::Breaks AuxClosedForm::breaks_up_to(double upper) const {
    Breaks br;
    br.t.push_back(0.0);
    if (!(upper > 0.0)) return br;
    const auto& knots = omega_.knots();
    const auto& slopes = omega_.slopes();
    std::size_t k = 1;
    for (; k < knots.size() && knots[k].x < upper; ++k) {
        br.d.push_back(slopes[k - 1]);
        br.t.push_back(knots[k].x);
    }
    br.d.push_back(k < knots.size() ? slopes[k - 1] : omega_.slope_tail());
    br.t.push_back(upper);
    return br;
}

template <class F>
double AuxClosedForm::segment_sum(const Breaks& br, double x, F&& f) const {
    double sum = 0.0;
    double prev = f(br.t[0] - x);
    for (std::size_t k = 0; k < br.d.size(); ++k) {
        const double cur = f(br.t[k + 1] - x);
        sum += br.d[k] * (cur - prev);
        prev = cur;
    }
    return sum;
}

double AuxClosedForm::ell(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("ell: x must be >= 0");
    const Breaks br = breaks_up_to(x);
    const double integral = segment_sum(br, 0.0, [&](double u) { return eval_.Z(u); }) / q();
    return eval_.Z(x) - lambda_ * integral - phi_;
}

double AuxClosedForm::ell_deriv(double x) const {
    return eval_.W(x) * (q() - lambda_ * omega_.right_derivative(x));
}

double AuxClosedForm::value_on_band(const Breaks& br, double b, double ell_b, double w_b, double x) const {
    const double qq = q();
    const double s_zbar = segment_sum(br, x, [&](double u) { return eval_.Zbar(u); });
    return -eval_.Zbar(b - x) + eval_.mean_increment() / qq +
           (lambda_ / qq) * (omega_.eval(0.0) + s_zbar) + eval_.Z(b - x) * ell_b / (qq * w_b);
}

std::vector<double> AuxClosedForm::values(double b, std::span<const double> xs) const {
    if (!(b > 0.0)) throw std::domain_error("value: barrier must be > 0");
    const Breaks br = breaks_up_to(b);
    const double ell_b = ell(b);
    const double w_b = eval_.W(b);
    const double v0 = value_on_band(br, b, ell_b, w_b, 0.0);
    const double vb = value_on_band(br, b, ell_b, w_b, b);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (x < 0.0)
            out.push_back(phi_ * x + v0);
        else if (x > b)
            out.push_back(x - b + vb);
        else
            out.push_back(value_on_band(br, b, ell_b, w_b, x));
    }
    return out;
}

double AuxClosedForm::value(double b, double x) const {
    const double xs[1] = {x};
    return values(b, xs)[0];
}

double AuxClosedForm::value_derivative(double b, double x) const {
    if (!(b > 0.0)) throw std::domain_error("value_derivative: barrier must be > 0");
    if (x < 0.0 || x > b) throw std::domain_error("value_derivative: x outside [0, b]");
    const Breaks br = breaks_up_to(b);
    const double s_z = segment_sum(br, x, [&](double u) { return eval_.Z(u); });
    return eval_.Z(b - x) - (lambda_ / q()) * s_z - eval_.W(b - x) * ell(b) / eval_.W(b);
}

double AuxClosedForm::value_second(double b, double x) const {
    if (!(x > 0.0 && x < b)) throw std::domain_error("value_second: x outside (0, b)");
    const Breaks br = breaks_up_to(b);
    const double s_w = segment_sum(br, x, [&](double u) { return eval_.W(u); });
    return -q() * eval_.W(b - x) + lambda_ * s_w + eval_.W_deriv(b - x) * ell(b) / eval_.W(b);
}

double ell(const AuxProblem& problem, double x) {
    require_valid(problem);
    AuxClosedForm form(ScaleEvaluator(problem.spec, problem.q()), problem.payoff.curve(), problem.lambda,
                       problem.phi);
    return form.ell(x);
}

double barrier_root(const AuxClosedForm& form, std::optional<double> warm_start) {
    auto f = [&](double x) { return form.ell(x); };
    const double horizon = form.evaluator().horizon();
    const double floor = form.evaluator().Z_inverse(form.phi());

    double lo = floor;
    double f_lo = f(lo);
    // Only reachable with payoffs whose slopes dip below 0.
    while (f_lo > 0.0 && lo > 1e-12) {
        lo *= 0.5;
        f_lo = f(lo);
    }

    double hi;
    double f_hi;
    if (warm_start && *warm_start > lo && *warm_start < horizon) {
        const double w = *warm_start;
        const double f_w = f(w);
        if (f_w > 0.0) {
            hi = w;
            f_hi = f_w;
            for (double cand = w * 0.97; cand > lo; cand *= 0.97) {
                const double fc = f(cand);
                if (fc <= 0.0) {
                    lo = cand;
                    f_lo = fc;
                    break;
                }
                hi = cand;
                f_hi = fc;
            }
        } else {
            lo = w;
            f_lo = f_w;
            hi = std::min(w * 1.03, horizon);
            f_hi = f(hi);
        }
    } else {
        hi = std::min(2.0 * lo, horizon);
        f_hi = f(hi);
    }

    while (f_hi <= 0.0) {
        if (hi >= horizon) throw std::runtime_error("no sign change within overflow horizon");
        lo = hi;
        f_lo = f_hi;
        hi = std::min(2.0 * hi, horizon);
        f_hi = f(hi);
    }
    if (f_lo == 0.0) return lo;

    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi,
                                               boost::math::tools::eps_tolerance<double>(52), max_iter);
    double x = 0.5 * (r.first + r.second);
    double fx = f(x);
    for (int it = 0; it < 8 && std::abs(fx) > 1e-14; ++it) {
        const double d = form.ell_deriv(x);
        if (!(d > 0.0)) break;
        const double next = x - fx / d;
        if (!(next >= r.first && next <= r.second)) break;
        const double fn = f(next);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = next;
        fx = fn;
    }
    return x;
}

AuxSolution barrier_root(const AuxProblem& problem, std::optional<double> warm_start) {
    require_valid(problem);
    AuxClosedForm form(ScaleEvaluator(problem.spec, problem.q()), problem.payoff.curve(), problem.lambda,
                       problem.phi);
    const double b = barrier_root(form, warm_start);
    return AuxSolution{b, problem, std::move(form)};
}

namespace {

AuxClosedForm closed_form_of(const AuxProblem& problem) {
    require_valid(problem);
    return AuxClosedForm(ScaleEvaluator(problem.spec, problem.q()), problem.payoff.curve(), problem.lambda,
                         problem.phi);
}

}  // namespace

double value(const AuxProblem& problem, double b, double x) { return closed_form_of(problem).value(b, x); }

double value_derivative(const AuxProblem& problem, double b, double x) {
    return closed_form_of(problem).value_derivative(b, x);
}

std::vector<double> dominance_gap(const AuxProblem& problem, double b, std::span<const double> grid) {
    const AuxClosedForm form = closed_form_of(problem);
    const double b_opt = barrier_root(form);
    const auto best = form.values(b_opt, grid);
    const auto other = form.values(b, grid);
    std::vector<double> gap(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) gap[k] = best[k] - other[k];
    return gap;
}

double hjb_residual(const AuxClosedForm& form, double b, double x) {
    if (!(x > 0.0)) throw std::domain_error("hjb_residual: x must be > 0");
    if (x == b) throw std::domain_error("hjb_residual: x must differ from the barrier");
    const LevySpec& spec = form.evaluator().spec();
    const double q = form.q();
    const double eta = spec.has_jumps() ? spec.jump_rate : 0.0;
    const double lam_omega = form.lambda() * form.omega().eval(x);

    if (x > b) {
        const double v = form.value(b, x);
        return spec.drift_mu + eta * spec.mean_jump() - q * v + lam_omega;
    }

    const double v = form.value(b, x);
    const double v1 = form.value_derivative(b, x);
    const double v2 = spec.sigma > 0.0 ? form.value_second(b, x) : 0.0;
    double generator = spec.drift_mu * v1 + 0.5 * spec.sigma * spec.sigma * v2;

    if (eta > 0.0) {
        const double span_to_b = b - x;
        const double vb = form.value(b, b);
        // V is smooth between payoff knots on [x, b] and linear above b.
        std::vector<double> cuts{0.0};
        for (const auto& k : form.omega().knots())
            if (k.x > x && k.x < b) cuts.push_back(k.x - x);
        cuts.push_back(span_to_b);

        double jump_part = 0.0;
        for (const auto& term : spec.jump_mix) {
            const double mu = term.rate;
            auto integrand = [&](double z) { return (form.value(b, x + z) - v) * mu * std::exp(-mu * z); };
            double inner = 0.0;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
                inner += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[c],
                                                                                      cuts[c + 1], 12, 1e-11);
            inner += std::exp(-mu * span_to_b) * (1.0 / mu + vb - v);
            jump_part += term.weight * inner;
        }
        generator += eta * jump_part;
    }
    return generator - q * v + lam_omega;
}

double hjb_residual(const AuxProblem& problem, double b, double x) {
    return hjb_residual(closed_form_of(problem), b, x);
}

}  // namespace spdiv
