#include "spdiv/scale_functions.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace spdiv {

namespace {

using Poly = std::vector<double>;  // ascending coefficients

Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

void add_into(Poly& acc, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += p[i];
}

// (psi(s) - q) * prod_k (mu_k + s)
Poly cleared_polynomial(const LevySpec& spec, double q) {
    const double half_var = 0.5 * spec.sigma * spec.sigma;
    const double eta = spec.has_jumps() ? spec.jump_rate : 0.0;
    Poly base{-eta - q, -spec.drift_mu};
    if (half_var > 0.0) base.push_back(half_var);
    if (!spec.has_jumps()) return base;

    Poly denom{1.0};
    for (const auto& t : spec.jump_mix) denom = multiply(denom, Poly{t.rate, 1.0});
    Poly out = multiply(base, denom);
    for (std::size_t k = 0; k < spec.jump_mix.size(); ++k) {
        Poly others{eta * spec.jump_mix[k].weight * spec.jump_mix[k].rate};
        for (std::size_t l = 0; l < spec.jump_mix.size(); ++l)
            if (l != k) others = multiply(others, Poly{spec.jump_mix[l].rate, 1.0});
        add_into(out, others);
    }
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

std::vector<std::complex<double>> companion_roots(const Poly& p) {
    const int n = static_cast<int>(p.size()) - 1;
    if (n < 1) throw std::runtime_error("scale function: degenerate polynomial");
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[i] / p[n];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    std::vector<std::complex<double>> out;
    for (int i = 0; i < n; ++i) out.push_back(solver.eigenvalues()[i]);
    return out;
}

double polish(const LevySpec& spec, double q, double s) {
    double best = s;
    double best_res = std::abs(psi_unrestricted(spec, s) - q);
    for (int it = 0; it < 60 && best_res > 0.0; ++it) {
        const double d = psi_deriv_unrestricted(spec, best);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double next = best - (psi_unrestricted(spec, best) - q) / d;
        const double res = std::abs(psi_unrestricted(spec, next) - q);
        if (!(res < best_res)) break;
        const double step = std::abs(next - best);
        best = next;
        best_res = res;
        if (step <= 1e-13 * std::max(1.0, std::abs(best))) break;
    }
    return best;
}

}  // namespace

ScaleEvaluator::ScaleEvaluator(const LevySpec& spec, double q) : spec_(spec), q_(q) {
    require_valid(spec);
    if (!(q > 0.0)) throw std::domain_error("scale function: q must be > 0");

    const Poly poly = cleared_polynomial(spec, q);
    for (const auto& z : companion_roots(poly)) {
        if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real())))
            throw std::runtime_error("complex roots");
        roots_.push_back(polish(spec, q, z.real()));
    }
    std::sort(roots_.begin(), roots_.end(), std::greater<>());

    if (roots_.size() < 2 || !(roots_[0] > 0.0) || !(roots_[1] < 0.0))
        throw std::runtime_error("scale function: expected exactly one positive root");
    const double gap_floor = 1e-9 * (1.0 + std::abs(roots_[0]));
    for (std::size_t j = 1; j < roots_.size(); ++j)
        if (roots_[j - 1] - roots_[j] <= gap_floor) throw std::runtime_error("near-multiple roots");

    for (double s : roots_) residues_.push_back(1.0 / psi_deriv_unrestricted(spec, s));
    w_at_zero_ = spec.bounded_variation() ? -1.0 / spec.drift_mu : 0.0;
    horizon_ = 700.0 / roots_[0];
}

void ScaleEvaluator::check_horizon(double x) const {
    if (x > horizon_) throw std::overflow_error("overflow horizon exceeded");
}

double ScaleEvaluator::W(double x) const {
    if (x < 0.0) return 0.0;
    check_horizon(x);
    double v = 0.0;
    for (std::size_t j = 0; j < roots_.size(); ++j) v += residues_[j] * std::exp(roots_[j] * x);
    return v;
}

double ScaleEvaluator::W_deriv(double x) const {
    if (!(x > 0.0)) throw std::domain_error("W_deriv: x must be > 0");
    check_horizon(x);
    double v = 0.0;
    for (std::size_t j = 0; j < roots_.size(); ++j)
        v += residues_[j] * roots_[j] * std::exp(roots_[j] * x);
    return v;
}

double ScaleEvaluator::W_second(double x) const {
    if (!(x > 0.0)) throw std::domain_error("W_second: x must be > 0");
    check_horizon(x);
    double v = 0.0;
    for (std::size_t j = 0; j < roots_.size(); ++j)
        v += residues_[j] * roots_[j] * roots_[j] * std::exp(roots_[j] * x);
    return v;
}

double ScaleEvaluator::Z(double x) const {
    if (x <= 0.0) return 1.0;
    check_horizon(x);
    double v = 0.0;
    for (std::size_t j = 0; j < roots_.size(); ++j)
        v += residues_[j] / roots_[j] * std::expm1(roots_[j] * x);
    return 1.0 + q_ * v;
}

// Uses sum_j c_j / s_j = 1/q (partial fractions of 1/(psi - q) at s = 0), which
// cancels the linear part of the termwise antiderivative.
double ScaleEvaluator::Zbar(double x) const {
    if (x <= 0.0) return x;
    check_horizon(x);
    double v = 0.0;
    for (std::size_t j = 0; j < roots_.size(); ++j)
        v += residues_[j] / (roots_[j] * roots_[j]) * std::expm1(roots_[j] * x);
    return q_ * v;
}

double ScaleEvaluator::Z_inverse(double level) const {
    if (!(level >= 1.0)) throw std::domain_error("Z_inverse: level must be >= 1");
    if (level == 1.0) return 0.0;
    double hi = 1.0 / roots_[0];
    while (Z(hi) < level) {
        hi *= 2.0;
        if (hi > horizon_) throw std::overflow_error("overflow horizon exceeded");
    }
    auto f = [&](double x) { return Z(x) - level; };
    std::uintmax_t max_iter = 200;
    auto r = boost::math::tools::toms748_solve(f, 0.0, hi, 1.0 - level, f(hi),
                                               boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (r.first + r.second);
}

ScaleEvaluator build_scale_evaluator(const LevySpec& spec, double q) { return ScaleEvaluator(spec, q); }

double verify_laplace_transform(const ScaleEvaluator& eval, double s, double horizon) {
    const double phi_q = eval.phi_q();
    if (!(s > phi_q)) throw std::domain_error("verify_laplace_transform: s must exceed Phi(q)");
    if (!(std::exp((phi_q - s) * horizon) < 1e-12))
        throw std::invalid_argument("verify_laplace_transform: horizon too short for the decay gap");

    const auto& roots = eval.roots();
    const auto& res = eval.residues();
    // exp(-s x) W(x) combined termwise so the integrand never overflows.
    auto integrand = [&](double x) {
        double v = 0.0;
        for (std::size_t j = 0; j < roots.size(); ++j) v += res[j] * std::exp((roots[j] - s) * x);
        return v;
    };
    const double numeric =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, horizon, 20, 1e-14);
    const double exact = 1.0 / (psi_unrestricted(eval.spec(), s) - eval.q());
    return std::abs(numeric - exact) / std::abs(exact);
}

}  // namespace spdiv
