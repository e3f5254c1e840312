#include "spdiv/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdiv {

PiecewiseLinear::PiecewiseLinear(std::vector<Knot> knots, double slope_tail)
    : knots_(std::move(knots)), slope_tail_(slope_tail) {
    if (knots_.empty()) throw std::invalid_argument("knots not ascending: empty knot list");
    if (knots_.front().x != 0.0) throw std::invalid_argument("knots not ascending: first knot must be at x = 0");
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (!std::isfinite(knots_[k].x) || !std::isfinite(knots_[k].value))
            throw std::invalid_argument("non-finite knot");
        if (k > 0 && !(knots_[k].x > knots_[k - 1].x)) throw std::invalid_argument("knots not ascending");
    }
    if (!std::isfinite(slope_tail_)) throw std::invalid_argument("bad tail slope");
    slopes_.reserve(knots_.size() - 1);
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k)
        slopes_.push_back((knots_[k + 1].value - knots_[k].value) / (knots_[k + 1].x - knots_[k].x));
}

std::size_t PiecewiseLinear::segment(double x) const {
    // index k with knots[k].x <= x < knots[k+1].x
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const Knot& k) { return v < k.x; });
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double PiecewiseLinear::eval(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("payoff evaluated at x < 0");
    const std::size_t k = segment(x);
    if (k + 1 >= knots_.size()) return knots_.back().value + slope_tail_ * (x - knots_.back().x);
    return knots_[k].value + slopes_[k] * (x - knots_[k].x);
}

double PiecewiseLinear::right_derivative(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("payoff derivative at x < 0");
    const std::size_t k = segment(x);
    return (k + 1 >= knots_.size()) ? slope_tail_ : slopes_[k];
}

namespace {

double largest_violation(const std::vector<double>& slopes, double tail) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < slopes.size(); ++k) worst = std::max(worst, slopes[k + 1] - slopes[k]);
    if (!slopes.empty()) worst = std::max(worst, tail - slopes.back());
    return worst;
}

double slope_scale(const std::vector<double>& slopes, double tail) {
    double s = std::abs(tail);
    for (double v : slopes) s = std::max(s, std::abs(v));
    return 1.0 + s;
}

}  // namespace

ConcavePayoff make_payoff(std::vector<Knot> knots, double slope_tail) {
    PiecewiseLinear curve(std::move(knots), slope_tail);
    const auto& s = curve.slopes();
    if (largest_violation(s, slope_tail) > kConcavityTolerance * slope_scale(s, slope_tail))
        throw std::invalid_argument("not concave");
    if (slope_tail < 0.0 || slope_tail > 1.0) throw std::invalid_argument("bad tail slope");
    return ConcavePayoff(std::move(curve));
}

Concavified concavify(const std::vector<Knot>& samples, std::optional<double> slope_tail) {
    PiecewiseLinear raw(samples, slope_tail.value_or(0.0));
    const auto& slopes = raw.slopes();
    const std::size_t n = slopes.size();

    if (n == 0) return {ConcavePayoff(PiecewiseLinear(samples, slope_tail.value_or(0.0))), 0.0, std::nullopt};

    const double tail_in = slope_tail.value_or(slopes.back());
    const double violation = largest_violation(slopes, tail_in);
    if (violation <= kConcavityTolerance * slope_scale(slopes, tail_in))
        return {ConcavePayoff(PiecewiseLinear(samples, tail_in)), std::max(violation, 0.0), std::nullopt};

    struct Block {
        std::size_t first, last;  // segment range [first, last]
        double length, rise;
        double slope() const { return rise / length; }
    };
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < n; ++k) {
        const double len = samples[k + 1].x - samples[k].x;
        blocks.push_back({k, k, len, slopes[k] * len});
        while (blocks.size() > 1 && blocks.back().slope() > blocks[blocks.size() - 2].slope()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().last = top.last;
            blocks.back().length += top.length;
            blocks.back().rise += top.rise;
        }
    }

    // A tail steeper than the trailing blocks carries infinite weight.
    std::size_t tail_from = n;
    if (slope_tail) {
        while (!blocks.empty() && blocks.back().slope() < *slope_tail) {
            tail_from = blocks.back().first;
            blocks.pop_back();
        }
    }

    std::vector<Knot> out(samples.size());
    out[0] = samples[0];
    for (const auto& b : blocks) {
        const Knot& start = samples[b.first];
        const Knot& end = samples[b.last + 1];
        const double s = (end.value - start.value) / (end.x - start.x);
        for (std::size_t k = b.first + 1; k <= b.last; ++k)
            out[k] = {samples[k].x, start.value + s * (samples[k].x - start.x)};
        out[b.last + 1] = end;
    }
    for (std::size_t k = tail_from; k < n; ++k)
        out[k + 1] = {samples[k + 1].x, out[k].value + *slope_tail * (samples[k + 1].x - samples[k].x)};

    const double tail_out = slope_tail ? *slope_tail : blocks.back().slope();
    Concavified result{ConcavePayoff(PiecewiseLinear(std::move(out), tail_out)), violation, std::nullopt};
    if (violation > kConcavityWarning)
        result.warning = "concavify pooled a slope violation of " + std::to_string(violation);
    return result;
}

}  // namespace spdiv
