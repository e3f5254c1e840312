#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spdiv {

struct Knot {
    double x = 0.0;
    double value = 0.0;

    bool operator==(const Knot&) const = default;
};

/// Continuous piecewise-linear function on [0, inf): linear interpolation
/// between knots (first knot at x = 0) and a linear tail beyond the last knot.
/// No shape restriction; ConcavePayoff adds concavity.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<Knot> knots, double slope_tail);

    double eval(double x) const;
    /// Right derivative; at a knot this is the slope of the segment to its right.
    double right_derivative(double x) const;

    const std::vector<Knot>& knots() const { return knots_; }
    /// Segment slopes, slopes()[k] between knots k and k+1.
    const std::vector<double>& slopes() const { return slopes_; }
    double slope_tail() const { return slope_tail_; }
    double last_x() const { return knots_.back().x; }

private:
    std::size_t segment(double x) const;

    std::vector<Knot> knots_;
    std::vector<double> slopes_;
    double slope_tail_ = 0.0;
};

struct Concavified;

/// Concave piecewise-linear payoff omega with right derivatives omega'_+.
class ConcavePayoff {
public:
    double eval(double x) const { return curve_.eval(x); }
    double right_derivative(double x) const { return curve_.right_derivative(x); }
    const PiecewiseLinear& curve() const { return curve_; }
    const std::vector<Knot>& knots() const { return curve_.knots(); }
    double slope_tail() const { return curve_.slope_tail(); }

private:
    explicit ConcavePayoff(PiecewiseLinear curve) : curve_(std::move(curve)) {}

    PiecewiseLinear curve_;

    friend ConcavePayoff make_payoff(std::vector<Knot>, double);
    friend Concavified concavify(const std::vector<Knot>&, std::optional<double>);
};

/// Slope increases at or below this relative size are treated as roundoff.
inline constexpr double kConcavityTolerance = 1e-12;
/// Pooled violations above this size attach a warning.
inline constexpr double kConcavityWarning = 1e-6;

/// Validated payoff for external input. Throws std::invalid_argument with
/// "knots not ascending", "not concave" or "bad tail slope" (tail outside [0,1]).
ConcavePayoff make_payoff(std::vector<Knot> knots, double slope_tail);

struct Concavified {
    ConcavePayoff payoff;
    /// Largest slope increase found in the input (0 when already concave).
    double max_violation = 0.0;
    std::optional<std::string> warning;
};

/// Projects samples onto concave piecewise-linear functions by pooling adjacent
/// violators of slope monotonicity (segment lengths as weights). Values at
/// block boundaries are kept, so pooling only moves values inside violating
/// runs. The tail slope defaults to the last pooled slope; a tail steeper than
/// that is pooled into the last blocks. Input that is concave up to
/// kConcavityTolerance is returned unchanged.
Concavified concavify(const std::vector<Knot>& samples, std::optional<double> slope_tail = std::nullopt);

}  // namespace spdiv
