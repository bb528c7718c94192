#pragma once

#include <vector>

namespace capac {

/// Natural cubic spline through (x_i, y_i), strictly increasing x.
/// Evaluates value and first/second derivatives; clamped linear extrapolation
/// outside the knot range (second derivative zero there).
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const { return eval(t); }
    double eval(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    int locate(double t) const;
    std::vector<double> x_, y_, m_; // m_: second derivatives at knots
};

} // namespace capac
