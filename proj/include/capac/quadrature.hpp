#pragma once

#include <functional>

namespace capac {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int intervals = 0;    // subintervals in the final partition
};

/// Globally adaptive Gauss-Kronrod (G7,K15) on [a,b].
/// Splits the worst interval until the summed error estimate drops below
/// max(abs_tol, rel_tol*|value|). Throws NumericError if the budget of
/// subdivisions is exhausted before that happens.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, double abs_tol = 1e-14,
                     int max_intervals = 4000);

/// Fixed-order Gauss-Legendre rules used for element/edge quadrature.
/// n in {1..5}; nodes on [0,1] with weights summing to 1.
struct GaussRule {
    int n;
    const double* x;
    const double* w;
};
GaussRule gauss_rule(int n);

} // namespace capac
