#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace capac {

/// Double-well energy density with nondegenerate minima pinned at -1 and +1.
/// Constructed through quartic_well() or table_well(); construction validates
/// positivity away from the wells, flatness at the wells, and finiteness of
/// the one-sided limits of W'/sqrt(W) there.
struct DoubleWell {
    std::string kind;                         // "quartic" or "table"
    std::function<double(double)> eval;       // W
    std::function<double(double)> d1;         // W'
    std::function<double(double)> d2;         // W''
    std::pair<double, double> wells{-1.0, 1.0};

    /// Stable identity for memoization (profile cache); table wells hash
    /// their samples.
    unsigned long long id = 0;
};

/// W(s) = (1 - s^2)^2 / 4.
DoubleWell quartic_well();

/// Cubic-spline well through (s_i, W_i) samples covering [-1.2, 1.2].
/// Throws ConfigError when validation fails (wells not at +-1, negativity,
/// degenerate curvature).
DoubleWell table_well(const std::vector<std::pair<double, double>>& samples);

/// Wetting energy density sigma for contact angle theta in (0, pi/2]:
/// sigma'(s) = cos(theta) * sqrt(2 W(s)), normalized by sigma(-1) = 0.
/// sigma''(+-1) is the one-sided limit taken from inside the wells.
struct WettingDensity {
    double theta = 0.0;
    std::function<double(double)> sigma;
    std::function<double(double)> sigma1;
    std::function<double(double)> sigma2;
};

/// Scalar constants derived from the well.
/// c0 here is the surface density integral of sqrt(2W) over [-1,1]; the
/// mass-constraint constant of the same name in the statement of the problem
/// is a different object (a volume fraction) and lives with the capillary
/// curve. mass_constant stays NaN until a curve supplies the domain areas.
struct WellConstants {
    double c0 = 0.0;
    double c_star = 0.0;
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double mass_constant = 0.0;
};

struct EvalTriple {
    double W, dW, ddW;
};

/// Evaluate (W, W', W'') at s; rejects non-finite input.
EvalTriple eval_well(const DoubleWell& w, double s);

/// c0 by adaptive quadrature (relative tolerance quad_tol), gamma from the
/// well curvatures. mass_constant is left NaN (see WellConstants).
WellConstants derive_constants(const DoubleWell& w, double quad_tol = 1e-10);

/// Build sigma/sigma'/sigma'' for the given angle. sigma is closed-form for
/// the quartic and a cumulative-quadrature Hermite table otherwise.
WettingDensity build_wetting(const DoubleWell& w, double theta,
                             double quad_tol = 1e-10);

} // namespace capac
