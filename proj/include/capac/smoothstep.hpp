#pragma once

#include <algorithm>

namespace capac {

/// Quintic smoothstep 6x^5 - 15x^4 + 10x^3 clamped to [0,1].
/// C^2 at both ends; shared by every transition in the code (boundary collar
/// weight, interpolated coefficient fields, glue cutoffs).
inline double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

inline double smoothstep_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (x - 1.0) * (x - 1.0);
}

/// Ramp from 0 at x=a to 1 at x=b (a < b).
inline double smoothstep(double a, double b, double x) {
    return smoothstep((x - a) / (b - a));
}

/// Even bump: 1 for |t| <= r1, 0 for |t| >= r0, quintic in between (r1 < r0).
inline double smoothbump(double t, double r1, double r0) {
    double a = std::abs(t);
    if (a <= r1) return 1.0;
    if (a >= r0) return 0.0;
    return 1.0 - smoothstep((a - r1) / (r0 - r1));
}

inline double smoothbump_deriv(double t, double r1, double r0) {
    double a = std::abs(t);
    if (a <= r1 || a >= r0) return 0.0;
    double d = -smoothstep_deriv((a - r1) / (r0 - r1)) / (r0 - r1);
    return t < 0 ? -d : d;
}

} // namespace capac
