#include "capac/potential.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "capac/errors.hpp"
#include "capac/quadrature.hpp"
#include "capac/spline.hpp"

namespace capac {

// ---------------------------------------------------------------------------
// CubicSpline

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 3) throw ConfigError("spline needs at least 3 samples");
    for (int i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw ConfigError("spline abscissae must be strictly increasing");
    // Tridiagonal solve for natural end conditions.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i + 1 < n; ++i) {
        double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        r[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    m_.assign(n, 0.0);
    std::vector<double> cp(n, 0.0), rp(n, 0.0);
    cp[0] = c[0] / b[0];
    rp[0] = r[0] / b[0];
    for (int i = 1; i < n; ++i) {
        double den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        rp[i] = (r[i] - a[i] * rp[i - 1]) / den;
    }
    m_[n - 1] = rp[n - 1];
    for (int i = n - 2; i >= 0; --i) m_[i] = rp[i] - cp[i] * m_[i + 1];
}

int CubicSpline::locate(double t) const {
    int lo = 0, hi = static_cast<int>(x_.size()) - 1;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (x_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
}

double CubicSpline::eval(double t) const {
    if (t <= x_.front())
        return y_.front() + deriv(x_.front()) * (t - x_.front());
    if (t >= x_.back())
        return y_.back() + deriv(x_.back()) * (t - x_.back());
    int i = locate(t);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double t) const {
    double tc = std::clamp(t, x_.front(), x_.back());
    int i = locate(tc);
    if (tc >= x_.back()) i = static_cast<int>(x_.size()) - 2;
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - tc) / h, B = (tc - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h -
           (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
           (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
}

double CubicSpline::deriv2(double t) const {
    if (t <= x_.front() || t >= x_.back()) return 0.0;
    int i = locate(t);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * m_[i] + B * m_[i + 1];
}

// ---------------------------------------------------------------------------
// Wells

namespace {

void validate_well(const DoubleWell& w) {
    // Wells flat and nondegenerate.
    for (double s : {-1.0, 1.0}) {
        if (std::abs(w.eval(s)) > 1e-10)
            throw ConfigError("double well must vanish at s = +-1");
        if (std::abs(w.d1(s)) > 1e-8)
            throw ConfigError("double well must be critical at s = +-1");
        if (w.d2(s) < 1e-8)
            throw ConfigError("double well has degenerate curvature at s = +-1");
    }
    // Positivity away from the wells on a fine grid of [-2, 2] (skip the
    // wells themselves and their immediate floating-point halo).
    for (int i = 0; i <= 2000; ++i) {
        double s = -2.0 + 4.0 * i / 2000.0;
        if (std::min(std::abs(s - 1.0), std::abs(s + 1.0)) < 1e-6) continue;
        if (!(w.eval(s) > 0.0))
            throw ConfigError("double well must be positive away from s = +-1");
    }
    // One-sided limits of W'/sqrt(W): sampled at 1 - 10^-k, Cauchy behavior.
    for (double side : {-1.0, 1.0}) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        double last_gap = std::numeric_limits<double>::infinity();
        for (int k = 3; k <= 8; ++k) {
            double s = side * (1.0 - std::pow(10.0, -k));
            double Wv = w.eval(s);
            if (!(Wv > 0.0)) continue;
            double ratio = w.d1(s) / std::sqrt(Wv);
            if (!std::isfinite(ratio))
                throw ConfigError("W'/sqrt(W) diverges approaching the wells");
            if (std::isfinite(prev)) last_gap = std::abs(ratio - prev);
            prev = ratio;
        }
        if (!(last_gap < 0.05 * (1.0 + std::abs(prev))))
            throw ConfigError("W'/sqrt(W) fails the Cauchy check at the wells");
    }
}

unsigned long long fnv1a(const void* data, size_t n, unsigned long long h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

DoubleWell quartic_well() {
    DoubleWell w;
    w.kind = "quartic";
    w.eval = [](double s) {
        double q = 1.0 - s * s;
        return 0.25 * q * q;
    };
    w.d1 = [](double s) { return s * (s * s - 1.0); };
    w.d2 = [](double s) { return 3.0 * s * s - 1.0; };
    w.id = fnv1a("quartic", 7, 14695981039346656037ull);
    validate_well(w);
    return w;
}

DoubleWell table_well(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 9)
        throw ConfigError("table well needs at least 9 samples");
    std::vector<double> xs, ys;
    xs.reserve(samples.size());
    ys.reserve(samples.size());
    for (auto& [s, W] : samples) {
        xs.push_back(s);
        ys.push_back(W);
    }
    if (xs.front() > -1.2 + 1e-12 || xs.back() < 1.2 - 1e-12)
        throw ConfigError("table well samples must cover [-1.2, 1.2]");
    auto spline = std::make_shared<CubicSpline>(xs, ys);
    DoubleWell w;
    w.kind = "table";
    w.eval = [spline](double s) { return spline->eval(s); };
    w.d1 = [spline](double s) { return spline->deriv(s); };
    w.d2 = [spline](double s) { return spline->deriv2(s); };
    unsigned long long h = 14695981039346656037ull;
    h = fnv1a(xs.data(), xs.size() * sizeof(double), h);
    h = fnv1a(ys.data(), ys.size() * sizeof(double), h);
    w.id = h;
    validate_well(w);
    return w;
}

EvalTriple eval_well(const DoubleWell& w, double s) {
    if (!std::isfinite(s)) throw ConfigError("eval_well: non-finite input");
    return {w.eval(s), w.d1(s), w.d2(s)};
}

WellConstants derive_constants(const DoubleWell& w, double quad_tol) {
    if (!(quad_tol > 0.0)) throw ConfigError("derive_constants: quad_tol <= 0");
    auto integ = integrate([&](double s) { return std::sqrt(2.0 * w.eval(s)); },
                           -1.0, 1.0, quad_tol, 1e-15);
    WellConstants k;
    k.c0 = integ.value;
    k.c_star = k.c0;
    k.gamma_plus = std::sqrt(w.d2(1.0));
    k.gamma_minus = std::sqrt(w.d2(-1.0));
    k.mass_constant = std::numeric_limits<double>::quiet_NaN();
    return k;
}

WettingDensity build_wetting(const DoubleWell& w, double theta, double quad_tol) {
    if (!(theta > 0.0) || theta > M_PI / 2.0 + 1e-15)
        throw ConfigError("contact angle must lie in (0, pi/2], got " +
                          std::to_string(theta));
    const double ct = std::cos(theta);
    WettingDensity wd;
    wd.theta = theta;

    auto sq2W = [well = w](double s) { return std::sqrt(2.0 * well.eval(s)); };

    // sigma'' from inside the wells: cos(theta) * W'/sqrt(2W), continued by
    // its one-sided limit at s = +-1 (the outer branch has a sign flip across
    // the corner of sqrt(2W); the inner limit is the stated convention).
    auto inner_limit = [well = w](double side) {
        double s = side * (1.0 - 1e-7);
        return well.d1(s) / std::sqrt(2.0 * well.eval(s));
    };
    const double lim_p = inner_limit(1.0), lim_m = inner_limit(-1.0);

    wd.sigma1 = [ct, sq2W](double s) { return ct * sq2W(s); };
    wd.sigma2 = [ct, well = w, lim_p, lim_m](double s) {
        if (std::abs(s - 1.0) < 1e-9) return ct * lim_p;
        if (std::abs(s + 1.0) < 1e-9) return ct * lim_m;
        return ct * well.d1(s) / std::sqrt(2.0 * well.eval(s));
    };

    if (w.kind == "quartic") {
        // F(s) = int_{-1}^{s} sqrt(2W), piecewise polynomial.
        auto F = [](double s) {
            const double r2 = std::sqrt(2.0);
            if (s < -1.0) return (s * s * s / 3.0 - s - 2.0 / 3.0) / r2;
            if (s <= 1.0) return (s - s * s * s / 3.0 + 2.0 / 3.0) / r2;
            double c0 = 4.0 / (3.0 * r2);
            return c0 + (s * s * s / 3.0 - s + 2.0 / 3.0) / r2;
        };
        wd.sigma = [ct, F](double s) { return ct * F(s); };
        return wd;
    }

    // Tabulated cumulative quadrature with exact-derivative Hermite pieces.
    const int n = 1201;
    const double lo = -1.5, hi = 1.5;
    auto grid = std::make_shared<std::vector<double>>(n);
    auto vals = std::make_shared<std::vector<double>>(n);
    auto ders = std::make_shared<std::vector<double>>(n);
    double acc = 0.0;
    (*grid)[0] = lo;
    (*ders)[0] = sq2W(lo);
    // Accumulate from lo, then shift so sigma(-1) = 0.
    for (int i = 1; i < n; ++i) {
        double a = lo + (hi - lo) * (i - 1) / (n - 1);
        double b = lo + (hi - lo) * i / (n - 1);
        acc += integrate(sq2W, a, b, quad_tol, 1e-15).value;
        (*grid)[i] = b;
        (*vals)[i] = acc;
        (*ders)[i] = sq2W(b);
    }
    int i_m1 = static_cast<int>(std::lround((-1.0 - lo) / (hi - lo) * (n - 1)));
    double shift = (*vals)[i_m1];
    for (auto& v : *vals) v -= shift;
    wd.sigma = [ct, grid, vals, ders](double s) {
        const auto& x = *grid;
        double t = std::clamp(s, x.front(), x.back());
        int lo_i = 0, hi_i = static_cast<int>(x.size()) - 1;
        while (hi_i - lo_i > 1) {
            int mid = (lo_i + hi_i) / 2;
            (x[mid] <= t ? lo_i : hi_i) = mid;
        }
        double h = x[lo_i + 1] - x[lo_i];
        double u = (t - x[lo_i]) / h;
        double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return ct * (h00 * (*vals)[lo_i] + h * h10 * (*ders)[lo_i] +
                     h01 * (*vals)[lo_i + 1] + h * h11 * (*ders)[lo_i + 1]);
    };
    return wd;
}

} // namespace capac
