#include "capac/profile1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "capac/errors.hpp"
#include "capac/quadrature.hpp"

namespace capac {

namespace {

// Uniform-grid cubic Hermite evaluation: values y with derivatives d at
// nodes t0 + i*h.
double hermite(const std::vector<double>& y, const std::vector<double>& d,
               double t0, double h, double t) {
    int n = static_cast<int>(y.size());
    double x = (t - t0) / h;
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, n - 2);
    double u = x - i;
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    double h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u);
    double h11 = u * u * (u - 1);
    return h00 * y[i] + h * h10 * d[i] + h01 * y[i + 1] + h * h11 * d[i + 1];
}

struct ProfileTable {
    std::vector<double> t, u, du, ddu;
    double t0, h;
    double gp, gm;   // decay rates
    double Ap, Am;   // tail amplitudes: u ~ 1 - Ap e^{-gp t}, -1 + Am e^{-gm|t|}
    double T;
};

// March the first integral u' = sqrt(2W(u)) from u(0) = 0 in direction
// dir = +-1, filling entries for t = h, 2h, ... T. Below well distance
// v_switch the step becomes the pure exponential of the indicial rate.
void march(const DoubleWell& w, double T, double h, int dir, double gamma,
           std::vector<double>& out_u) {
    const double v_switch = 1e-8;
    int steps = static_cast<int>(std::lround(T / h));
    out_u.assign(steps + 1, 0.0);
    double u = 0.0;
    auto speed = [&](double s) { return std::sqrt(2.0 * w.eval(s)); };
    for (int k = 1; k <= steps; ++k) {
        double v = 1.0 - dir * u; // distance to the approached well
        if (v < v_switch) {
            v *= std::exp(-gamma * h);
            u = dir * (1.0 - v);
        } else {
            // Solve int_{u}^{u_next} ds/speed = h for u_next by Newton with
            // a bisection safeguard on [u, dir*1).
            double lo = u, hi = dir * (1.0 - 1e-15);
            double guess = u + dir * std::min(h * speed(u) * (1 + 0.3 * h),
                                              0.9 * std::abs(hi - u));
            double un = guess;
            for (int it = 0; it < 60; ++it) {
                double g = integrate([&](double s) { return 1.0 / speed(s); },
                                     std::min(u, un), std::max(u, un), 1e-12,
                                     1e-15)
                               .value -
                           h;
                if (std::abs(g) < 1e-13) break;
                if (g > 0)
                    hi = un;
                else
                    lo = un;
                double cand = un - dir * g * speed(un);
                if ((cand - lo) * (cand - hi) < 0)
                    un = cand;
                else
                    un = 0.5 * (lo + hi);
            }
            u = un;
        }
        out_u[k] = u;
    }
}

std::shared_ptr<ProfileTable> build_table(const DoubleWell& w, GridSpec1D grid) {
    if (w.d2(1.0) < 1e-8 || w.d2(-1.0) < 1e-8)
        throw NumericError("degenerate well curvature: first-integral inversion diverges");
    const double gp = std::sqrt(w.d2(1.0));
    const double gm = std::sqrt(w.d2(-1.0));
    double T = grid.t_max > 0 ? grid.t_max : 12.0 / std::min(gp, gm);
    int n = grid.n;
    if (n < 129) throw ConfigError("profile grid too coarse (n >= 129)");
    if (n % 2 == 0) ++n; // keep a node exactly at t = 0
    const int half = (n - 1) / 2;
    const double h = T / half;

    std::vector<double> up, um;
    march(w, T, h, +1, gp, up);
    march(w, T, h, -1, gm, um);

    auto tab = std::make_shared<ProfileTable>();
    tab->t0 = -T;
    tab->h = h;
    tab->T = T;
    tab->gp = gp;
    tab->gm = gm;
    tab->t.resize(n);
    tab->u.resize(n);
    tab->du.resize(n);
    tab->ddu.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = -T + i * h;
        tab->t[i] = t;
        double u = i >= half ? up[i - half] : um[half - i];
        tab->u[i] = u;
        tab->du[i] = std::sqrt(std::max(2.0 * w.eval(u), 0.0));
        tab->ddu[i] = w.d1(u);
    }
    tab->Ap = (1.0 - tab->u[n - 1]) * std::exp(gp * T);
    tab->Am = (1.0 + tab->u[0]) * std::exp(gm * T);
    return tab;
}

double table_u(const ProfileTable& tb, double t) {
    if (t > tb.T) return 1.0 - tb.Ap * std::exp(-tb.gp * t);
    if (t < -tb.T) return -1.0 + tb.Am * std::exp(-tb.gm * (-t));
    return hermite(tb.u, tb.du, tb.t0, tb.h, t);
}

double table_du(const ProfileTable& tb, double t) {
    if (t > tb.T) return tb.gp * tb.Ap * std::exp(-tb.gp * t);
    if (t < -tb.T) return tb.gm * tb.Am * std::exp(-tb.gm * (-t));
    return hermite(tb.du, tb.ddu, tb.t0, tb.h, t);
}

std::mutex cache_mutex;
std::map<std::tuple<unsigned long long, double, int, bool>,
         std::shared_ptr<const HeteroclinicProfile>>
    profile_cache;

} // namespace

std::shared_ptr<const HeteroclinicProfile> solve_profile(const DoubleWell& w,
                                                         GridSpec1D grid,
                                                         bool force_generic) {
    std::tuple<unsigned long long, double, int, bool> key{w.id, grid.t_max,
                                                          grid.n, force_generic};
    {
        std::lock_guard<std::mutex> lk(cache_mutex);
        auto it = profile_cache.find(key);
        if (it != profile_cache.end()) return it->second;
    }

    auto tab = build_table(w, grid);
    const bool quartic = (w.kind == "quartic");

    if (quartic) {
        // The generic path must reproduce the closed form before we trust
        // either representation.
        double sup = 0.0;
        for (size_t i = 0; i < tab->t.size(); ++i) {
            double ref = std::tanh(tab->t[i] / std::sqrt(2.0));
            sup = std::max(sup, std::abs(tab->u[i] - ref));
        }
        if (sup > 1e-8)
            throw NumericError(
                "first-integral inversion disagrees with the closed-form "
                "quartic profile, sup deviation " + std::to_string(sup));
    }

    auto prof = std::make_shared<HeteroclinicProfile>();
    prof->decay = {tab->gp, tab->gm};
    prof->tail_cut = tab->T;
    prof->ts = tab->t;
    prof->us = tab->u;
    prof->dus = tab->du;

    if (quartic && !force_generic) {
        const double r2 = std::sqrt(2.0);
        prof->u1 = [r2](double t) { return std::tanh(t / r2); };
        prof->du1 = [r2](double t) {
            double s = 1.0 / std::cosh(std::min(std::abs(t) / r2, 350.0));
            return s * s / r2;
        };
        prof->ddu1 = [r2](double t) {
            double u = std::tanh(t / r2);
            return u * (u * u - 1.0);
        };
    } else {
        auto tb = tab;
        const DoubleWell well = w;
        prof->u1 = [tb](double t) { return table_u(*tb, t); };
        prof->du1 = [tb](double t) { return table_du(*tb, t); };
        prof->ddu1 = [tb, well](double t) { return well.d1(table_u(*tb, t)); };
    }

    // c = int (u1')^2 over the line; tail remainders are analytic.
    auto du = prof->du1;
    double T = tab->T;
    double core = integrate([du](double t) { return du(t) * du(t); }, -T, T,
                            1e-12, 1e-15)
                      .value;
    double tail_p = tab->gp * tab->Ap * tab->Ap * std::exp(-2.0 * tab->gp * T) / 2.0;
    double tail_m = tab->gm * tab->Am * tab->Am * std::exp(-2.0 * tab->gm * T) / 2.0;
    prof->c = core + tail_p + tail_m;

    std::shared_ptr<const HeteroclinicProfile> out = prof;
    std::lock_guard<std::mutex> lk(cache_mutex);
    profile_cache.emplace(key, out);
    return out;
}

// ---------------------------------------------------------------------------
// BandProjection

BandProjection::BandProjection(
    std::shared_ptr<const HeteroclinicProfile> profile, double epsilon)
    : profile_(std::move(profile)), eps_(epsilon) {
    if (!(eps_ > 0)) throw ConfigError("band projection needs epsilon > 0");
    double gmin = std::min(profile_->decay.first, profile_->decay.second);
    double T_int = std::max(profile_->tail_cut, 30.0 / gmin) + 2.0;
    radius_ = eps_ * T_int;
    auto du = profile_->du1;
    double e = eps_;
    // Keep the raw integral so Pi(u_dot) = 1 holds bit-exactly: the same
    // quadrature on the same integrand divides by itself.
    norm_ = integrate(
                [du, e](double t) {
                    double v = du(t / e);
                    return v * v;
                },
                -radius_, radius_, 1e-12, 1e-15)
                .value;
    c_eps_ = norm_ / eps_;
}

double BandProjection::u_dot(double t) const { return profile_->du1(t / eps_); }

double BandProjection::project_pi(
    const std::function<double(double)>& f) const {
    auto du = profile_->du1;
    double e = eps_;
    double I = integrate([&](double t) { return f(t) * du(t / e); }, -radius_,
                         radius_, 1e-12, 1e-15)
                   .value;
    return I / norm_;
}

std::function<double(double)> BandProjection::project_pi_perp(
    const std::function<double(double)>& f) const {
    double a = project_pi(f);
    auto du = profile_->du1;
    double e = eps_;
    return [f, a, du, e](double t) { return f(t) - a * du(t / e); };
}

// ---------------------------------------------------------------------------
// Spectrum of L0

namespace {

// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x,
// by the Sturm/LDL sign count.
int sturm_count(const std::vector<double>& diag, double off2, double x) {
    int count = 0;
    double d = diag[0] - x;
    if (d < 0) ++count;
    for (size_t i = 1; i < diag.size(); ++i) {
        if (d == 0.0) d = 1e-300;
        d = diag[i] - x - off2 / d;
        if (d < 0) ++count;
    }
    return count;
}

double bisect_eigenvalue(const std::vector<double>& diag, double off2, int k,
                         double lo, double hi) {
    // k-th eigenvalue (0-based) in [lo, hi].
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        (sturm_count(diag, off2, mid) > k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// Solve (T - shift I) x = b for tridiagonal T = (diag, off), Thomas with
// regularized pivots (good enough for inverse iteration).
void shifted_solve(const std::vector<double>& diag, double off, double shift,
                   std::vector<double>& x, const std::vector<double>& b) {
    size_t n = diag.size();
    std::vector<double> c(n), d(n);
    double piv = diag[0] - shift;
    if (std::abs(piv) < 1e-300) piv = 1e-300;
    c[0] = off / piv;
    d[0] = b[0] / piv;
    for (size_t i = 1; i < n; ++i) {
        piv = diag[i] - shift - off * c[i - 1];
        if (std::abs(piv) < 1e-300) piv = 1e-300;
        c[i] = off / piv;
        d[i] = (b[i] - off * d[i - 1]) / piv;
    }
    x.assign(n, 0.0);
    x[n - 1] = d[n - 1];
    for (int i = static_cast<int>(n) - 2; i >= 0; --i)
        x[i] = d[i] - c[i] * x[i + 1];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    double n = std::sqrt(dot(v, v));
    if (n > 0)
        for (auto& x : v) x /= n;
}

std::vector<double> inverse_iterate(const std::vector<double>& diag, double off,
                                    double shift,
                                    const std::vector<double>* orth) {
    std::vector<double> v(diag.size(), 1.0), w;
    for (size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 1e-3 * std::sin(1.0 + 7.0 * i);
    normalize(v);
    for (int it = 0; it < 40; ++it) {
        if (orth) {
            double p = dot(v, *orth);
            for (size_t i = 0; i < v.size(); ++i) v[i] -= p * (*orth)[i];
        }
        shifted_solve(diag, off, shift, w, v);
        normalize(w);
        double delta = 0.0;
        for (size_t i = 0; i < v.size(); ++i)
            delta = std::max(delta, std::abs(std::abs(w[i]) - std::abs(v[i])));
        v = w;
        if (delta < 1e-13) break;
    }
    if (orth) {
        double p = dot(v, *orth);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= p * (*orth)[i];
        normalize(v);
    }
    return v;
}

} // namespace

SpectrumL0 spectrum_L0(const DoubleWell& w, double domain_half_width,
                       int n_grid) {
    auto prof = solve_profile(w);
    double gmin = std::min(prof->decay.first, prof->decay.second);
    if (!(domain_half_width >= 10.0 / gmin))
        throw ConfigError("spectrum_L0: domain_half_width below 10/min(gamma)");
    if (n_grid < 512) throw ConfigError("spectrum_L0: n_grid >= 512 required");

    const double H = domain_half_width;
    const double h = 2.0 * H / n_grid;
    const int m = n_grid - 1; // interior nodes, Dirichlet ends
    std::vector<double> diag(m), ts(m), d(m);
    for (int i = 0; i < m; ++i) {
        double t = -H + (i + 1) * h;
        ts[i] = t;
        diag[i] = 2.0 / (h * h) + w.d2(prof->u1(t));
        d[i] = prof->du1(t);
    }
    const double off = -1.0 / (h * h);
    const double off2 = off * off;

    // Gershgorin bracket.
    double lo = diag[0], hi = diag[0];
    for (double v : diag) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    lo -= 2.0 / (h * h) + 1.0;
    hi += 2.0 / (h * h) + 1.0;

    SpectrumL0 out;
    out.lambda0 = bisect_eigenvalue(diag, off2, 0, lo, hi);
    out.lambda1 = bisect_eigenvalue(diag, off2, 1, out.lambda0, hi);
    out.ts = ts;

    double gap = out.lambda1 - out.lambda0;
    out.eigvec0 = inverse_iterate(diag, off, out.lambda0 - 1e-6 * (1 + std::abs(out.lambda0)), nullptr);

    std::vector<double> dn = d;
    normalize(dn);
    out.cos_ground = std::abs(dot(out.eigvec0, dn));

    // Deflated smallest eigenvalue on the complement of u1': root of the
    // secular function s(mu) = d^T (A - mu)^{-1} d in (lambda0, lambda1];
    // when d is numerically orthogonal to the second eigenvector the root
    // sits at lambda1 itself.
    std::vector<double> psi1 = inverse_iterate(
        diag, off, out.lambda1 - 1e-6 * (1 + std::abs(out.lambda1)), &out.eigvec0);
    double c1 = std::abs(dot(psi1, dn));
    if (c1 < 1e-9 || gap <= 0) {
        out.mu1 = out.lambda1;
    } else {
        auto secular = [&](double mu) {
            std::vector<double> x;
            shifted_solve(diag, off, mu, x, dn);
            return dot(dn, x);
        };
        double a = out.lambda0 + 1e-10 * (1 + std::abs(out.lambda0)) + 1e-12;
        double b = out.lambda1 - 1e-10 * (1 + std::abs(out.lambda1));
        double fa = secular(a), fb = secular(b);
        if (fa * fb > 0) {
            out.mu1 = out.lambda1;
        } else {
            for (int it = 0; it < 200 && b - a > 1e-13 * (1 + std::abs(a)); ++it) {
                double mid = 0.5 * (a + b);
                double fm = secular(mid);
                if (fa * fm <= 0) {
                    b = mid;
                    fb = fm;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            out.mu1 = 0.5 * (a + b);
        }
    }
    return out;
}

} // namespace capac
