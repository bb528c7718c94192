#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "capac/potential.hpp"

namespace capac {

struct GridSpec1D {
    double t_max = 0.0; // 0 -> auto: 12 / min(gamma)
    int n = 4097;       // tabulation nodes on [-t_max, t_max]
};

/// Heteroclinic connection u1'' = W'(u1), u1(0) = 0, u1(+-inf) = +-1,
/// tabulated by monotone inversion of the first integral and continued by
/// exponential asymptotes beyond tail_cut.
struct HeteroclinicProfile {
    std::function<double(double)> u1;
    std::function<double(double)> du1;
    std::function<double(double)> ddu1;
    double c = 0.0;                    // int (u1')^2 dt over the line
    std::pair<double, double> decay;   // (gamma_plus, gamma_minus)
    double tail_cut = 0.0;             // tabulation half-width T_max

    // Tabulated nodes (uniform in t), exposed for invariant checks and CSV.
    std::vector<double> ts, us, dus;
};

/// Solve the profile for the given well. For the quartic the generic
/// first-integral path is cross-checked against tanh(t/sqrt(2)) at build time
/// and the closed form backs the returned evaluators; force_generic returns
/// the tabulated generic path instead (used to measure that agreement).
/// Results are memoized by (well id, grid).
std::shared_ptr<const HeteroclinicProfile> solve_profile(
    const DoubleWell& w, GridSpec1D grid = {}, bool force_generic = false);

/// Fiber projection at layer width epsilon:
///   Pi(f) = (1/(eps*c)) * int f(t) * u1'(t/eps) dt,
/// self-normalizing so that Pi(u_dot) = 1 holds exactly for the implemented
/// quadrature.
class BandProjection {
public:
    BandProjection(std::shared_ptr<const HeteroclinicProfile> profile,
                   double epsilon);

    double epsilon() const { return eps_; }
    double c_eps() const { return c_eps_; }
    const HeteroclinicProfile& profile() const { return *profile_; }

    /// u_dot(t) = u1'(t/eps).
    double u_dot(double t) const;

    double project_pi(const std::function<double(double)>& f) const;
    std::function<double(double)> project_pi_perp(
        const std::function<double(double)>& f) const;

    /// Integration half-width actually used (tails included).
    double band_radius() const { return radius_; }

private:
    std::shared_ptr<const HeteroclinicProfile> profile_;
    double eps_;
    double radius_;
    double norm_; // int u_dot^2 dt over the band, divisor of project_pi
    double c_eps_;
};

/// Spectrum of L0 = -d^2/dt^2 + W''(u1) on [-H, H] with decaying (Dirichlet)
/// ends, second-order finite differences, n_grid intervals.
struct SpectrumL0 {
    double lambda0 = 0.0;  // lowest eigenvalue
    double lambda1 = 0.0;  // second eigenvalue (unconstrained)
    double mu1 = 0.0;      // smallest eigenvalue orthogonal to u1' (deflated)
    double cos_ground = 0.0; // |<eigvec0, u1' samples>| / norms
    std::vector<double> ts;
    std::vector<double> eigvec0;
};

SpectrumL0 spectrum_L0(const DoubleWell& w, double domain_half_width,
                       int n_grid);

} // namespace capac
