#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "capac/errors.hpp"
#include "capac/potential.hpp"
#include "capac/profile1d.hpp"
#include "doctest.h"

using namespace capac;

namespace {
const double kC0 = 2.0 * std::sqrt(2.0) / 3.0;
const double kTanh1 = 0.7615941559557649; // tanh(1)
}

TEST_CASE("closed-form profile values for the quartic") {
    auto w = quartic_well();
    auto p = solve_profile(w);
    CHECK(p->u1(0.0) == 0.0);
    CHECK(p->u1(std::sqrt(2.0)) == doctest::Approx(kTanh1).epsilon(1e-12));
    CHECK(p->u1(-std::sqrt(2.0)) == doctest::Approx(-kTanh1).epsilon(1e-12));
    CHECK(p->du1(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(p->u1(20.0) - 1.0) <= 1e-10);
    CHECK(std::abs(p->u1(-20.0) + 1.0) <= 1e-10);
    CHECK(p->decay.first == doctest::Approx(std::sqrt(2.0)));
    CHECK(p->decay.second == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(p->c - kC0) <= 1e-8);
}

TEST_CASE("generic first-integral path matches the closed form") {
    auto w = quartic_well();
    auto p = solve_profile(w, {}, /*force_generic=*/true);
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        double t = -10.0 + 20.0 * i / 2000.0;
        sup = std::max(sup, std::abs(p->u1(t) - std::tanh(t / std::sqrt(2.0))));
    }
    CHECK(sup <= 1e-8);
    CHECK(std::abs(p->c - kC0) <= 1e-8);

    SUBCASE("memoized: repeated solves share the table") {
        auto q = solve_profile(w, {}, true);
        CHECK(q.get() == p.get());
    }
}

TEST_CASE("profile invariants") {
    auto w = quartic_well();
    for (bool generic : {false, true}) {
        auto p = solve_profile(w, {}, generic);

        // Equipartition at nodes and between them.
        double worst = 0.0;
        for (size_t i = 0; i + 1 < p->ts.size(); ++i) {
            for (double t : {p->ts[i], 0.5 * (p->ts[i] + p->ts[i + 1])}) {
                double du = p->du1(t);
                double r = std::abs(0.5 * du * du - w.eval(p->u1(t)));
                worst = std::max(worst, r);
            }
        }
        CHECK(worst <= 1e-8);

        // Odd symmetry and monotonicity.
        for (int i = 0; i <= 200; ++i) {
            double t = 12.0 * i / 200.0;
            CHECK(std::abs(p->u1(t) + p->u1(-t)) <= 1e-9);
            CHECK(std::abs(p->du1(t) - p->du1(-t)) <= 1e-9);
        }
        for (size_t i = 1; i < p->us.size(); ++i)
            CHECK(p->us[i] > p->us[i - 1]);

        // u1'' tracks W'(u1).
        for (double t : {-3.0, -1.0, 0.5, 2.0, 6.0})
            CHECK(p->ddu1(t) == doctest::Approx(w.d1(p->u1(t))).epsilon(1e-6).scale(1));
    }
}

TEST_CASE("tail decay rate within 2 percent") {
    auto w = quartic_well();
    auto p = solve_profile(w, {}, true);
    // Log-linear fit of 1 - u1 on [5, 10].
    int n = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i <= 50; ++i) {
        double t = 5.0 + 5.0 * i / 50.0;
        double v = 1.0 - p->u1(t);
        REQUIRE(v > 0.0);
        double y = std::log(v);
        ++n;
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(-slope == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("degenerate well rejected by the profile solver") {
    DoubleWell w;
    w.kind = "custom";
    w.eval = [](double s) {
        double q = 1.0 - s * s;
        return q * q * q * q / 8.0;
    };
    w.d1 = [](double s) {
        double q = 1.0 - s * s;
        return -s * q * q * q;
    };
    w.d2 = [](double s) {
        double q = 1.0 - s * s;
        return q * q * (7.0 * s * s - 1.0);
    };
    w.id = 999;
    CHECK_THROWS_AS(solve_profile(w), NumericError);
}

TEST_CASE("band projection identities") {
    auto w = quartic_well();
    auto p = solve_profile(w);
    for (double eps : {0.1, 0.05}) {
        BandProjection bp(p, eps);

        CHECK(bp.project_pi([&](double t) { return bp.u_dot(t); }) == 1.0);
        CHECK(std::abs(bp.project_pi([&](double t) { return t * bp.u_dot(t); })) <= 1e-10);
        CHECK(bp.project_pi([](double) { return 1.0; }) ==
              doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-11));

        auto f = [](double t) { return std::cos(t) + 0.1 * t; };
        auto fperp = bp.project_pi_perp(f);
        CHECK(std::abs(bp.project_pi(fperp)) <= 1e-12);

        // Linearity.
        auto g = [](double t) { return 1.0 / (1.0 + t * t); };
        double lhs = bp.project_pi([&](double t) { return 2.0 * f(t) + 3.0 * g(t); });
        double rhs = 2.0 * bp.project_pi(f) + 3.0 * bp.project_pi(g);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

        // c_eps approaches c as the layer thins (pure rescaling here).
        CHECK(bp.c_eps() == doctest::Approx(p->c).epsilon(1e-10));
    }
    CHECK_THROWS_AS(BandProjection(p, 0.0), ConfigError);
}

TEST_CASE("spectrum of the linearized 1-D operator") {
    auto w = quartic_well();

    SUBCASE("preconditions") {
        CHECK_THROWS_AS(spectrum_L0(w, 3.0, 1024), ConfigError);
        CHECK_THROWS_AS(spectrum_L0(w, 10.0, 256), ConfigError);
    }

    SUBCASE("dense tridiagonal oracle at n = 4096") {
        const double H = 10.0;
        const int n = 4096;
        auto s = spectrum_L0(w, H, n);

        // Same discretization, independent eigensolver.
        auto p = solve_profile(w);
        const int m = n - 1;
        const double h = 2.0 * H / n;
        Eigen::VectorXd diag(m), off(m - 1);
        for (int i = 0; i < m; ++i) {
            double t = -H + (i + 1) * h;
            diag[i] = 2.0 / (h * h) + w.d2(p->u1(t));
        }
        off.setConstant(-1.0 / (h * h));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
        REQUIRE(es.info() == Eigen::Success);
        double d0 = es.eigenvalues()[0];
        double d1 = es.eigenvalues()[1];

        CHECK(s.lambda0 == doctest::Approx(d0).epsilon(1e-9).scale(1));
        CHECK(s.lambda1 == doctest::Approx(d1).epsilon(1e-9).scale(1));
        CHECK(s.mu1 == doctest::Approx(d1).epsilon(1e-8).scale(1));

        // Continuum values: translation mode at 0, first excited at 3/2.
        CHECK(std::abs(s.lambda0) <= 1e-5);
        CHECK(s.mu1 == doctest::Approx(1.5).epsilon(1e-3 / 1.5));
        CHECK(s.cos_ground >= 0.999);
    }

    SUBCASE("random Rayleigh quotients dominate the deflated eigenvalue") {
        const double H = 10.0;
        const int n = 1024;
        auto s = spectrum_L0(w, H, n);
        auto p = solve_profile(w);
        const int m = n - 1;
        const double h = 2.0 * H / n;
        std::vector<double> diag(m), dvec(m);
        for (int i = 0; i < m; ++i) {
            double t = -H + (i + 1) * h;
            diag[i] = 2.0 / (h * h) + w.d2(p->u1(t));
            dvec[i] = p->du1(t);
        }
        double dn = 0.0;
        for (double v : dvec) dn += v * v;
        dn = std::sqrt(dn);
        for (auto& v : dvec) v /= dn;

        std::mt19937 rng(20240817);
        std::normal_distribution<double> gauss;
        const double offd = -1.0 / (h * h);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v(m);
            for (auto& x : v) x = gauss(rng);
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += v[i] * dvec[i];
            for (int i = 0; i < m; ++i) v[i] -= dot * dvec[i];
            double num = 0.0, den = 0.0;
            for (int i = 0; i < m; ++i) {
                double Av = diag[i] * v[i];
                if (i > 0) Av += offd * v[i - 1];
                if (i + 1 < m) Av += offd * v[i + 1];
                num += v[i] * Av;
                den += v[i] * v[i];
            }
            double rayleigh = num / den;
            CHECK(rayleigh >= s.mu1 - 1e-9);
            CHECK(rayleigh >= 1.5 - 1e-3);
        }

        // Near-kernel is one-dimensional: lambda0 isolated, gap to lambda1.
        CHECK(std::abs(s.lambda0) <= 1e-4);
        CHECK(s.lambda1 >= 1.0);
        CHECK(s.cos_ground >= 0.999);
    }
}
