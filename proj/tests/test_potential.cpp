#include <cmath>

#include "capac/errors.hpp"
#include "capac/potential.hpp"
#include "capac/quadrature.hpp"
#include "doctest.h"

using namespace capac;

namespace {
const double kC0 = 2.0 * std::sqrt(2.0) / 3.0; // int_{-1}^{1} (1-s^2)/sqrt(2)
}

TEST_CASE("quartic well point values") {
    auto w = quartic_well();
    auto at1 = eval_well(w, 1.0);
    CHECK(at1.W == 0.0);
    CHECK(at1.dW == 0.0);
    CHECK(at1.ddW == doctest::Approx(2.0));
    auto at0 = eval_well(w, 0.0);
    CHECK(at0.W == doctest::Approx(0.25));
    CHECK(at0.dW == 0.0);
    CHECK(at0.ddW == doctest::Approx(-1.0));
    auto atm1 = eval_well(w, -1.0);
    CHECK(atm1.W == 0.0);
    CHECK(atm1.ddW == doctest::Approx(2.0));
    CHECK_THROWS_AS(eval_well(w, std::nan("")), ConfigError);
}

TEST_CASE("quartic constants against closed forms") {
    auto w = quartic_well();
    auto k = derive_constants(w, 1e-12);
    CHECK(std::abs(k.c0 - kC0) <= 1e-10);
    CHECK(k.c_star == doctest::Approx(k.c0));
    CHECK(k.gamma_plus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(k.gamma_minus == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("scaled well doubles c0") {
    // 4W has sqrt(2*4W) = 2 sqrt(2W).
    auto q = quartic_well();
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 2400; ++i) {
        double s = -1.5 + 3.0 * i / 2400.0;
        samples.push_back({s, 4.0 * q.eval(s)});
    }
    auto w = table_well(samples);
    auto k = derive_constants(w, 1e-10);
    CHECK(k.c0 == doctest::Approx(2.0 * kC0).epsilon(2e-6));
    CHECK(k.gamma_plus == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("well positivity on a fine grid") {
    auto w = quartic_well();
    for (int i = 0; i <= 4000; ++i) {
        double s = -2.0 + 4.0 * i / 4000.0;
        double v = w.eval(s);
        if (std::min(std::abs(s - 1), std::abs(s + 1)) < 1e-9)
            CHECK(std::abs(v) <= 1e-15);
        else
            CHECK(v > 0.0);
    }
}

TEST_CASE("table well validation rejects bad input") {
    // Wells not at +-1.
    std::vector<std::pair<double, double>> bad;
    for (int i = 0; i <= 100; ++i) {
        double s = -1.5 + 3.0 * i / 100.0;
        double q = (s - 0.9) * (s + 0.9);
        bad.push_back({s, q * q});
    }
    CHECK_THROWS_AS(table_well(bad), ConfigError);
    // Negative dip.
    auto qw = quartic_well();
    std::vector<std::pair<double, double>> neg;
    for (int i = 0; i <= 300; ++i) {
        double s = -1.5 + 3.0 * i / 300.0;
        neg.push_back({s, qw.eval(s) - 0.02});
    }
    CHECK_THROWS_AS(table_well(neg), ConfigError);
}

TEST_CASE("wetting density basics and the contact-angle identity") {
    auto w = quartic_well();
    auto k = derive_constants(w, 1e-12);

    SUBCASE("theta = pi/2 kills the wetting term") {
        auto wet = build_wetting(w, M_PI / 2.0);
        for (double s : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
            CHECK(std::abs(wet.sigma(s)) <= 1e-15);
            CHECK(std::abs(wet.sigma1(s)) <= 1e-15);
        }
    }

    SUBCASE("sigma jump at pi/3") {
        auto wet = build_wetting(w, M_PI / 3.0);
        double jump = wet.sigma(1.0) - wet.sigma(-1.0);
        CHECK(jump == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-10));
        CHECK(std::abs(wet.sigma(-1.0)) <= 1e-15);
    }

    SUBCASE("arccos identity to 1e-10 across angles") {
        for (double theta : {M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2}) {
            auto wet = build_wetting(w, theta);
            double jump = wet.sigma(1.0) - wet.sigma(-1.0);
            double recovered = std::acos(std::clamp(jump / k.c0, -1.0, 1.0));
            CHECK(std::abs(recovered - theta) <= 1e-10);
        }
    }

    SUBCASE("invalid angle rejected") {
        CHECK_THROWS_AS(build_wetting(w, 2.0), ConfigError);
        CHECK_THROWS_AS(build_wetting(w, 0.0), ConfigError);
        CHECK_THROWS_AS(build_wetting(w, -0.3), ConfigError);
    }
}

TEST_CASE("sigma monotone with total variation cos(theta)*c0") {
    auto w = quartic_well();
    auto wet = build_wetting(w, M_PI / 4.0);
    double prev = wet.sigma(-1.0);
    double tv = 0.0;
    for (int i = 1; i <= 500; ++i) {
        double s = -1.0 + 2.0 * i / 500.0;
        double cur = wet.sigma(s);
        CHECK(cur >= prev - 1e-14);
        tv += std::abs(cur - prev);
        prev = cur;
    }
    CHECK(tv == doctest::Approx(std::cos(M_PI / 4.0) * kC0).epsilon(1e-9));
}

TEST_CASE("finite-difference consistency of derivative chains") {
    auto w = quartic_well();
    auto wet = build_wetting(w, M_PI / 3.0);
    // Probe points away from the sqrt corner at the wells.
    const double pts[] = {-0.85, -0.4, 0.0, 0.35, 0.8};
    for (double h : {1e-3, 1e-4}) {
        for (double s : pts) {
            double fd1 = (w.eval(s + h) - w.eval(s - h)) / (2 * h);
            CHECK(std::abs(fd1 - w.d1(s)) <= 5.0 * h * h);
            double fd2 = (w.d1(s + h) - w.d1(s - h)) / (2 * h);
            CHECK(std::abs(fd2 - w.d2(s)) <= 5.0 * h * h);
            double fs1 = (wet.sigma(s + h) - wet.sigma(s - h)) / (2 * h);
            CHECK(std::abs(fs1 - wet.sigma1(s)) <= 5.0 * h * h);
            double fs2 = (wet.sigma1(s + h) - wet.sigma1(s - h)) / (2 * h);
            CHECK(std::abs(fs2 - wet.sigma2(s)) <= 5.0 * h * h);
        }
    }
}

TEST_CASE("sigma'' one-sided limits at the wells (quartic)") {
    auto w = quartic_well();
    double theta = M_PI / 3.0;
    auto wet = build_wetting(w, theta);
    double mag = std::sqrt(2.0) * std::cos(theta);
    CHECK(wet.sigma2(1.0) == doctest::Approx(-mag).epsilon(1e-6));
    CHECK(wet.sigma2(-1.0) == doctest::Approx(mag).epsilon(1e-6));
    // Interior formula -sqrt(2) * s * cos(theta).
    CHECK(wet.sigma2(0.5) == doctest::Approx(-std::sqrt(2.0) * 0.5 * std::cos(theta)).epsilon(1e-12));
}

TEST_CASE("W'/sqrt(W) Cauchy behavior near the wells") {
    auto w = quartic_well();
    for (double side : {-1.0, 1.0}) {
        double prev = 0.0;
        for (int kk = 3; kk <= 8; ++kk) {
            double s = side * (1.0 - std::pow(10.0, -kk));
            double r = w.d1(s) / std::sqrt(w.eval(s));
            CHECK(std::isfinite(r));
            if (kk > 3) CHECK(std::abs(r - prev) < 0.05);
            prev = r;
        }
        // Limit is -2*side for the quartic.
        CHECK(prev == doctest::Approx(-2.0 * side).epsilon(1e-6));
    }
}

TEST_CASE("adaptive quadrature sanity") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    auto sq = integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0,
                        1e-10, 1e-14, 20000);
    CHECK(sq.value == doctest::Approx(2.0).epsilon(1e-5));
}
