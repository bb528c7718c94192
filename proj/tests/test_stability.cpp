#include <cmath>
#include <random>

#include "capac/errors.hpp"
#include "capac/geometry.hpp"
#include "capac/stability.hpp"
#include "doctest.h"

using namespace capac;

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0.0, mb = 0.0;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (int i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

} // namespace

TEST_CASE("jacobi coefficients for the shipped curves") {
    auto sq = PlanarDomain::rectangle(1.0, 1.0);
    auto seg = find_capillary_curve(sq, M_PI / 2.0, {"segment", 0.4});
    auto jp = assemble_jacobi(seg, sq, 256);
    CHECK(jp.length == doctest::Approx(1.0));
    CHECK(jp.potential_coeff(0.3) == 0.0);
    CHECK(jp.robin0 == 0.0); // flat walls, straight curve: Neumann ends
    CHECK(jp.robinL == 0.0);

    auto disk = PlanarDomain::unit_disk();
    auto diam = find_capillary_curve(disk, M_PI / 2.0, {"chord", 0.0});
    auto jd = assemble_jacobi(diam, disk, 256);
    CHECK(jd.length == doctest::Approx(2.0));
    CHECK(jd.potential_coeff(1.0) == 0.0);
    CHECK(jd.robin0 == doctest::Approx(1.0).epsilon(1e-12)); // circle curvature
    CHECK(jd.robinL == doctest::Approx(1.0).epsilon(1e-12));

    auto chord = find_capillary_curve(disk, M_PI / 3.0, {"chord", 0.0});
    auto jc = assemble_jacobi(chord, disk, 256);
    CHECK(jc.robin0 == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

    auto strip = PlanarDomain::strip_rectangle(3.0, 1.0);
    auto arc = find_capillary_curve(strip, M_PI / 3.0, {"arc", 1.2});
    auto ja = assemble_jacobi(arc, strip, 256);
    CHECK(ja.potential_coeff(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    // Flat walls and kappa = -1: r = cos(pi/3) * (-1) / sin(pi/3).
    CHECK(ja.robin0 == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(ja.robinL == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(assemble_jacobi(seg, sq, 16), ConfigError);
    CHECK_THROWS_AS(assemble_jacobi(arc, sq, 256), ConfigError);
    CHECK_THROWS_AS(discretize_jacobi(JacobiProblem{}, 64), ConfigError);
}

TEST_CASE("weighted discretization is symmetric and kills exact fields") {
    auto strip = PlanarDomain::strip_rectangle(3.0, 1.0);
    auto arc = find_capillary_curve(strip, M_PI / 3.0, {"arc", 1.2});
    auto jp = assemble_jacobi(arc, strip, 256);
    auto m = discretize_jacobi(jp, 256);

    // <Av, w> = <v, Aw> (the bordered form adds a symmetric rim).
    std::mt19937 gen(20240819);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> v(m.n), w(m.n);
        for (int i = 0; i < m.n; ++i) {
            v[i] = g(gen);
            w[i] = g(gen);
        }
        auto Av = apply_weighted(m, v);
        auto Aw = apply_weighted(m, w);
        double d1 = 0.0, d2 = 0.0;
        for (int i = 0; i < m.n; ++i) {
            d1 += Av[i] * w[i];
            d2 += v[i] * Aw[i];
        }
        CHECK(std::abs(d1 - d2) <= 1e-10 * std::max(1.0, std::abs(d1)));
    }
    std::vector<double> zero(m.n, 0.0);
    CHECK(inf_norm(apply_weighted(m, zero)) == 0.0);

    // The ambient translation field omega = cos(phi(s)) solves the kernel
    // equation and the Robin closure; the discrete residual is O(h^2) at the
    // ends and O(h^3) inside.
    std::vector<double> omega(m.n);
    for (int i = 0; i < m.n; ++i) omega[i] = std::cos(m.s[i] - M_PI / 6.0);
    CHECK(inf_norm(apply_weighted(m, omega)) <= 5e-6);

    // Flipping the Robin sign (the other reading of the coefficient) breaks
    // the translation field by an O(1) boundary residual.
    JacobiProblem flipped = jp;
    flipped.robin0 = -jp.robin0;
    flipped.robinL = -jp.robinL;
    auto mf = discretize_jacobi(flipped, 256);
    CHECK(inf_norm(apply_weighted(mf, omega)) > 1e-2);

    // The disk rotation field is affine, so the diameter problem kills it
    // exactly at every resolution.
    auto disk = PlanarDomain::unit_disk();
    auto diam = find_capillary_curve(disk, M_PI / 2.0, {"chord", 0.0});
    auto jd = assemble_jacobi(diam, disk, 128);
    auto md = discretize_jacobi(jd, 128);
    std::vector<double> rot(md.n);
    for (int i = 0; i < md.n; ++i) rot[i] = 1.0 - md.s[i];
    CHECK(inf_norm(apply_weighted(md, rot)) <= 1e-11);
}

TEST_CASE("square segment: nondegenerate with Neumann spectrum") {
    auto sq = PlanarDomain::rectangle(1.0, 1.0);
    auto seg = find_capillary_curve(sq, M_PI / 2.0, {"segment", 0.4});
    auto jp = assemble_jacobi(seg, sq, 256);
    auto rep = check_nondegeneracy(jp);
    CHECK(rep.verdict == "nondegenerate");
    CHECK(rep.ladder == std::vector<int>{64, 128, 256});
    // The constraint direction couples to the constant mode with unit
    // strength (|u|^2 = L = 1), so sigma_min is exactly 1 at every level.
    for (double s : rep.sigma_ladder) CHECK(std::abs(s - 1.0) <= 1e-10);
    REQUIRE(rep.spectrum_head.size() == 5);
    CHECK(std::abs(rep.spectrum_head[0] - M_PI * M_PI) <= 1e-3);
    CHECK(std::abs(rep.spectrum_head[0] - M_PI * M_PI) <=
          0.01 * M_PI * M_PI);
    CHECK(std::abs(rep.spectrum_head[1] - 4.0 * M_PI * M_PI) <=
          1e-3 * 4.0 * M_PI * M_PI);
    CHECK(rep.kernel_dim == 0);
    CHECK(rep.kernel_element.empty());

    // Bitwise reproducibility of the report.
    auto rep2 = check_nondegeneracy(jp);
    CHECK(rep2.smallest_singular_value == rep.smallest_singular_value);
    CHECK(rep2.spectrum_head == rep.spectrum_head);
}

TEST_CASE("disk diameter: degenerate with the rotation kernel") {
    auto disk = PlanarDomain::unit_disk();
    auto diam = find_capillary_curve(disk, M_PI / 2.0, {"chord", 0.0});
    auto jp = assemble_jacobi(diam, disk, 256);
    auto rep = check_nondegeneracy(jp);
    CHECK(rep.verdict == "degenerate");
    CHECK(rep.smallest_singular_value <= 1e-10);
    CHECK(rep.kernel_dim == 1);
    REQUIRE(rep.kernel_element.size() == 256);
    std::vector<double> target(rep.kernel_s.size());
    for (size_t i = 0; i < target.size(); ++i) target[i] = 1.0 - rep.kernel_s[i];
    CHECK(std::abs(pearson(rep.kernel_element, target)) >= 0.999999);
    CHECK(std::abs(rep.kernel_constant) <= 1e-9);
    CHECK(std::abs(rep.spectrum_head[0]) <= 1e-10);
    CHECK(rep.spectrum_head[1] > 0.3);
}

TEST_CASE("disk chord at pi/3: rotation still a constrained kernel") {
    auto disk = PlanarDomain::unit_disk();
    auto chord = find_capillary_curve(disk, M_PI / 3.0, {"chord", 0.0});
    auto rep = check_nondegeneracy(assemble_jacobi(chord, disk, 256));
    CHECK(rep.verdict == "degenerate");
    CHECK(rep.smallest_singular_value <= 1e-10);
    std::vector<double> target(rep.kernel_s.size());
    for (size_t i = 0; i < target.size(); ++i)
        target[i] = std::sqrt(3.0) / 2.0 - rep.kernel_s[i];
    CHECK(std::abs(pearson(rep.kernel_element, target)) >= 0.999999);
}

TEST_CASE("strip arc: volume-constrained nondegenerate") {
    auto strip = PlanarDomain::strip_rectangle(3.0, 1.0);
    auto arc = find_capillary_curve(strip, M_PI / 3.0, {"arc", 1.2});
    auto rep = check_nondegeneracy(assemble_jacobi(arc, strip, 256));
    CHECK(rep.verdict == "nondegenerate");
    CHECK(rep.smallest_singular_value > 0.05);
    CHECK(rep.kernel_dim == 0);
}

TEST_CASE("robin perturbation moves the diameter off its kernel") {
    // Hand-built: -omega'' on [0,2] with d_tau omega = r omega. r = 1 is the
    // diameter configuration (degenerate); nudging r re-opens injectivity.
    auto make = [](double r) {
        JacobiProblem jp;
        jp.length = 2.0;
        jp.theta = M_PI / 2.0;
        jp.potential_coeff = [](double) { return 0.0; };
        jp.robin0 = jp.robinL = r;
        jp.n_nodes = 256;
        return jp;
    };
    CHECK(check_nondegeneracy(make(1.0)).verdict == "degenerate");
    CHECK(check_nondegeneracy(make(1.0 + 1e-3)).verdict == "nondegenerate");
    CHECK(check_nondegeneracy(make(1.0 - 1e-3)).verdict == "nondegenerate");
}

TEST_CASE("literal zeroth-order sign shifts the arc spectrum by 2q") {
    auto strip = PlanarDomain::strip_rectangle(3.0, 1.0);
    auto arc = find_capillary_curve(strip, M_PI / 3.0, {"arc", 1.2});
    auto jp = assemble_jacobi(arc, strip, 256);
    auto std_head = check_nondegeneracy(jp).spectrum_head;
    jp.literal_zeroth_sign = true;
    auto lit_head = check_nondegeneracy(jp).spectrum_head;
    for (size_t k = 0; k < std_head.size(); ++k)
        CHECK(std::abs(lit_head[k] - std_head[k] - 2.0) <= 5e-8);
}
