#include "capac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "capac/errors.hpp"
#include "capac/smoothstep.hpp"

namespace capac {

// ---------------------------------------------------------------------------
// PlanarDomain

PlanarDomain PlanarDomain::rectangle(double width, double height) {
    if (!(width > 0) || !(height > 0))
        throw ConfigError("rectangle needs positive width and height");
    PlanarDomain d;
    d.kind_ = DomainKind::Rectangle;
    d.w_ = width;
    d.h_ = height;
    return d;
}

PlanarDomain PlanarDomain::unit_disk() {
    PlanarDomain d;
    d.kind_ = DomainKind::UnitDisk;
    d.w_ = d.h_ = 2.0;
    return d;
}

PlanarDomain PlanarDomain::strip_rectangle(double width, double height) {
    PlanarDomain d = rectangle(width, height);
    d.kind_ = DomainKind::StripRectangle;
    return d;
}

std::string PlanarDomain::kind_name() const {
    switch (kind_) {
        case DomainKind::Rectangle: return "rectangle";
        case DomainKind::UnitDisk: return "unit_disk";
        case DomainKind::StripRectangle: return "strip_rectangle";
    }
    return "?";
}

double PlanarDomain::area() const {
    return kind_ == DomainKind::UnitDisk ? M_PI : w_ * h_;
}

double PlanarDomain::dist_boundary(Vec2 p) const {
    if (kind_ == DomainKind::UnitDisk) return 1.0 - norm(p);
    return std::min(std::min(p.y, h_ - p.y), std::min(p.x, w_ - p.x));
}

BoundaryPoint PlanarDomain::nearest_boundary(Vec2 p) const {
    if (kind_ == DomainKind::UnitDisk) {
        double r = norm(p);
        if (r < 1e-12) return {{1.0, 0.0}, {1.0, 0.0}, 1.0, -1};
        Vec2 u = {p.x / r, p.y / r};
        return {u, u, 1.0, -1};
    }
    double d[4] = {p.y, w_ - p.x, h_ - p.y, p.x};
    int wall = 0;
    for (int i = 1; i < 4; ++i)
        if (d[i] < d[wall]) wall = i;
    double cx = std::clamp(p.x, 0.0, w_), cy = std::clamp(p.y, 0.0, h_);
    switch (wall) {
        case 0: return {{cx, 0.0}, {0.0, -1.0}, 0.0, 0};
        case 1: return {{w_, cy}, {1.0, 0.0}, 0.0, 1};
        case 2: return {{cx, h_}, {0.0, 1.0}, 0.0, 2};
        default: return {{0.0, cy}, {-1.0, 0.0}, 0.0, 3};
    }
}

double PlanarDomain::corner_distance(Vec2 p) const {
    if (kind_ == DomainKind::UnitDisk)
        return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (double cx : {0.0, w_})
        for (double cy : {0.0, h_})
            best = std::min(best, norm(p - Vec2{cx, cy}));
    return best;
}

double PlanarDomain::boundary_length() const {
    return kind_ == DomainKind::UnitDisk ? 2.0 * M_PI : 2.0 * (w_ + h_);
}

BoundaryPoint PlanarDomain::boundary_at(double s) const {
    if (kind_ == DomainKind::UnitDisk) {
        Vec2 u = {std::cos(s), std::sin(s)};
        return {u, u, 1.0, -1};
    }
    double per = boundary_length();
    s = std::fmod(std::fmod(s, per) + per, per);
    if (s < w_) return {{s, 0.0}, {0.0, -1.0}, 0.0, 0};
    s -= w_;
    if (s < h_) return {{w_, s}, {1.0, 0.0}, 0.0, 1};
    s -= h_;
    if (s < w_) return {{w_ - s, h_}, {0.0, 1.0}, 0.0, 2};
    s -= w_;
    return {{0.0, h_ - s}, {-1.0, 0.0}, 0.0, 3};
}

Vec2 PlanarDomain::bbox_lo() const {
    return kind_ == DomainKind::UnitDisk ? Vec2{-1.0, -1.0} : Vec2{0.0, 0.0};
}

Vec2 PlanarDomain::bbox_hi() const {
    return kind_ == DomainKind::UnitDisk ? Vec2{1.0, 1.0} : Vec2{w_, h_};
}

// ---------------------------------------------------------------------------
// CapillaryCurve

Vec2 CapillaryCurve::point(double s) const {
    if (family_ == "segment") return {x0_, s};
    if (family_ == "chord") {
        double xr = std::sqrt(1.0 - chord_d_ * chord_d_);
        return {xr - s, chord_d_};
    }
    double phi = -phi_star_ + s / radius_;
    return center_ + radius_ * Vec2{std::cos(phi), std::sin(phi)};
}

Vec2 CapillaryCurve::nu(double s) const {
    if (family_ == "segment") return {1.0, 0.0};
    if (family_ == "chord") return {0.0, 1.0};
    double phi = -phi_star_ + s / radius_;
    return {std::cos(phi), std::sin(phi)};
}

Vec2 CapillaryCurve::tangent(double s) const { return rot90(nu(s)); }

double CapillaryCurve::side(Vec2 p) const {
    if (family_ == "segment") return p.x - x0_;
    if (family_ == "chord") return p.y - chord_d_;
    return norm(p - center_) - radius_;
}

Vec2 CapillaryCurve::side_gradient(Vec2 p) const {
    if (family_ == "segment") return {1.0, 0.0};
    if (family_ == "chord") return {0.0, 1.0};
    return normalized(p - center_);
}

CapillaryCurve::Projection CapillaryCurve::project(Vec2 p) const {
    if (family_ == "segment") return {p.y, p.x - x0_};
    if (family_ == "chord") {
        double xr = std::sqrt(1.0 - chord_d_ * chord_d_);
        return {xr - p.x, p.y - chord_d_};
    }
    Vec2 r = p - center_;
    double phi = std::atan2(r.y, r.x);
    return {radius_ * (phi + phi_star_), norm(r) - radius_};
}

EndFrame CapillaryCurve::end(int which) const {
    double se = which == 0 ? 0.0 : length_;
    EndFrame f;
    f.s = se;
    f.p = point(se);
    f.nu_sigma = nu(se);
    f.tau_sigma_out = which == 0 ? -1.0 * tangent(0.0) : tangent(length_);
    auto nb = domain_.nearest_boundary(f.p);
    f.nu_dM = nb.nu;
    f.kappa_dM = nb.kappa;
    Vec2 t = rot90(nb.nu);
    f.tau_dM = dot(t, f.nu_sigma) >= 0.0 ? t : -1.0 * t;
    return f;
}

namespace {

void verify_curve(const CapillaryCurve& c) {
    const PlanarDomain& dom = c.domain();
    const double ct = std::cos(c.theta());
    for (int e : {0, 1}) {
        EndFrame f = c.end(e);
        if (std::abs(dom.dist_boundary(f.p)) > 1e-10)
            throw GeometryError("capillary curve endpoint misses the boundary");
        if (std::abs(dot(f.nu_sigma, f.nu_dM) - ct) > 1e-8)
            throw GeometryError("capillary curve violates the contact-angle identity");
        if (std::abs(dot(-1.0 * f.tau_sigma_out, f.tau_dM) - ct) > 1e-8)
            throw GeometryError("endpoint frame wedge angle mismatch");
    }
    // Constant curvature, <gamma'', nu> convention, by finite differences.
    const double h = 1e-4;
    for (int i = 1; i <= 5; ++i) {
        double s = c.length() * i / 6.0;
        Vec2 dd = (1.0 / (h * h)) *
                  (c.point(s + h) - 2.0 * c.point(s) + c.point(s - h));
        if (std::abs(dot(dd, c.nu(s)) - c.kappa()) > 1e-6)
            throw GeometryError("curve curvature drifts from its constant");
    }
    // Interior containment away from the ends.
    for (int i = 1; i <= 40; ++i) {
        double s = c.length() * i / 41.0;
        if (!(dom.dist_boundary(c.point(s)) > 0.0))
            throw GeometryError("capillary curve leaves the domain interior");
    }
    if (std::abs(c.area_plus() + c.area_minus() - dom.area()) > 1e-8)
        throw GeometryError("area split does not add up to |M|");
}

} // namespace

CapillaryCurve find_capillary_curve(const PlanarDomain& dom, double theta,
                                    const CurveSelector& sel) {
    if (!(theta > 0.0) || theta > M_PI / 2.0 + 1e-15)
        throw ConfigError("contact angle must lie in (0, pi/2]");
    CapillaryCurve c;
    c.domain_ = dom;
    c.family_ = sel.family;
    c.theta_ = theta;
    const double margin = 0.02;

    if (sel.family == "segment") {
        if (dom.kind() == DomainKind::UnitDisk)
            throw GeometryError("segment family needs a rectangular domain");
        if (std::abs(theta - M_PI / 2.0) > 1e-9)
            throw GeometryError(
                "a straight segment meets straight walls only at theta = pi/2");
        double x0 = sel.position;
        if (x0 < margin || x0 > dom.width() - margin)
            throw GeometryError("segment offset outside the domain");
        c.x0_ = x0;
        c.kappa_ = 0.0;
        c.length_ = dom.height();
        c.area_plus_ = (dom.width() - x0) * dom.height();
        c.area_minus_ = x0 * dom.height();
    } else if (sel.family == "chord") {
        if (dom.kind() != DomainKind::UnitDisk)
            throw GeometryError("chord family needs the unit disk");
        if (sel.position != 0.0)
            throw GeometryError("chord rotation is not supported");
        double d = std::cos(theta);
        c.chord_d_ = d;
        c.kappa_ = 0.0;
        c.length_ = 2.0 * std::sqrt(1.0 - d * d);
        c.area_plus_ = std::acos(d) - d * std::sqrt(1.0 - d * d);
        c.area_minus_ = M_PI - c.area_plus_;
    } else if (sel.family == "arc") {
        if (dom.kind() != DomainKind::StripRectangle)
            throw GeometryError("arc family needs the strip domain");
        if (theta > M_PI / 2.0 - 1e-9)
            throw GeometryError("theta = pi/2 in the strip is the segment family");
        double R = dom.height() / (2.0 * std::cos(theta));
        double phi_star = M_PI / 2.0 - theta;
        double xc = sel.position;
        double xe = xc + R * std::sin(theta);
        if (xc + R > dom.width() - margin || xe < margin)
            throw GeometryError("arc does not fit inside the strip");
        c.center_ = {xc, dom.height() / 2.0};
        c.radius_ = R;
        c.phi_star_ = phi_star;
        c.kappa_ = -1.0 / R;
        c.length_ = 2.0 * R * phi_star;
        double seg = R * R * (phi_star + std::sin(phi_star) * std::cos(phi_star));
        c.area_plus_ = (dom.width() - xc) * dom.height() - seg;
        c.area_minus_ = dom.area() - c.area_plus_;
    } else {
        throw ConfigError("unknown curve family: " + sel.family);
    }

    verify_curve(c);
    return c;
}

// ---------------------------------------------------------------------------
// The chart vector field

namespace {

struct XField {
    const CapillaryCurve* curve;
    const PlanarDomain* dom;
    double eps0;

    Vec2 operator()(Vec2 p) const {
        Vec2 D = curve->side_gradient(p);
        double d = dom->dist_boundary(p);
        double eta = 1.0 - smoothstep(eps0 / 2.0, eps0, d);
        if (eta == 0.0) return D;
        auto nb = dom->nearest_boundary(p);
        double cc = eta * dot(D, nb.nu);
        double den2 = 1.0 - (2.0 - eta * eta) * cc * cc;
        if (den2 < 0.05)
            throw GeometryError(
                "chart field degenerates near the boundary; shrink the band");
        return (1.0 / std::sqrt(den2)) * (D - (cc * eta) * nb.nu);
    }
};

Vec2 rk4_step(const XField& f, Vec2 p, double h) {
    Vec2 k1 = f(p);
    Vec2 k2 = f(p + (h / 2.0) * k1);
    Vec2 k3 = f(p + (h / 2.0) * k2);
    Vec2 k4 = f(p + h * k3);
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Advance p by signed flow time dz with local Richardson control; budget is
// the permitted error per unit length.
Vec2 advance(const XField& f, Vec2 p, double dz, double budget) {
    double remaining = dz;
    double h = dz;
    int guard = 0;
    while (std::abs(remaining) > 1e-15) {
        if (++guard > 200000)
            throw NumericError("chart flow step size underflow");
        if (std::abs(h) > std::abs(remaining)) h = remaining;
        Vec2 full = rk4_step(f, p, h);
        Vec2 mid = rk4_step(f, p, h / 2.0);
        Vec2 half = rk4_step(f, mid, h / 2.0);
        double err = norm(full - half);
        double tol = budget * std::abs(h) + 1e-16;
        if (err > tol) {
            h /= 2.0;
            continue;
        }
        p = half + (1.0 / 15.0) * (half - full);
        remaining -= h;
        if (err < tol / 64.0 && std::abs(h) < std::abs(remaining)) h *= 2.0;
    }
    return p;
}

// Uniform Catmull-Rom patch interpolation with clamped edge replication.
struct Bicubic {
    int nz, ns;
    double z0, hz, s0, hs;
    const std::vector<double>* fx;
    const std::vector<double>* fy;

    static void weights(double u, double w[4], double dw[4]) {
        w[0] = 0.5 * (-u + 2.0 * u * u - u * u * u);
        w[1] = 0.5 * (2.0 - 5.0 * u * u + 3.0 * u * u * u);
        w[2] = 0.5 * (u + 4.0 * u * u - 3.0 * u * u * u);
        w[3] = 0.5 * (-u * u + u * u * u);
        dw[0] = 0.5 * (-1.0 + 4.0 * u - 3.0 * u * u);
        dw[1] = 0.5 * (-10.0 * u + 9.0 * u * u);
        dw[2] = 0.5 * (1.0 + 8.0 * u - 9.0 * u * u);
        dw[3] = 0.5 * (-2.0 * u + 3.0 * u * u);
    }

    // value, d/dz, d/ds of one scalar grid
    void eval(const std::vector<double>& g, double z, double s, double* v,
              double* dz, double* ds) const {
        double uz = (z - z0) / hz, us = (s - s0) / hs;
        int iz = std::clamp(static_cast<int>(std::floor(uz)), 0, nz - 2);
        int is = std::clamp(static_cast<int>(std::floor(us)), 0, ns - 2);
        uz -= iz;
        us -= is;
        double wz[4], dwz[4], ws[4], dws[4];
        weights(uz, wz, dwz);
        weights(us, ws, dws);
        // Out-of-range stencil nodes are cubic ghost extrapolations; plain
        // clamping would halve derivatives on the lattice edges.
        auto cell = [&](int jz, int js) {
            auto at_s = [&](int j) {
                if (js >= 0 && js < ns) return g[j * ns + js];
                if (js < 0)
                    return 3.0 * g[j * ns] - 3.0 * g[j * ns + 1] + g[j * ns + 2];
                return 3.0 * g[j * ns + ns - 1] - 3.0 * g[j * ns + ns - 2] +
                       g[j * ns + ns - 3];
            };
            if (jz >= 0 && jz < nz) return at_s(jz);
            if (jz < 0) return 3.0 * at_s(0) - 3.0 * at_s(1) + at_s(2);
            return 3.0 * at_s(nz - 1) - 3.0 * at_s(nz - 2) + at_s(nz - 3);
        };
        double row[4], drow[4];
        for (int a = 0; a < 4; ++a) {
            double acc = 0.0, dacc = 0.0;
            for (int b = 0; b < 4; ++b) {
                double f = cell(iz - 1 + a, is - 1 + b);
                acc += ws[b] * f;
                dacc += dws[b] * f;
            }
            row[a] = acc;
            drow[a] = dacc;
        }
        double val = 0.0, dvz = 0.0, dvs = 0.0;
        for (int a = 0; a < 4; ++a) {
            val += wz[a] * row[a];
            dvz += dwz[a] * row[a];
            dvs += wz[a] * drow[a];
        }
        if (v) *v = val;
        if (dz) *dz = dvz / hz;
        if (ds) *ds = dvs / hs;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// FermiChart

bool FermiChart::fiber_untwisted(double s) const {
    const auto& dom = curve_->domain();
    Vec2 g = curve_->point(s), n = curve_->nu(s);
    return dom.dist_boundary(g) >= eps0_ &&
           dom.dist_boundary(g + tau0_ * n) >= eps0_ &&
           dom.dist_boundary(g - tau0_ * n) >= eps0_;
}

Vec2 FermiChart::lattice_point(int iz, int is) const {
    return {lx_[iz * ns_ + is], ly_[iz * ns_ + is]};
}

Vec2 FermiChart::Y_lattice(double z, double s) const {
    Bicubic bc{nz_, ns_, -tau0_, hz_, 0.0, hs_, &lx_, &ly_};
    double x, y;
    bc.eval(lx_, z, s, &x, nullptr, nullptr);
    bc.eval(ly_, z, s, &y, nullptr, nullptr);
    return {x, y};
}

namespace {
void check_band(double z, double s, double tau0, double L) {
    if (std::abs(z) > tau0 + 1e-12)
        throw ConfigError("Fermi coordinate z outside the band");
    if (s < -1e-12 || s > L + 1e-12)
        throw ConfigError("Fermi coordinate s outside the curve range");
}
} // namespace

Vec2 FermiChart::Y(double z, double s) const {
    check_band(z, s, tau0_, curve_->length());
    if (fiber_untwisted(s)) return curve_->normal_exp(z, s);
    return Y_lattice(z, s);
}

Vec2 FermiChart::dYdz(double z, double s) const {
    check_band(z, s, tau0_, curve_->length());
    if (fiber_untwisted(s)) return curve_->nu(s);
    Bicubic bc{nz_, ns_, -tau0_, hz_, 0.0, hs_, &lx_, &ly_};
    double dx, dy;
    bc.eval(lx_, z, s, nullptr, &dx, nullptr);
    bc.eval(ly_, z, s, nullptr, &dy, nullptr);
    return {dx, dy};
}

Vec2 FermiChart::dYds(double z, double s) const {
    check_band(z, s, tau0_, curve_->length());
    if (fiber_untwisted(s)) {
        // d/ds of gamma(s) + z nu(s) with nu' = -kappa tangent.
        return (1.0 - z * curve_->kappa()) * curve_->tangent(s);
    }
    Bicubic bc{nz_, ns_, -tau0_, hz_, 0.0, hs_, &lx_, &ly_};
    double dx, dy;
    bc.eval(lx_, z, s, nullptr, nullptr, &dx);
    bc.eval(ly_, z, s, nullptr, nullptr, &dy);
    return {dx, dy};
}

double FermiChart::jacobian(double z, double s) const {
    return cross(dYdz(z, s), dYds(z, s));
}

Vec2 FermiChart::X_at(Vec2 p) const {
    XField f{curve_.get(), &curve_->domain(), eps0_};
    return f(p);
}

std::optional<std::array<double, 2>> FermiChart::invert(Vec2 p) const {
    const double L = curve_->length();
    // Closed form wherever the fiber provably stays outside the collar.
    auto pr = curve_->project(p);
    if (pr.s >= -1e-12 && pr.s <= L + 1e-12 && std::abs(pr.z) <= tau0_ + 1e-12) {
        double sc = std::clamp(pr.s, 0.0, L);
        const auto& dom = curve_->domain();
        if (dom.dist_boundary(p) >= eps0_ &&
            dom.dist_boundary(curve_->point(sc)) >= eps0_ && fiber_untwisted(sc))
            return std::array<double, 2>{std::clamp(pr.z, -tau0_, tau0_), sc};
    }
    return invert_newton(p);
}

std::optional<std::array<double, 2>> FermiChart::invert_newton(Vec2 p) const {
    const double L = curve_->length();
    double pad = 0.05 * std::max(bhi_.x - blo_.x, bhi_.y - blo_.y);
    if (p.x < blo_.x - pad || p.x > bhi_.x + pad || p.y < blo_.y - pad ||
        p.y > bhi_.y + pad)
        return std::nullopt;
    int bx = std::clamp(
        static_cast<int>((p.x - blo_.x) / (bhi_.x - blo_.x) * nbx_), 0, nbx_ - 1);
    int by = std::clamp(
        static_cast<int>((p.y - blo_.y) / (bhi_.y - blo_.y) * nby_), 0, nby_ - 1);

    auto try_from = [&](int seed) -> std::optional<std::array<double, 2>> {
        if (seed < 0) return std::nullopt;
        double z = z_node(seed / ns_), s = s_node(seed % ns_);
        for (int it = 0; it < 40; ++it) {
            double zq = std::clamp(z, -tau0_, tau0_);
            double sq = std::clamp(s, 0.0, L);
            Vec2 F = Y(zq, sq) - p;
            Vec2 gz = dYdz(zq, sq), gs = dYds(zq, sq);
            double det = cross(gz, gs);
            if (std::abs(det) < 1e-14) return std::nullopt;
            double dz = (-F.x * gs.y + F.y * gs.x) / det;
            double ds = (-gz.x * F.y + gz.y * F.x) / det;
            z = zq + dz;
            s = sq + ds;
            if (std::abs(dz) + std::abs(ds) < 1e-13) break;
        }
        double zq = std::clamp(z, -tau0_, tau0_);
        double sq = std::clamp(s, 0.0, L);
        if (norm(Y(zq, sq) - p) > 1e-9) return std::nullopt;
        if (std::abs(z - zq) > 1e-9 || std::abs(s - sq) > 1e-9)
            return std::nullopt;
        return std::array<double, 2>{zq, sq};
    };

    if (auto r = try_from(seed_[by * nbx_ + bx])) return r;
    for (int oy = -1; oy <= 1; ++oy)
        for (int ox = -1; ox <= 1; ++ox) {
            int nx = bx + ox, ny2 = by + oy;
            if (nx < 0 || ny2 < 0 || nx >= nbx_ || ny2 >= nby_) continue;
            if (auto r = try_from(seed_[ny2 * nbx_ + nx])) return r;
        }
    return std::nullopt;
}

namespace {

// 4th-order first and second s-derivatives on a uniform stencil around
// arbitrary interior bases; the offset tables cover the two nodes nearest
// each end.
struct RowDeriv {
    Vec2 d1, d2;
};

RowDeriv row_derivatives(const std::vector<Vec2>& P, int j, double h) {
    const int n = static_cast<int>(P.size());
    auto at = [&](int k) { return P[k]; };
    Vec2 d1{}, d2{};
    if (j >= 2 && j <= n - 3) {
        d1 = (1.0 / (12.0 * h)) *
             (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - 1.0 * at(j + 2));
        d2 = (1.0 / (12.0 * h * h)) *
             (-1.0 * at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) +
              16.0 * at(j + 1) - 1.0 * at(j + 2));
    } else if (j <= 1) {
        int b = 0;
        double c1_0[5] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4};
        double c1_1[5] = {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12};
        const double* c1 = j == 0 ? c1_0 : c1_1;
        for (int k = 0; k < 5; ++k) d1 = d1 + (c1[k] / h) * at(b + k);
        double c2_0[6] = {15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12,
                          -5.0 / 6};
        double c2_1[6] = {5.0 / 6, -5.0 / 4, -1.0 / 3, 7.0 / 6, -1.0 / 2,
                          1.0 / 12};
        const double* c2 = j == 0 ? c2_0 : c2_1;
        for (int k = 0; k < 6; ++k) d2 = d2 + (c2[k] / (h * h)) * at(b + k);
    } else {
        // Mirror the forward stencils.
        int b = n - 1;
        double c1_0[5] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4};
        double c1_1[5] = {-1.0 / 4, -5.0 / 6, 3.0 / 2, -1.0 / 2, 1.0 / 12};
        const double* c1 = j == n - 1 ? c1_0 : c1_1;
        for (int k = 0; k < 5; ++k) d1 = d1 - (c1[k] / h) * at(b - k);
        double c2_0[6] = {15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12,
                          -5.0 / 6};
        double c2_1[6] = {5.0 / 6, -5.0 / 4, -1.0 / 3, 7.0 / 6, -1.0 / 2,
                          1.0 / 12};
        const double* c2 = j == n - 1 ? c2_0 : c2_1;
        for (int k = 0; k < 6; ++k) d2 = d2 + (c2[k] / (h * h)) * at(b - k);
    }
    return {d1, d2};
}

} // namespace

FermiChart::LevelCurve FermiChart::level_curve_data(double z) const {
    if (std::abs(z) > tau0_ + 1e-12)
        throw ConfigError("level curve z outside the band");
    LevelCurve lc;
    lc.z = z;
    lc.s_nodes.resize(ns_);
    lc.H.resize(ns_);
    lc.g.resize(ns_);
    std::vector<Vec2> P(ns_);
    for (int j = 0; j < ns_; ++j) {
        lc.s_nodes[j] = s_node(j);
        P[j] = Y(z, lc.s_nodes[j]);
    }
    // Orient the fiber normal toward increasing z once per row.
    Vec2 dz_mid = dYdz(z, lc.s_nodes[ns_ / 2]);
    RowDeriv mid = row_derivatives(P, ns_ / 2, hs_);
    double flip = dot(rot90(normalized(mid.d1)), dz_mid) >= 0.0 ? 1.0 : -1.0;
    for (int j = 0; j < ns_; ++j) {
        RowDeriv rd = row_derivatives(P, j, hs_);
        double g = norm(rd.d1);
        Vec2 that = {rd.d1.x / g, rd.d1.y / g};
        Vec2 n = flip * rot90(that);
        Vec2 curv = (1.0 / (g * g)) * (rd.d2 - dot(rd.d2, that) * that);
        lc.g[j] = g;
        lc.H[j] = dot(curv, n);
    }
    // Composite Simpson over the (odd) node count.
    double len = 0.0;
    for (int j = 0; j + 2 < ns_; j += 2)
        len += hs_ / 3.0 * (lc.g[j] + 4.0 * lc.g[j + 1] + lc.g[j + 2]);
    lc.length = len;

    auto wall_angle = [&](int j) {
        RowDeriv rd = row_derivatives(P, j, hs_);
        Vec2 that = normalized(rd.d1);
        Vec2 n = flip * rot90(that);
        auto nb = curve_->domain().nearest_boundary(P[j]);
        return std::acos(std::clamp(dot(n, nb.nu), -1.0, 1.0));
    };
    lc.angle_start = wall_angle(0);
    lc.angle_end = wall_angle(ns_ - 1);
    return lc;
}

std::array<double, 2> FermiChart::metric_coeffs(double z, double s) const {
    check_band(z, s, tau0_, curve_->length());
    // Local 5/6-point stencil in s around the query.
    const double L = curve_->length();
    double h = hs_;
    // Pick the stencil offset so node j sits exactly at s and the six nodes
    // stay inside [0, L].
    int jmin = std::max(0, static_cast<int>(std::ceil((s - (L - 5.0 * h)) / h - 1e-9)));
    int jmax = std::min(5, static_cast<int>(std::floor(s / h + 1e-9)));
    int j = std::clamp(2, jmin, jmax);
    double base = s - j * h;
    std::vector<Vec2> P(6);
    for (int k = 0; k < 6; ++k)
        P[k] = Y(z, std::clamp(base + k * h, 0.0, L));
    RowDeriv rd = row_derivatives(P, j, h);
    double g = norm(rd.d1);
    Vec2 that = {rd.d1.x / g, rd.d1.y / g};
    Vec2 n = rot90(that);
    if (dot(n, dYdz(z, s)) < 0.0) n = -1.0 * n;
    Vec2 curv = (1.0 / (g * g)) * (rd.d2 - dot(rd.d2, that) * that);
    return {g, dot(curv, n)};
}

FermiChart build_fermi_chart(const CapillaryCurve& curve,
                             const PlanarDomain& dom, double tau0,
                             double eps0, int nz, int ns) {
    if (!(tau0 > 0) || !(eps0 > 0))
        throw ConfigError("chart needs positive tau0 and eps0");
    if (nz < 33 || ns < 33 || nz % 2 == 0 || ns % 2 == 0)
        throw ConfigError("chart lattice sizes must be odd and >= 33");
    if (dom.kind() != curve.domain().kind())
        throw ConfigError("chart domain does not match the curve's domain");
    if (curve.family() == "arc" && tau0 > 0.5 / std::abs(curve.kappa()))
        throw GeometryError("band wider than half the curvature radius");

    FermiChart ch;
    ch.curve_ = std::make_shared<CapillaryCurve>(curve);
    ch.tau0_ = tau0;
    ch.eps0_ = eps0;
    ch.nz_ = nz;
    ch.ns_ = ns;
    const double L = curve.length();
    ch.hz_ = 2.0 * tau0 / (nz - 1);
    ch.hs_ = L / (ns - 1);
    ch.lx_.assign(static_cast<size_t>(nz) * ns, 0.0);
    ch.ly_.assign(static_cast<size_t>(nz) * ns, 0.0);

    // Corners (rectangles): keep the whole band clear.
    for (int e : {0, 1}) {
        EndFrame f = curve.end(e);
        if (dom.corner_distance(f.p) < tau0 + 2.0 * eps0)
            throw GeometryError("band would graze a domain corner");
    }

    XField field{ch.curve_.get(), &ch.curve_->domain(), eps0};
    const int mid = (nz - 1) / 2;
    const double budget = 1e-11;

    struct WallSlide {
        bool active = false;
        int wall = -1;       // rectangle wall id, -1 for disk
        Vec2 anchor{};       // endpoint
        double dir = 1.0;    // increasing-z direction along the wall
    };
    auto make_slide = [&](int e) {
        WallSlide wsl;
        EndFrame f = curve.end(e);
        auto nb = dom.nearest_boundary(f.p);
        wsl.active = true;
        wsl.wall = nb.wall;
        wsl.anchor = f.p;
        Vec2 tw = rot90(nb.nu);
        wsl.dir = dot(field(f.p), tw) >= 0.0 ? 1.0 : -1.0;
        return wsl;
    };
    WallSlide slide0 = make_slide(0), slide1 = make_slide(1);

    auto wall_project = [&](const WallSlide& wsl, Vec2 p) {
        if (wsl.wall < 0) return normalized(p);
        switch (wsl.wall) {
            case 0: return Vec2{p.x, 0.0};
            case 1: return Vec2{dom.width(), p.y};
            case 2: return Vec2{p.x, dom.height()};
            default: return Vec2{0.0, p.y};
        }
    };
    auto wall_exact = [&](const WallSlide& wsl, double z) {
        if (wsl.wall < 0) {
            double a = std::atan2(wsl.anchor.y, wsl.anchor.x) + wsl.dir * z;
            return Vec2{std::cos(a), std::sin(a)};
        }
        Vec2 tw = rot90(dom.nearest_boundary(wsl.anchor).nu);
        return wsl.anchor + (wsl.dir * z) * tw;
    };

    for (int is = 0; is < ns; ++is) {
        double s = ch.s_node(is);
        bool end_fiber = (is == 0 || is == ns - 1);
        const WallSlide* wsl = is == 0 ? &slide0 : &slide1;
        Vec2 start = curve.point(s);
        ch.lx_[mid * ns + is] = start.x;
        ch.ly_[mid * ns + is] = start.y;
        for (int dir = -1; dir <= 1; dir += 2) {
            Vec2 p = start;
            for (int k = 1; k <= mid; ++k) {
                p = advance(field, p, dir * ch.hz_, budget);
                if (end_fiber) {
                    Vec2 snapped = wall_project(*wsl, p);
                    if (norm(snapped - p) > 1e-7)
                        throw NumericError("endpoint fiber drifts off the wall");
                    p = snapped;
                    Vec2 exact = wall_exact(*wsl, dir * k * ch.hz_);
                    if (norm(p - exact) > 1e-8)
                        throw NumericError(
                            "endpoint fiber disagrees with wall arc length");
                }
                int iz = mid + dir * k;
                ch.lx_[iz * ns + is] = p.x;
                ch.ly_[iz * ns + is] = p.y;
            }
        }
    }

    // Deep fibers must match the straight normal map.
    for (int is = 0; is < ns; ++is) {
        double s = ch.s_node(is);
        if (!ch.fiber_untwisted(s)) continue;
        for (int iz = 0; iz < nz; ++iz) {
            Vec2 node = ch.lattice_point(iz, is);
            Vec2 zpt = curve.normal_exp(ch.z_node(iz), s);
            if (norm(node - zpt) > 1e-9)
                throw NumericError("interior flow deviates from normal lines");
        }
    }

    // Diffeomorphism check on the stored lattice.
    for (int iz = 0; iz < nz; ++iz)
        for (int is = 0; is < ns; ++is) {
            int izm = std::max(iz - 1, 0), izp = std::min(iz + 1, nz - 1);
            int ism = std::max(is - 1, 0), isp = std::min(is + 1, ns - 1);
            Vec2 dz = (1.0 / ((izp - izm) * ch.hz_)) *
                      (ch.lattice_point(izp, is) - ch.lattice_point(izm, is));
            Vec2 ds = (1.0 / ((isp - ism) * ch.hs_)) *
                      (ch.lattice_point(iz, isp) - ch.lattice_point(iz, ism));
            if (cross(dz, ds) < 1e-8)
                throw GeometryError("chart folds inside the band; shrink tau0");
        }

    // Seed bins for the Newton inverse.
    double xlo = ch.lx_[0], xhi = ch.lx_[0], ylo = ch.ly_[0], yhi = ch.ly_[0];
    for (size_t i = 0; i < ch.lx_.size(); ++i) {
        xlo = std::min(xlo, ch.lx_[i]);
        xhi = std::max(xhi, ch.lx_[i]);
        ylo = std::min(ylo, ch.ly_[i]);
        yhi = std::max(yhi, ch.ly_[i]);
    }
    ch.blo_ = {xlo, ylo};
    ch.bhi_ = {xhi, yhi};
    ch.nbx_ = ch.nby_ = 96;
    ch.seed_.assign(static_cast<size_t>(ch.nbx_) * ch.nby_, -1);
    auto bin_of = [&](Vec2 p) {
        int bx = std::clamp(
            static_cast<int>((p.x - xlo) / (xhi - xlo + 1e-300) * ch.nbx_), 0,
            ch.nbx_ - 1);
        int by = std::clamp(
            static_cast<int>((p.y - ylo) / (yhi - ylo + 1e-300) * ch.nby_), 0,
            ch.nby_ - 1);
        return by * ch.nbx_ + bx;
    };
    for (int iz = 0; iz < nz; ++iz)
        for (int is = 0; is < ns; ++is)
            ch.seed_[bin_of(ch.lattice_point(iz, is))] = iz * ns + is;
    // Flood-fill empty bins from their neighbors.
    std::queue<int> frontier;
    for (int b = 0; b < ch.nbx_ * ch.nby_; ++b)
        if (ch.seed_[b] >= 0) frontier.push(b);
    while (!frontier.empty()) {
        int b = frontier.front();
        frontier.pop();
        int bx = b % ch.nbx_, by = b / ch.nbx_;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int nx = bx + dx[k], ny2 = by + dy[k];
            if (nx < 0 || ny2 < 0 || nx >= ch.nbx_ || ny2 >= ch.nby_) continue;
            int nb = ny2 * ch.nbx_ + nx;
            if (ch.seed_[nb] < 0) {
                ch.seed_[nb] = ch.seed_[b];
                frontier.push(nb);
            }
        }
    }
    return ch;
}

} // namespace capac
