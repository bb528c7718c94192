#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace capac {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return {a.x / n, a.y / n};
}
/// Counterclockwise quarter turn.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

enum class DomainKind { Rectangle, UnitDisk, StripRectangle };

struct BoundaryPoint {
    Vec2 p;        // closest boundary point
    Vec2 nu;       // outward normal at p
    double kappa;  // boundary curvature II_dM(tau,tau) = <grad_tau nu, tau>
    int wall;      // rectangle wall id 0:y=0 1:x=w 2:y=h 3:x=0; -1 for the disk
};

/// Axis-aligned box [0,w]x[0,h] or the unit disk. The strip flavor is a box
/// whose y = 0 and y = h walls play the role of the two strip walls.
class PlanarDomain {
public:
    static PlanarDomain rectangle(double width, double height);
    static PlanarDomain unit_disk();
    static PlanarDomain strip_rectangle(double width, double height);

    DomainKind kind() const { return kind_; }
    std::string kind_name() const;
    double width() const { return w_; }
    double height() const { return h_; }
    double area() const;
    bool inside(Vec2 p) const { return dist_boundary(p) > 0.0; }
    /// Signed distance to the boundary, positive inside.
    double dist_boundary(Vec2 p) const;
    BoundaryPoint nearest_boundary(Vec2 p) const;
    /// Distance to the nearest corner (infinity for the disk).
    double corner_distance(Vec2 p) const;

    double boundary_length() const;
    /// Arc-length parametrization, counterclockwise; rectangle starts at
    /// (0,0) along the bottom wall, disk at (1,0).
    BoundaryPoint boundary_at(double s) const;

    Vec2 bbox_lo() const;
    Vec2 bbox_hi() const;

private:
    DomainKind kind_ = DomainKind::Rectangle;
    double w_ = 0.0, h_ = 0.0;
};

struct CurveSelector {
    std::string family;     // "segment" | "chord" | "arc"
    double position = 0.0;  // segment: x0; chord: normal rotation; arc: center x
};

struct EndFrame {
    Vec2 p;
    Vec2 nu_sigma;       // curve normal, points into M+
    Vec2 tau_sigma_out;  // outward conormal of the curve at this endpoint
    Vec2 nu_dM;          // outward domain normal
    Vec2 tau_dM;         // boundary tangent into the M+ side
    double kappa_dM;     // II_dM(tau,tau) at the contact point
    double s;            // arc-length parameter (0 or L)
};

/// Constant-curvature curve meeting the boundary at angle theta at both ends.
/// Conventions: nu points into M+ = u^-1((0,inf)); the tangent is nu rotated
/// by +90 degrees; kappa = <gamma'', nu> (mean-curvature-vector sign, so the
/// offset curves Sigma_z obey dH/dz = kappa^2 in the plane).
class CapillaryCurve {
public:
    const std::string& family() const { return family_; }
    double kappa() const { return kappa_; }
    double length() const { return length_; }
    double theta() const { return theta_; }
    double area_plus() const { return area_plus_; }
    double area_minus() const { return area_minus_; }
    /// |M+| - |M-|.
    double mass() const { return area_plus_ - area_minus_; }
    /// mass / |M|, the admissible volume-fraction constant in (-1, 1).
    double mass_fraction() const { return mass() / domain_.area(); }
    const PlanarDomain& domain() const { return domain_; }

    Vec2 point(double s) const;
    Vec2 tangent(double s) const;
    Vec2 nu(double s) const;

    /// Signed normal coordinate of p relative to the full constant-curvature
    /// extension (line or circle): positive on the M+ side; for points in a
    /// tubular band this is the signed distance to the curve.
    double side(Vec2 p) const;
    /// Unit gradient of side(), the extended Fermi direction field.
    Vec2 side_gradient(Vec2 p) const;

    struct Projection {
        double s;  // foot parameter, may fall outside [0, L]
        double z;  // signed distance along the normal
    };
    Projection project(Vec2 p) const;

    /// Untwisted normal-exponential point gamma(s) + z nu(s).
    Vec2 normal_exp(double z, double s) const { return point(s) + z * nu(s); }

    EndFrame end(int which) const;

    friend CapillaryCurve find_capillary_curve(const PlanarDomain& dom,
                                               double theta,
                                               const CurveSelector& sel);

private:
    PlanarDomain domain_;
    std::string family_;
    double theta_ = 0.0;
    double kappa_ = 0.0;
    double length_ = 0.0;
    double area_plus_ = 0.0, area_minus_ = 0.0;
    // segment: x0; chord: height d = cos(theta); arc: center and radius
    double x0_ = 0.0;
    double chord_d_ = 0.0;
    Vec2 center_{};
    double radius_ = 0.0;
    double phi_star_ = 0.0;  // arc half opening angle
};

/// Closed-form member of the constant-curvature family for the shipped
/// domains; verifies curvature constancy, the endpoint angle identity, and
/// the area split before returning. Throws GeometryError when the selector
/// has no admissible member (wrong family for the domain, theta out of
/// range, or the curve would leave the domain / graze a corner).
CapillaryCurve find_capillary_curve(const PlanarDomain& dom, double theta,
                                    const CurveSelector& sel);

/// Twisted collar chart around the curve: the flow Y(z, s) of the unit field
/// X that interpolates between the Fermi direction in the interior and a
/// boundary-tangent direction inside the collar of width eps0, so endpoint
/// fibers slide along the boundary. Lattice-sampled with C^1 interpolation;
/// closed forms are used wherever the fiber provably never meets the collar.
class FermiChart {
public:
    double tau0() const { return tau0_; }
    double eps0() const { return eps0_; }
    const CapillaryCurve& curve() const { return *curve_; }
    const PlanarDomain& domain() const { return curve_->domain(); }

    Vec2 Y(double z, double s) const;
    /// Always-interpolated evaluation (no closed-form shortcut); used to
    /// validate the integrated flow itself.
    Vec2 Y_lattice(double z, double s) const;
    Vec2 dYdz(double z, double s) const;
    Vec2 dYds(double z, double s) const;
    double jacobian(double z, double s) const;

    /// The generating vector field at an arbitrary point near the band.
    Vec2 X_at(Vec2 p) const;

    /// Chart inverse by closed form in the untwisted region, Newton on the
    /// interpolated map otherwise. Empty when p is not in the band.
    std::optional<std::array<double, 2>> invert(Vec2 p) const;
    bool in_band(Vec2 p) const { return invert(p).has_value(); }

    struct LevelCurve {
        double z = 0.0;
        double length = 0.0;
        std::vector<double> s_nodes;
        std::vector<double> H;      // curvature <gamma'', n>, n toward M+
        std::vector<double> g;      // fiber speed |dY/ds|
        double angle_start = 0.0;   // angle of Sigma_z with dM at s = 0 end
        double angle_end = 0.0;     // and at s = L end
    };
    /// Sampled length / curvature / wall angles of Sigma_z. Throws on
    /// |z| > tau0.
    LevelCurve level_curve_data(double z) const;

    /// {fiber speed |dY/ds|, curvature H_z} at a single point.
    std::array<double, 2> metric_coeffs(double z, double s) const;

    int nz() const { return nz_; }
    int ns() const { return ns_; }
    double z_node(int iz) const { return -tau0_ + 2.0 * tau0_ * iz / (nz_ - 1); }
    double s_node(int is) const { return curve_->length() * is / (ns_ - 1); }
    Vec2 lattice_point(int iz, int is) const;

    friend FermiChart build_fermi_chart(const CapillaryCurve& curve,
                                        const PlanarDomain& dom, double tau0,
                                        double eps0, int nz, int ns);

private:
    std::shared_ptr<const CapillaryCurve> curve_;
    double tau0_ = 0.0, eps0_ = 0.0;
    int nz_ = 0, ns_ = 0;
    double hz_ = 0.0, hs_ = 0.0;
    std::vector<double> lx_, ly_;  // lattice Y values, row-major [iz][is]
    // seed grid for the inverse
    Vec2 blo_{}, bhi_{};
    int nbx_ = 0, nby_ = 0;
    std::vector<int> seed_;  // flattened (iz, is) seed per bin

    bool fiber_untwisted(double s) const;
    std::optional<std::array<double, 2>> invert_newton(Vec2 p) const;
};

/// Builds the chart; throws GeometryError when the band cannot be a
/// diffeomorphism (jacobian loses positivity, field degenerates, or the band
/// would graze a rectangle corner).
FermiChart build_fermi_chart(const CapillaryCurve& curve,
                             const PlanarDomain& dom, double tau0,
                             double eps0, int nz = 257, int ns = 257);

} // namespace capac
