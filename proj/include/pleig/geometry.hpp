// SPDX-License-Identifier: Apache-2.0
//
// Planar geometry of a dihedrally symmetric obstacle rotating inside an
// outer boundary: radial boundary curves, rotated configurations, sectors,
// reflections, and the sampled containment checks behind the sector
// reflection arguments.
#ifndef PLEIG_GEOMETRY_HPP
#define PLEIG_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace pleig {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 polar(double r, double phi) { return {r * std::cos(phi), r * std::sin(phi)}; }

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double phi);

/// Signed circular distance phi_a - phi_b reduced to (-pi, pi].
double angle_difference(double a, double b);

/// Reflection about the line through the origin at angle `alpha`.
/// Direction cosines within 1e-15 of {0, +-1} are snapped so reflections
/// about the coordinate axes are exact (and therefore bitwise involutive).
Vec2 reflect(double alpha, Vec2 point);

// ---------------------------------------------------------------------------
// Radial boundary curves

/// A positive 2*pi-periodic C^2 radial function phi -> h(phi) describing the
/// boundary {h(phi) e^{i phi}} of a star-shaped domain. Two flavours: the
/// closed-form gear family a -+ b cos(n phi), and tabulated samples on a
/// uniform angular grid interpolated by a periodic cubic spline.
class RadialCurve {
 public:
  enum class Kind { Gear, Tabulated };

  /// Gear curve of order n: f = a - b cos(n phi) for n even,
  /// f = a + b cos(n phi) for n odd. Requires a > b > 0, n >= 2; the parity
  /// of the sign puts an inner vertex at phi = pi in both cases.
  static RadialCurve gear(int order, double a, double b);

  /// Periodic cubic interpolant of `values[i] = h(2 pi i / N)`; the closing
  /// sample h(2 pi) = h(0) is implied and must not be included.
  static RadialCurve tabulated(std::vector<double> values);

  double value(double phi) const;
  double derivative(double phi) const;

  Kind kind() const { return kind_; }
  int gear_order() const { return gear_n_; }
  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }

 private:
  RadialCurve() = default;

  Kind kind_ = Kind::Gear;
  // gear parameters
  int gear_n_ = 0;
  double gear_a_ = 0.0;
  double gear_b_ = 0.0;
  double gear_sign_ = 0.0;
  // tabulated samples + spline second derivatives
  std::vector<double> samples_;
  std::vector<double> moments_;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

/// Inner product <eta, v> of the outward unit normal of the star-shaped
/// domain bounded by `curve` with the right-angle rotation field v(z) = i z,
/// evaluated at boundary angle phi:  -h h' / sqrt(h^2 + h'^2).
double inner_product_eta_v(const RadialCurve& curve, double phi);

// ---------------------------------------------------------------------------
// Obstacle and outer boundary

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
  const ValidationCheck* find(const std::string& name) const;
};

/// The obstacle P: a radial curve declared to have dihedral symmetry of
/// order n about the origin, with symmetry axes at angles k*pi/n.
class DihedralShape {
 public:
  struct Vertex {
    double angle = 0.0;  // in [0, 2*pi), at rotation t = 0
    bool outer = false;  // radial maximum (outer) or minimum (inner)
  };

  DihedralShape(RadialCurve curve, int order);

  const RadialCurve& curve() const { return curve_; }
  int order() const { return order_; }
  double radius(double phi) const { return curve_.value(phi); }
  double radius_derivative(double phi) const { return curve_.derivative(phi); }
  double max_radius() const { return curve_.max_value(); }
  double min_radius() const { return curve_.min_value(); }

  /// Vertex angles located by golden-section search on each half-sector
  /// (tolerance 1e-10 rad). Empty for degenerate (constant-radius) curves.
  const std::vector<Vertex>& vertices() const { return vertices_; }

 private:
  RadialCurve curve_;
  int order_;
  std::vector<Vertex> vertices_;
};

DihedralShape make_gear_shape(int order, double a, double b);

/// Checks positivity, D_n rotational/reflective invariance, per-half-sector
/// monotonicity and the 2n alternating-vertex structure on a dense grid of
/// at least 512*n angles.
ValidationReport validate_shape(const DihedralShape& shape, double tol);

/// Disk of radius r1 centered at (-c, 0), parametrized radially about the
/// origin: g(phi) = -c cos(phi) + sqrt(r1^2 - c^2 sin^2(phi)).
struct OuterDisk {
  double c = 0.0;
  double r1 = 1.0;

  OuterDisk(double offset, double radius);

  double radial(double phi) const;
  double radial_derivative(double phi) const;
  Vec2 center() const { return {-c, 0.0}; }
};

/// The rotating configuration: obstacle `shape` rotated by `t` inside either
/// an offset disk or a concentric star-shaped outer curve.
class AnnularDomain {
 public:
  AnnularDomain(DihedralShape shape, OuterDisk disk, double t);
  /// Concentric variant: the outer boundary is a radial curve about the
  /// same center as the obstacle.
  AnnularDomain(DihedralShape shape, RadialCurve outer, double t);

  const DihedralShape& shape() const { return shape_; }
  double rotation() const { return t_; }
  bool outer_is_disk() const { return disk_.has_value(); }
  const OuterDisk& disk() const;
  const RadialCurve& outer_curve() const;

  double inner_radial(double phi) const { return shape_.radius(phi - t_); }
  double inner_radial_derivative(double phi) const { return shape_.radius_derivative(phi - t_); }
  double outer_radial(double phi) const;
  double outer_radial_derivative(double phi) const;

  /// Same shape and outer boundary at a different rotation angle.
  AnnularDomain with_rotation(double t) const;

 private:
  DihedralShape shape_;
  std::optional<OuterDisk> disk_;
  std::optional<RadialCurve> outer_curve_;
  double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Configuration phase and sectors

enum class Phase { Off, On, Generic };

struct ConfigurationPhase {
  Phase phase = Phase::Generic;
  double offset = 0.0;  // t mod (pi/n), reported for Generic
};

const char* phase_name(Phase phase);

/// OFF if an inner vertex of the rotated obstacle lies on the negative
/// x1-axis within `tol` radians, ON if an outer vertex does, else GENERIC.
ConfigurationPhase classify_configuration(const AnnularDomain& domain, double tol);

/// Sector sigma(t + k pi/n, t + (k+1) pi/n) of the configuration, or the
/// half-plane bounded by z_alpha when `half_plane` is set.
struct SectorDescriptor {
  int index = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool half_plane = false;
};

SectorDescriptor sector(const AnnularDomain& domain, int k);

/// ON/OFF of the rotated inner shape relative to an enclosing dihedral
/// curve: ON when an outer vertex of the inner shape lies on a half-axis
/// carrying an outer vertex of the enclosing shape, OFF when it lies on a
/// half-axis carrying an inner vertex.
ConfigurationPhase classify_relative_phase(const DihedralShape& inner, double t,
                                           const DihedralShape& enclosing, double tol);

/// One sector reflection mandated by the pairing lemmas: the reflection
/// about z_{t + axis_index*pi/n} maps sector `source` into sector `target`.
struct LemmaPair {
  int source = 0;
  int target = 0;
  int axis_index = 0;
};

/// The n lemma pairs for symmetry order n (even and odd pairings).
std::vector<LemmaPair> lemma_sector_pairs(int n);

// ---------------------------------------------------------------------------
// Sampled containment checks

struct PairMargin {
  int source = 0;        // sector index k of the preimage
  int target = 0;        // sector index of the image
  double axis = 0.0;     // reflection axis angle
  int samples = 0;
  int violations = 0;    // interior membership failures
  double min_margin = 0.0;       // min distance of reflected outer-arc points to the outer boundary
  double argmin_angle = 0.0;     // angle of the preimage sample attaining it
};

struct MarginReport {
  std::vector<PairMargin> pairs;
  double min_margin() const;
  bool all_contained(double tol = 1e-12) const;
};

enum class SectorPairing { Even, Odd };

/// Samples each lemma-mandated sector pair of the configuration (including
/// its arc on the outer boundary), reflects about the shared axis and
/// reports membership violations plus the minimum outer-boundary margin.
MarginReport verify_reflection_lemma(const AnnularDomain& domain, SectorPairing pairing,
                                     int samples);

/// Same check for the half-plane split along z_alpha: the reflection of the
/// part of the domain containing (1, 0) must land in the other part.
MarginReport half_plane_containment(const AnnularDomain& domain, double alpha, int samples);

}  // namespace pleig

#endif
