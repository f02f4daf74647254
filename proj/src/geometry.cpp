// SPDX-License-Identifier: Apache-2.0
#include "pleig/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pleig/errors.hpp"

namespace pleig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double golden_section(const auto& f, double a, double b, bool maximize, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double sign = maximize ? -1.0 : 1.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = sign * f(x1);
  double f2 = sign * f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sign * f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sign * f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Cyclic tridiagonal solve with constant coefficients (sub = sup = 1,
// diag = 4), used for the periodic cubic spline moments.
std::vector<double> solve_cyclic_spline(const std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  // Sherman-Morrison: A = T + u v^T with u = (g, 0, ..., 0, 1)^T,
  // v = (1, 0, ..., 0, g)^T and the corner entries folded into the diagonal.
  const double gamma = -4.0;  // arbitrary nonzero shift
  std::vector<double> diag(n, 4.0);
  diag[0] -= gamma;
  diag[n - 1] -= 1.0 / gamma;

  auto thomas = [&](std::vector<double> d) {
    std::vector<double> c(n, 0.0);
    std::vector<double> x(n, 0.0);
    c[0] = 1.0 / diag[0];
    d[0] = d[0] / diag[0];
    for (int i = 1; i < n; ++i) {
      double m = diag[i] - c[i - 1];
      c[i] = 1.0 / m;
      d[i] = (d[i] - d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  std::vector<double> y = thomas(rhs);
  std::vector<double> q = thomas(u);
  double fact = (y[0] + y[n - 1] / gamma) / (1.0 + q[0] + q[n - 1] / gamma);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = y[i] - fact * q[i];
  return x;
}

}  // namespace

double wrap_angle(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double angle_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  if (d > std::numbers::pi) d -= kTwoPi;
  return d;
}

Vec2 reflect(double alpha, Vec2 point) {
  double c = std::cos(2.0 * alpha);
  double s = std::sin(2.0 * alpha);
  auto snap = [](double v) {
    double r = std::round(v);
    return std::abs(v - r) < 1e-15 ? r : v;
  };
  c = snap(c);
  s = snap(s);
  return {c * point.x + s * point.y, s * point.x - c * point.y};
}

// ---------------------------------------------------------------------------
// RadialCurve

RadialCurve RadialCurve::gear(int order, double a, double b) {
  if (order < 2) throw invalid_error("gear order must satisfy n >= 2");
  if (!(a > b && b > 0.0)) {
    std::ostringstream os;
    os << "gear parameters must satisfy a > b > 0, got a = " << a << ", b = " << b;
    throw invalid_error(os.str());
  }
  RadialCurve r;
  r.kind_ = Kind::Gear;
  r.gear_n_ = order;
  r.gear_a_ = a;
  r.gear_b_ = b;
  r.gear_sign_ = (order % 2 == 0) ? -1.0 : 1.0;
  r.min_value_ = a - b;
  r.max_value_ = a + b;
  return r;
}

RadialCurve RadialCurve::tabulated(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  if (n < 8) throw invalid_error("tabulated curve needs at least 8 samples");
  for (int i = 0; i < n; ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw invalid_error("tabulated curve samples must be positive and finite");
  }
  RadialCurve r;
  r.kind_ = Kind::Tabulated;
  r.samples_ = std::move(values);

  const double dx = kTwoPi / n;
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    double ym = r.samples_[(i + n - 1) % n];
    double y0 = r.samples_[i];
    double yp = r.samples_[(i + 1) % n];
    rhs[i] = 6.0 * (ym - 2.0 * y0 + yp) / (dx * dx);
  }
  r.moments_ = solve_cyclic_spline(rhs);

  // Cache the range with a dense scan refined by golden section.
  double lo = r.samples_[0], hi = r.samples_[0];
  double arg_lo = 0.0, arg_hi = 0.0;
  const int scan = 16 * n;
  for (int i = 0; i < scan; ++i) {
    double phi = kTwoPi * i / scan;
    double v = r.value(phi);
    if (v < lo) { lo = v; arg_lo = phi; }
    if (v > hi) { hi = v; arg_hi = phi; }
  }
  const double step = kTwoPi / scan;
  auto eval = [&r](double phi) { return r.value(phi); };
  double amin = golden_section(eval, arg_lo - step, arg_lo + step, false, 1e-12);
  double amax = golden_section(eval, arg_hi - step, arg_hi + step, true, 1e-12);
  r.min_value_ = std::min(lo, r.value(amin));
  r.max_value_ = std::max(hi, r.value(amax));
  if (!(r.min_value_ > 0.0)) throw invalid_error("tabulated curve must stay positive");
  return r;
}

double RadialCurve::value(double phi) const {
  if (kind_ == Kind::Gear) {
    return gear_a_ + gear_sign_ * gear_b_ * std::cos(gear_n_ * phi);
  }
  const int n = static_cast<int>(samples_.size());
  const double dx = kTwoPi / n;
  double w = wrap_angle(phi);
  int i = std::min(static_cast<int>(w / dx), n - 1);
  double s = w - i * dx;
  int j = (i + 1) % n;
  double yi = samples_[i], yj = samples_[j];
  double mi = moments_[i], mj = moments_[j];
  double lin = (yj - yi) / dx - dx * (2.0 * mi + mj) / 6.0;
  return yi + s * (lin + s * (0.5 * mi + s * (mj - mi) / (6.0 * dx)));
}

double RadialCurve::derivative(double phi) const {
  if (kind_ == Kind::Gear) {
    return -gear_sign_ * gear_b_ * gear_n_ * std::sin(gear_n_ * phi);
  }
  const int n = static_cast<int>(samples_.size());
  const double dx = kTwoPi / n;
  double w = wrap_angle(phi);
  int i = std::min(static_cast<int>(w / dx), n - 1);
  double s = w - i * dx;
  int j = (i + 1) % n;
  double yi = samples_[i], yj = samples_[j];
  double mi = moments_[i], mj = moments_[j];
  double lin = (yj - yi) / dx - dx * (2.0 * mi + mj) / 6.0;
  return lin + s * (mi + s * (mj - mi) / (2.0 * dx));
}

double inner_product_eta_v(const RadialCurve& curve, double phi) {
  double h = curve.value(phi);
  double hp = curve.derivative(phi);
  return -h * hp / std::sqrt(h * h + hp * hp);
}

// ---------------------------------------------------------------------------
// DihedralShape

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

DihedralShape::DihedralShape(RadialCurve curve, int order)
    : curve_(std::move(curve)), order_(order) {
  if (order_ < 2) throw invalid_error("dihedral order must satisfy n >= 2");

  // Locate radial extrema by golden-section search over each half-sector.
  // For a valid shape they sit on the symmetry axes k*pi/n; degenerate
  // (constant) curves yield no vertices.
  const double half = std::numbers::pi / order_;
  const double range = curve_.max_value() - curve_.min_value();
  if (range < 1e-12 * std::max(1.0, curve_.max_value())) return;

  auto eval = [this](double phi) { return curve_.value(phi); };
  std::vector<double> candidates;
  for (int k = 0; k < 2 * order_; ++k) {
    double lo = k * half, hi = (k + 1) * half;
    candidates.push_back(golden_section(eval, lo, hi, false, 1e-10));
    candidates.push_back(golden_section(eval, lo, hi, true, 1e-10));
  }
  for (double& c : candidates) c = wrap_angle(c);
  std::sort(candidates.begin(), candidates.end());

  const double merge_tol = 1e-7;
  std::vector<double> merged;
  for (double c : candidates) {
    if (!merged.empty() && c - merged.back() < merge_tol) {
      merged.back() = 0.5 * (merged.back() + c);
    } else {
      merged.push_back(c);
    }
  }
  if (merged.size() >= 2 &&
      (merged.front() + kTwoPi) - merged.back() < merge_tol) {
    merged.front() = wrap_angle(0.5 * (merged.front() + merged.back() - kTwoPi));
    merged.pop_back();
  }

  const double probe = half / 8.0;
  for (double angle : merged) {
    double v = curve_.value(angle);
    double side = std::max(curve_.value(angle - probe), curve_.value(angle + probe));
    bool outer = v >= side;
    // Skip non-extremal leftovers of the search (monotone-interval endpoints
    // already merged into axis candidates normally).
    double lo_side = std::min(curve_.value(angle - probe), curve_.value(angle + probe));
    if (!outer && !(v <= lo_side)) continue;
    vertices_.push_back({angle, outer});
  }
}

DihedralShape make_gear_shape(int order, double a, double b) {
  return DihedralShape(RadialCurve::gear(order, a, b), order);
}

ValidationReport validate_shape(const DihedralShape& shape, double tol) {
  ValidationReport report;
  const int n = shape.order();
  const int grid = 512 * n;
  const double half = std::numbers::pi / n;
  const auto& f = shape.curve();

  double min_f = f.value(0.0);
  for (int i = 0; i < grid; ++i) min_f = std::min(min_f, f.value(kTwoPi * i / grid));
  report.checks.push_back({"positivity", min_f > 0.0, std::max(0.0, -min_f), 0.0});

  double rot_residual = 0.0;
  for (int i = 0; i < grid; ++i) {
    double phi = kTwoPi * i / grid;
    rot_residual = std::max(rot_residual, std::abs(f.value(phi + kTwoPi / n) - f.value(phi)));
  }
  report.checks.push_back({"rotational_invariance", rot_residual <= tol, rot_residual, tol});

  double ref_residual = 0.0;
  for (int k = 0; k < n; ++k) {
    double axis2 = 2.0 * k * std::numbers::pi / n;
    for (int i = 0; i < grid; ++i) {
      double phi = kTwoPi * i / grid;
      ref_residual = std::max(ref_residual, std::abs(f.value(axis2 - phi) - f.value(phi)));
    }
  }
  report.checks.push_back({"reflective_invariance", ref_residual <= tol, ref_residual, tol});

  // Per-half-sector monotonicity with strict interior derivative sign; a
  // zero-derivative plateau inside a sector counts as a failure.
  const int per_sector = std::max(64, grid / (2 * n));
  bool mono_ok = true;
  double mono_residual = 0.0;
  for (int k = 0; k < 2 * n; ++k) {
    double lo = k * half, hi = (k + 1) * half;
    double dom = f.value(hi) - f.value(lo);
    if (dom == 0.0) {
      mono_ok = false;
      mono_residual = std::max(mono_residual, f.max_value() - f.min_value());
      continue;
    }
    double sgn = dom > 0.0 ? 1.0 : -1.0;
    for (int i = 1; i < per_sector; ++i) {
      double phi = lo + (hi - lo) * i / per_sector;
      double d = sgn * f.derivative(phi);
      if (!(d > 0.0)) {
        mono_ok = false;
        mono_residual = std::max(mono_residual, -d);
      }
    }
  }
  report.checks.push_back({"sector_monotonicity", mono_ok, mono_residual, 0.0});

  const auto& verts = shape.vertices();
  bool count_ok = static_cast<int>(verts.size()) == 2 * n;
  bool alternating = count_ok;
  for (size_t i = 0; count_ok && i < verts.size(); ++i) {
    if (verts[i].outer == verts[(i + 1) % verts.size()].outer) alternating = false;
  }
  report.checks.push_back({"vertex_structure", count_ok && alternating,
                           std::abs(static_cast<double>(verts.size()) - 2.0 * n), 0.0});
  return report;
}

// ---------------------------------------------------------------------------
// OuterDisk / AnnularDomain

OuterDisk::OuterDisk(double offset, double radius) : c(offset), r1(radius) {
  if (c < 0.0) throw invalid_error("disk offset must satisfy c >= 0");
  if (!(r1 > c)) {
    std::ostringstream os;
    os << "disk radius must exceed offset: r1 = " << r1 << " <= c = " << c;
    throw invalid_error(os.str());
  }
}

double OuterDisk::radial(double phi) const {
  double s = std::sin(phi);
  return -c * std::cos(phi) + std::sqrt(r1 * r1 - c * c * s * s);
}

double OuterDisk::radial_derivative(double phi) const {
  double s = std::sin(phi), co = std::cos(phi);
  return c * s - c * c * s * co / std::sqrt(r1 * r1 - c * c * s * s);
}

AnnularDomain::AnnularDomain(DihedralShape shape, OuterDisk disk, double t)
    : shape_(std::move(shape)), disk_(disk), t_(t) {
  double clearance = disk.r1 - disk.c;
  if (!(shape_.max_radius() < clearance)) {
    std::ostringstream os;
    os << "containment violated: max f = " << shape_.max_radius()
       << " >= r1 - c = " << clearance;
    throw invalid_error(os.str());
  }
}

AnnularDomain::AnnularDomain(DihedralShape shape, RadialCurve outer, double t)
    : shape_(std::move(shape)), outer_curve_(std::move(outer)), t_(t) {
  if (!(shape_.max_radius() < outer_curve_->min_value())) {
    std::ostringstream os;
    os << "containment violated: max f = " << shape_.max_radius()
       << " >= min outer radius = " << outer_curve_->min_value();
    throw invalid_error(os.str());
  }
}

const OuterDisk& AnnularDomain::disk() const {
  if (!disk_) throw invalid_error("outer boundary is not a disk");
  return *disk_;
}

const RadialCurve& AnnularDomain::outer_curve() const {
  if (!outer_curve_) throw invalid_error("outer boundary is not a radial curve");
  return *outer_curve_;
}

double AnnularDomain::outer_radial(double phi) const {
  return disk_ ? disk_->radial(phi) : outer_curve_->value(phi);
}

double AnnularDomain::outer_radial_derivative(double phi) const {
  return disk_ ? disk_->radial_derivative(phi) : outer_curve_->derivative(phi);
}

AnnularDomain AnnularDomain::with_rotation(double t) const {
  if (disk_) return AnnularDomain(shape_, *disk_, t);
  return AnnularDomain(shape_, *outer_curve_, t);
}

// ---------------------------------------------------------------------------
// Phase classification and sectors

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Off: return "OFF";
    case Phase::On: return "ON";
    case Phase::Generic: return "GENERIC";
  }
  return "GENERIC";
}

ConfigurationPhase classify_configuration(const AnnularDomain& domain, double tol) {
  const auto& verts = domain.shape().vertices();
  double t = domain.rotation();
  double best_inner = std::numeric_limits<double>::infinity();
  double best_outer = best_inner;
  for (const auto& v : verts) {
    double d = std::abs(angle_difference(v.angle + t, std::numbers::pi));
    if (v.outer)
      best_outer = std::min(best_outer, d);
    else
      best_inner = std::min(best_inner, d);
  }
  if (best_inner <= tol && best_inner <= best_outer) return {Phase::Off, 0.0};
  if (best_outer <= tol) return {Phase::On, 0.0};
  double sector_width = std::numbers::pi / domain.shape().order();
  double offset = std::fmod(t, sector_width);
  if (offset < 0.0) offset += sector_width;
  return {Phase::Generic, offset};
}

SectorDescriptor sector(const AnnularDomain& domain, int k) {
  double half = std::numbers::pi / domain.shape().order();
  return {k, domain.rotation() + k * half, domain.rotation() + (k + 1) * half, false};
}

ConfigurationPhase classify_relative_phase(const DihedralShape& inner, double t,
                                           const DihedralShape& enclosing, double tol) {
  double best_on = std::numeric_limits<double>::infinity();
  double best_off = best_on;
  for (const auto& vi : inner.vertices()) {
    if (!vi.outer) continue;
    for (const auto& ve : enclosing.vertices()) {
      double d = std::abs(angle_difference(vi.angle + t, ve.angle));
      if (ve.outer)
        best_on = std::min(best_on, d);
      else
        best_off = std::min(best_off, d);
    }
  }
  if (best_on <= tol && best_on <= best_off) return {Phase::On, 0.0};
  if (best_off <= tol) return {Phase::Off, 0.0};
  double sector_width = std::numbers::pi / inner.order();
  double offset = std::fmod(t, sector_width);
  if (offset < 0.0) offset += sector_width;
  return {Phase::Generic, offset};
}

std::vector<LemmaPair> lemma_sector_pairs(int n) {
  std::vector<LemmaPair> pairs;
  if (n % 2 == 0) {
    for (int k = 0; k + 1 <= n - 1; k += 2) pairs.push_back({k, k + 1, k + 1});
    for (int k = n; k + 1 <= 2 * n - 1; k += 2) pairs.push_back({k + 1, k, k + 1});
  } else {
    pairs.push_back({2 * n - 1, 0, 2 * n});
    for (int k = 1; k <= n - 2; k += 2) pairs.push_back({k, k + 1, k + 1});
    for (int k = n; k <= 2 * n - 3; k += 2) pairs.push_back({k + 1, k, k + 1});
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Sampled containment checks

double MarginReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) m = std::min(m, p.min_margin);
  return m;
}

bool MarginReport::all_contained(double tol) const {
  for (const auto& p : pairs) {
    if (p.violations > 0 || p.min_margin < -tol) return false;
  }
  return true;
}

namespace {

// Distance of `point` to the outer boundary, positive inside.
double outer_margin(const AnnularDomain& domain, Vec2 point, double phi) {
  if (domain.outer_is_disk()) {
    const auto& d = domain.disk();
    return d.r1 - (point - d.center()).norm();
  }
  return domain.outer_curve().value(phi) - point.norm();
}

PairMargin reflect_band_check(const AnnularDomain& domain, double axis, double lo, double hi,
                              int source, int target, int samples) {
  PairMargin out;
  out.source = source;
  out.target = target;
  out.axis = axis;
  out.samples = samples;
  out.min_margin = std::numeric_limits<double>::infinity();

  const double membership_tol = 1e-9;
  constexpr int radial_samples = 4;

  for (int i = 0; i < samples; ++i) {
    double phi = lo + (hi - lo) * (i + 0.5) / samples;
    double phi_ref = 2.0 * axis - phi;
    double g_src = domain.outer_radial(phi);
    double f_src = domain.inner_radial(phi);
    double g_tgt = domain.outer_radial(phi_ref);
    double f_tgt = domain.inner_radial(phi_ref);

    // Arc point on the outer boundary.
    Vec2 arc = polar(g_src, phi);
    Vec2 arc_ref = reflect(axis, arc);
    double margin = outer_margin(domain, arc_ref, phi_ref);
    if (margin < out.min_margin) {
      out.min_margin = margin;
      out.argmin_angle = phi;
    }
    if (g_src > g_tgt + membership_tol) out.violations++;

    // Interior points along the same ray, radius preserved by the reflection.
    for (int j = 0; j < radial_samples; ++j) {
      double r = f_src + (g_src - f_src) * (j + 0.5) / radial_samples;
      if (r < f_tgt - membership_tol || r > g_tgt + membership_tol) out.violations++;
    }
  }
  return out;
}

}  // namespace

MarginReport verify_reflection_lemma(const AnnularDomain& domain, SectorPairing pairing,
                                     int samples) {
  const int n = domain.shape().order();
  const bool n_even = (n % 2 == 0);
  if ((pairing == SectorPairing::Even) != n_even) {
    throw invalid_error("sector pairing parity does not match the symmetry order");
  }
  if (samples < 8) throw invalid_error("need at least 8 samples per arc");

  const double t = domain.rotation();
  const double half = std::numbers::pi / n;
  MarginReport report;
  for (const auto& pair : lemma_sector_pairs(n)) {
    double axis = t + pair.axis_index * half;
    double lo = t + pair.source * half;
    double hi = lo + half;
    report.pairs.push_back(
        reflect_band_check(domain, axis, lo, hi, pair.source, pair.target, samples));
  }
  return report;
}

MarginReport half_plane_containment(const AnnularDomain& domain, double alpha, int samples) {
  if (samples < 8) throw invalid_error("need at least 8 samples per arc");
  MarginReport report;
  // S_alpha (the half-plane containing (1,0) with boundary z_alpha) is the
  // angular band (alpha - pi, alpha).
  report.pairs.push_back(
      reflect_band_check(domain, alpha, alpha - std::numbers::pi, alpha, 0, 0, samples));
  return report;
}

}  // namespace pleig
