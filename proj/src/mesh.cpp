// SPDX-License-Identifier: Apache-2.0
#include "pleig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "pleig/errors.hpp"

namespace pleig {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * (b - a).cross(c - a); }

int round_up_multiple(int value, int factor) {
  return ((value + factor - 1) / factor) * factor;
}
}  // namespace

double Mesh2D::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double Mesh2D::total_area() const {
  double a = 0.0;
  for (int t = 0; t < n_triangles(); ++t) a += triangle_area(t);
  return a;
}

// ---------------------------------------------------------------------------

BoundaryPolylines discretize_boundary(const AnnularDomain& domain, const MeshParams& params) {
  if (!(params.target_h > 0.0)) throw invalid_error("mesh target h must be positive");
  const int n = domain.shape().order();
  const int min_count = 16 * n;
  const double h = params.target_h;
  const double t = domain.rotation();

  // Perimeter estimates for default node counts.
  auto perimeter = [](auto&& radial, auto&& radial_d) {
    double len = 0.0;
    const int m = 2048;
    for (int i = 0; i < m; ++i) {
      double phi = kTwoPi * (i + 0.5) / m;
      double r = radial(phi), rp = radial_d(phi);
      len += std::sqrt(r * r + rp * rp) * kTwoPi / m;
    }
    return len;
  };
  double inner_perim = perimeter([&](double p) { return domain.inner_radial(p); },
                                 [&](double p) { return domain.inner_radial_derivative(p); });
  double outer_perim = perimeter([&](double p) { return domain.outer_radial(p); },
                                 [&](double p) { return domain.outer_radial_derivative(p); });

  const bool offset_disk = domain.outer_is_disk() && domain.disk().c > 0.0;

  int n_inner = params.n_inner;
  int n_outer = params.n_outer;
  if (n_inner == 0) {
    n_inner = std::max(min_count, static_cast<int>(std::ceil(inner_perim / (1.2 * h))));
    if (!offset_disk) {
      // Concentric outers share the inner angular pattern, so the inner
      // count must also satisfy the outer chord bound.
      n_inner = std::max(n_inner, static_cast<int>(std::ceil(outer_perim / (1.2 * h))));
    }
    n_inner = round_up_multiple(n_inner, 2 * n);
  } else if (n_inner < min_count) {
    std::ostringstream os;
    os << "n_inner = " << n_inner << " below the minimum 16*n = " << min_count;
    throw invalid_error(os.str());
  }
  if (n_outer == 0) {
    n_outer = std::max(min_count, static_cast<int>(std::ceil(outer_perim / (1.2 * h))));
    n_outer = round_up_multiple(n_outer, 2 * n);
  } else if (n_outer < min_count) {
    std::ostringstream os;
    os << "n_outer = " << n_outer << " below the minimum 16*n = " << min_count;
    throw invalid_error(os.str());
  }

  BoundaryPolylines loops;
  loops.inner.reserve(n_inner);
  loops.inner_angles.reserve(n_inner);
  for (int j = 0; j < n_inner; ++j) {
    double phi = t + kTwoPi * j / n_inner;
    loops.inner_angles.push_back(phi);
    loops.inner.push_back(polar(domain.inner_radial(phi), phi));
  }

  if (offset_disk) {
    const auto& d = domain.disk();
    loops.outer.reserve(n_outer);
    loops.outer_angles.reserve(n_outer);
    for (int k = 0; k < n_outer; ++k) {
      double theta = kTwoPi * k / n_outer;
      Vec2 p = d.center() + polar(d.r1, theta);
      loops.outer.push_back(p);
      loops.outer_angles.push_back(std::atan2(p.y, p.x));
    }
    loops.outer_matches_inner_pattern = false;
  } else {
    // Concentric outer boundary: reuse the inner angular pattern so that
    // symmetry-image meshes are exactly congruent.
    loops.outer.reserve(n_inner);
    loops.outer_angles.reserve(n_inner);
    for (int j = 0; j < n_inner; ++j) {
      double phi = loops.inner_angles[j];
      loops.outer.push_back(polar(domain.outer_radial(phi), phi));
      loops.outer_angles.push_back(phi);
    }
    loops.outer_matches_inner_pattern = true;
  }
  return loops;
}

// ---------------------------------------------------------------------------

namespace {

struct MeshBuilder {
  Mesh2D mesh;

  int add_vertex(Vec2 p, bool dirichlet_flag) {
    mesh.vertices.push_back(p);
    mesh.dirichlet.push_back(dirichlet_flag ? 1 : 0);
    return static_cast<int>(mesh.vertices.size()) - 1;
  }

  void add_triangle(int a, int b, int c) {
    if (signed_area(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) < 0.0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
  }
};

// Triangulates the band between two nested closed vertex rings by a greedy
// angular merge. Both rings are star-shaped about the origin and listed in
// counterclockwise order.
void zip_band(MeshBuilder& mb, const std::vector<int>& ring_a, const std::vector<double>& ang_a,
              const std::vector<int>& ring_b, const std::vector<double>& ang_b) {
  const int na = static_cast<int>(ring_a.size());
  const int nb = static_cast<int>(ring_b.size());

  // Unwrap both angle sequences relative to ang_a[0].
  auto rel = [&](double phi) {
    double d = std::fmod(phi - ang_a[0], kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return d;
  };
  int b0 = 0;
  double best = rel(ang_b[0]);
  for (int k = 1; k < nb; ++k) {
    double r = rel(ang_b[k]);
    if (r < best) {
      best = r;
      b0 = k;
    }
  }

  // Relative angles increase with index for star-shaped rings; unwrap
  // explicitly to be safe.
  std::vector<double> ua(na + 1), ub(nb + 1);
  ua[0] = rel(ang_a[0]);
  for (int i = 1; i < na; ++i) {
    ua[i] = rel(ang_a[i]);
    while (ua[i] < ua[i - 1]) ua[i] += kTwoPi;
  }
  ua[na] = ua[0] + kTwoPi;
  ub[0] = rel(ang_b[b0]);
  for (int k = 1; k < nb; ++k) {
    ub[k] = rel(ang_b[(b0 + k) % nb]);
    while (ub[k] < ub[k - 1]) ub[k] += kTwoPi;
  }
  ub[nb] = ub[0] + kTwoPi;

  int i = 0, k = 0;
  while (i < na || k < nb) {
    bool advance_a;
    if (i >= na) {
      advance_a = false;
    } else if (k >= nb) {
      advance_a = true;
    } else {
      advance_a = ua[i + 1] <= ub[k + 1];
    }
    int ai = ring_a[i % na];
    int bk = ring_b[(b0 + k) % nb];
    if (advance_a) {
      int aj = ring_a[(i + 1) % na];
      mb.add_triangle(aj, ai, bk);
      ++i;
    } else {
      int bj = ring_b[(b0 + k + 1) % nb];
      mb.add_triangle(bk, bj, ai);
      ++k;
    }
  }
}

}  // namespace

Mesh2D triangulate(const AnnularDomain& domain, const BoundaryPolylines& loops,
                   const MeshParams& /*params*/) {
  const int n_inner = static_cast<int>(loops.inner.size());
  const int n_outer = static_cast<int>(loops.outer.size());
  if (n_inner < 3 || n_outer < 3) throw mesh_error("boundary loops too small");

  // Containment screen: reject self-intersecting input bands.
  for (int i = 0; i < 4096; ++i) {
    double phi = kTwoPi * i / 4096;
    if (domain.outer_radial(phi) - domain.inner_radial(phi) <= 0.0)
      throw mesh_error("boundary loops intersect: outer radius does not exceed inner radius");
  }

  MeshBuilder mb;

  // Ring 0: the inner loop itself.
  std::vector<int> prev_ring(n_inner);
  for (int j = 0; j < n_inner; ++j) prev_ring[j] = mb.add_vertex(loops.inner[j], true);

  // Radial targets per angle.
  std::vector<double> f_rad(n_inner), g_rad(n_inner);
  double mean_log = 0.0;
  for (int j = 0; j < n_inner; ++j) {
    double phi = loops.inner_angles[j];
    f_rad[j] = domain.inner_radial(phi);
    g_rad[j] = domain.outer_radial(phi);
    mean_log += std::log(g_rad[j] / f_rad[j]);
  }
  mean_log /= n_inner;

  const double dphi = kTwoPi / n_inner;
  const bool zip_outer = !loops.outer_matches_inner_pattern;
  int layers = std::max(1, static_cast<int>(std::lround(mean_log / dphi)));
  // Interior rings stop one step short of an offset-disk outer loop; the
  // remaining band is zipped against the disk's own node pattern.
  const int top_ring = zip_outer ? layers - 1 : layers;

  std::vector<int> ring(n_inner);
  for (int i = 1; i <= top_ring; ++i) {
    std::vector<int> cur(n_inner);
    for (int j = 0; j < n_inner; ++j) {
      double frac = static_cast<double>(i) / layers;
      double r = f_rad[j] * std::pow(g_rad[j] / f_rad[j], frac);
      bool is_outer_loop = (!zip_outer && i == layers);
      Vec2 p = is_outer_loop ? loops.outer[j] : polar(r, loops.inner_angles[j]);
      cur[j] = mb.add_vertex(p, is_outer_loop);
    }
    // Criss-cross split of each quad between the rings.
    for (int j = 0; j < n_inner; ++j) {
      int jn = (j + 1) % n_inner;
      int a = prev_ring[j], b = prev_ring[jn], c = cur[jn], d = cur[j];
      Vec2 center = (mb.mesh.vertices[a] + mb.mesh.vertices[b] + mb.mesh.vertices[c] +
                     mb.mesh.vertices[d]) *
                    0.25;
      int m = mb.add_vertex(center, false);
      mb.add_triangle(a, b, m);
      mb.add_triangle(b, c, m);
      mb.add_triangle(c, d, m);
      mb.add_triangle(d, a, m);
    }
    prev_ring = cur;
  }

  if (zip_outer) {
    std::vector<int> outer_ring(n_outer);
    for (int k = 0; k < n_outer; ++k) outer_ring[k] = mb.add_vertex(loops.outer[k], true);
    std::vector<double> prev_angles(n_inner);
    for (int j = 0; j < n_inner; ++j) prev_angles[j] = loops.inner_angles[j];
    zip_band(mb, prev_ring, prev_angles, outer_ring, loops.outer_angles);
    for (int k = 0; k < n_outer; ++k) {
      mb.mesh.boundary.push_back({outer_ring[k], outer_ring[(k + 1) % n_outer], BoundaryTag::Outer});
    }
  } else {
    for (int j = 0; j < n_inner; ++j) {
      mb.mesh.boundary.push_back({prev_ring[j], prev_ring[(j + 1) % n_inner], BoundaryTag::Outer});
    }
  }
  for (int j = 0; j < n_inner; ++j) {
    mb.mesh.boundary.push_back({j, (j + 1) % n_inner, BoundaryTag::Inner});
  }

  for (int t = 0; t < mb.mesh.n_triangles(); ++t) {
    if (!(mb.mesh.triangle_area(t) > 0.0)) throw mesh_error("degenerate triangle produced");
  }
  return mb.mesh;
}

Mesh2D build_mesh(const AnnularDomain& domain, const MeshParams& params) {
  MeshParams attempt = params;
  double achieved = 0.0;
  for (int round = 0; round < 3; ++round) {
    BoundaryPolylines loops = discretize_boundary(domain, attempt);
    Mesh2D mesh = triangulate(domain, loops, attempt);
    MeshQuality q = mesh_quality(mesh);
    if (q.min_angle_deg >= params.min_angle_deg) return mesh;
    achieved = std::max(achieved, q.min_angle_deg);
    attempt.target_h *= 0.75;
    attempt.n_inner = 0;
    attempt.n_outer = 0;
  }
  std::ostringstream os;
  os << "mesh quality below threshold: achieved min angle " << achieved << " deg < "
     << params.min_angle_deg << " deg";
  throw mesh_error(os.str());
}

Mesh2D reflect_mesh(const Mesh2D& mesh, double alpha) {
  Mesh2D out;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(reflect(alpha, v));
  out.triangles.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) out.triangles.push_back({t[0], t[2], t[1]});
  out.boundary.reserve(mesh.boundary.size());
  for (const auto& e : mesh.boundary) out.boundary.push_back({e.b, e.a, e.tag});
  out.dirichlet = mesh.dirichlet;
  return out;
}

MeshQuality mesh_quality(const Mesh2D& mesh) {
  if (mesh.n_triangles() == 0) throw mesh_error("empty mesh");
  MeshQuality q;
  q.n_vertices = mesh.n_vertices();
  q.n_triangles = mesh.n_triangles();
  q.n_boundary_edges = static_cast<int>(mesh.boundary.size());
  q.min_angle_deg = 180.0;
  q.min_edge = std::numeric_limits<double>::infinity();
  double angle_sum = 0.0;
  for (const auto& tri : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      Vec2 a = mesh.vertices[tri[i]];
      Vec2 b = mesh.vertices[tri[(i + 1) % 3]];
      Vec2 c = mesh.vertices[tri[(i + 2) % 3]];
      Vec2 u = b - a, w = c - a;
      double ang = std::atan2(std::abs(u.cross(w)), u.dot(w)) * 180.0 / std::numbers::pi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      angle_sum += ang;
      double e = u.norm();
      q.max_edge = std::max(q.max_edge, e);
      q.min_edge = std::min(q.min_edge, e);
    }
  }
  q.mean_angle_deg = angle_sum / (3.0 * mesh.n_triangles());
  return q;
}

// ---------------------------------------------------------------------------

void write_mesh(std::ostream& os, const Mesh2D& mesh) {
  char buf[128];
  os << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    os << buf;
  }
  os << "triangles " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& e : mesh.boundary) {
    os << e.a << " " << e.b << " " << (e.tag == BoundaryTag::Outer ? "OUTER" : "INNER") << "\n";
  }
}

Mesh2D read_mesh(std::istream& is) {
  Mesh2D mesh;
  std::string kw;
  int count = 0;
  if (!(is >> kw >> count) || kw != "vertices") throw parse_error("mesh file: expected 'vertices <count>'");
  mesh.vertices.resize(count);
  for (auto& v : mesh.vertices)
    if (!(is >> v.x >> v.y)) throw parse_error("mesh file: bad vertex row");
  if (!(is >> kw >> count) || kw != "triangles") throw parse_error("mesh file: expected 'triangles <count>'");
  mesh.triangles.resize(count);
  for (auto& t : mesh.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw parse_error("mesh file: bad triangle row");
  if (!(is >> kw >> count) || kw != "boundary") throw parse_error("mesh file: expected 'boundary <count>'");
  mesh.boundary.resize(count);
  mesh.dirichlet.assign(mesh.vertices.size(), 0);
  for (auto& e : mesh.boundary) {
    std::string tag;
    if (!(is >> e.a >> e.b >> tag)) throw parse_error("mesh file: bad boundary row");
    e.tag = (tag == "OUTER") ? BoundaryTag::Outer : BoundaryTag::Inner;
    mesh.dirichlet[e.a] = 1;
    mesh.dirichlet[e.b] = 1;
  }
  return mesh;
}

// ---------------------------------------------------------------------------

TriangleLocator::TriangleLocator(const Mesh2D& mesh) : mesh_(mesh) {
  double x1 = std::numeric_limits<double>::infinity(), y1 = x1;
  double x2 = -x1, y2 = -x1;
  for (const auto& v : mesh.vertices) {
    x1 = std::min(x1, v.x);
    y1 = std::min(y1, v.y);
    x2 = std::max(x2, v.x);
    y2 = std::max(y2, v.y);
  }
  x0_ = x1;
  y0_ = y1;
  double area = mesh.total_area();
  cell_ = std::max(1e-12, 2.0 * std::sqrt(area / std::max(1, mesh.n_triangles())));
  nx_ = std::max(1, static_cast<int>((x2 - x1) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((y2 - y1) / cell_) + 1);
  bins_.resize(static_cast<size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double bx1 = x2, by1 = y2, bx2 = x1, by2 = y1;
    for (int i = 0; i < 3; ++i) {
      const Vec2& v = mesh.vertices[tri[i]];
      bx1 = std::min(bx1, v.x);
      by1 = std::min(by1, v.y);
      bx2 = std::max(bx2, v.x);
      by2 = std::max(by2, v.y);
    }
    int ix1 = std::clamp(static_cast<int>((bx1 - x0_) / cell_), 0, nx_ - 1);
    int iy1 = std::clamp(static_cast<int>((by1 - y0_) / cell_), 0, ny_ - 1);
    int ix2 = std::clamp(static_cast<int>((bx2 - x0_) / cell_), 0, nx_ - 1);
    int iy2 = std::clamp(static_cast<int>((by2 - y0_) / cell_), 0, ny_ - 1);
    for (int iy = iy1; iy <= iy2; ++iy)
      for (int ix = ix1; ix <= ix2; ++ix) bins_[static_cast<size_t>(iy) * nx_ + ix].push_back(t);
  }
}

int TriangleLocator::locate(Vec2 p) const {
  int ix = std::clamp(static_cast<int>((p.x - x0_) / cell_), 0, nx_ - 1);
  int iy = std::clamp(static_cast<int>((p.y - y0_) / cell_), 0, ny_ - 1);
  int best = -1;
  double best_score = -1e9;
  for (int ring = 0; ring <= 2 && best < 0; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jx >= nx_ || jy < 0 || jy >= ny_) continue;
        for (int t : bins_[static_cast<size_t>(jy) * nx_ + jx]) {
          const auto& tri = mesh_.triangles[t];
          Vec2 a = mesh_.vertices[tri[0]], b = mesh_.vertices[tri[1]], c = mesh_.vertices[tri[2]];
          double area2 = (b - a).cross(c - a);
          if (area2 <= 0.0) continue;
          double l0 = (b - p).cross(c - p) / area2;
          double l1 = (c - p).cross(a - p) / area2;
          double l2 = (a - p).cross(b - p) / area2;
          double score = std::min({l0, l1, l2});
          if (score > best_score) {
            best_score = score;
            if (score >= -1e-9) best = t;
          }
        }
      }
    }
  }
  return best;
}

double TriangleLocator::interpolate(const std::vector<double>& field, Vec2 p) const {
  int t = locate(p);
  if (t < 0) throw invalid_error("interpolation point outside the mesh");
  const auto& tri = mesh_.triangles[t];
  Vec2 a = mesh_.vertices[tri[0]], b = mesh_.vertices[tri[1]], c = mesh_.vertices[tri[2]];
  double area2 = (b - a).cross(c - a);
  double l0 = (b - p).cross(c - p) / area2;
  double l1 = (c - p).cross(a - p) / area2;
  double l2 = (a - p).cross(b - p) / area2;
  return l0 * field[tri[0]] + l1 * field[tri[1]] + l2 * field[tri[2]];
}

}  // namespace pleig
