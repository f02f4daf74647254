// SPDX-License-Identifier: Apache-2.0
#include "pleig/shape_derivative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "pleig/errors.hpp"

namespace pleig {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

BoundaryTrace boundary_trace(const Mesh2D& mesh, const FirstEigenpair& pair,
                             const AnnularDomain& domain, int samples_per_sector) {
  const int n = domain.shape().order();
  const double t = domain.rotation();

  // Collect inner boundary edges and the triangle adjacent to each.
  std::map<std::pair<int, int>, int> edge_to_tri;
  for (int tri = 0; tri < mesh.n_triangles(); ++tri) {
    const auto& tv = mesh.triangles[tri];
    for (int e = 0; e < 3; ++e) {
      int a = tv[e], b = tv[(e + 1) % 3];
      edge_to_tri[{std::min(a, b), std::max(a, b)}] = tri;
    }
  }

  struct RawSample {
    double rel_angle;
    TraceSample s;
  };
  std::vector<RawSample> raw;
  for (const auto& edge : mesh.boundary) {
    if (edge.tag != BoundaryTag::Inner) continue;
    auto it = edge_to_tri.find({std::min(edge.a, edge.b), std::max(edge.a, edge.b)});
    if (it == edge_to_tri.end()) throw mesh_error("inner boundary edge with no adjacent triangle");
    int tri = it->second;

    Vec2 pa = mesh.vertices[edge.a], pb = mesh.vertices[edge.b];
    Vec2 mid = (pa + pb) * 0.5;
    double phi_a = std::atan2(pa.y, pa.x);
    double phi_b = std::atan2(pb.y, pb.x);
    // Angular midpoint of the edge, robust across the 2 pi wrap.
    double phi = phi_a + 0.5 * angle_difference(phi_b, phi_a);

    double psi = phi - t;
    double f = domain.shape().radius(psi);
    double fp = domain.shape().radius_derivative(psi);
    double denom = std::sqrt(f * f + fp * fp);
    // Outward normal of the obstacle at angle phi, negated: the outward
    // normal of the annular domain points into the obstacle.
    double cs = std::cos(phi), sn = std::sin(phi);
    Vec2 beta{(f * cs + fp * sn) / denom, (f * sn - fp * cs) / denom};
    Vec2 eta{-beta.x, -beta.y};
    double eta_dot_v = f * fp / denom;

    // One-sided gradient of the P1 field on the unique adjacent triangle.
    const auto& tv = mesh.triangles[tri];
    Vec2 va = mesh.vertices[tv[0]], vb = mesh.vertices[tv[1]], vc = mesh.vertices[tv[2]];
    double area2 = (vb - va).cross(vc - va);
    Vec2 g0{(vb.y - vc.y) / area2, (vc.x - vb.x) / area2};
    Vec2 g1{(vc.y - va.y) / area2, (va.x - vc.x) / area2};
    Vec2 g2{(va.y - vb.y) / area2, (vb.x - va.x) / area2};
    Vec2 grad = g0 * pair.u[tv[0]] + g1 * pair.u[tv[1]] + g2 * pair.u[tv[2]];

    RawSample r;
    r.rel_angle = wrap_angle(phi - t);
    r.s.phi = phi;
    r.s.point = mid;
    r.s.normal = eta;
    r.s.du_dn = grad.dot(eta);
    r.s.eta_dot_v = eta_dot_v;
    r.s.ds = (pb - pa).norm();
    r.s.sector = std::min(2 * n - 1, static_cast<int>(r.rel_angle / (std::numbers::pi / n)));
    raw.push_back(r);
  }
  if (raw.empty()) throw mesh_error("mesh has no inner boundary edges");
  if (static_cast<int>(raw.size()) != 2 * n * samples_per_sector) {
    std::ostringstream os;
    os << "trace sampling mismatch: " << raw.size() << " inner edges, expected "
       << 2 * n * samples_per_sector;
    throw invalid_error(os.str());
  }
  std::sort(raw.begin(), raw.end(),
            [](const RawSample& a, const RawSample& b) { return a.rel_angle < b.rel_angle; });

  BoundaryTrace trace;
  trace.t = t;
  trace.order = n;
  trace.samples.reserve(raw.size());
  for (auto& r : raw) trace.samples.push_back(r.s);
  return trace;
}

double hadamard_derivative(const BoundaryTrace& trace, double p) {
  auto sums = sector_contributions(trace, p);
  double total = 0.0;
  for (double s : sums) total += s;
  return total;
}

std::vector<double> sector_contributions(const BoundaryTrace& trace, double p) {
  std::vector<double> sums(2 * trace.order, 0.0);
  for (const auto& s : trace.samples) {
    sums[s.sector] -= (p - 1.0) * std::pow(std::abs(s.du_dn), p) * s.eta_dot_v * s.ds;
  }
  return sums;
}

SectorDecomposition decompose_by_sectors(const BoundaryTrace& trace,
                                         const AnnularDomain& /*domain*/, double p) {
  const int n = trace.order;
  const int total_samples = static_cast<int>(trace.samples.size());
  if (total_samples % (2 * n) != 0)
    throw invalid_error("asymmetric sampling: sample count not divisible by 2n");
  const int per_sector = total_samples / (2 * n);

  SectorDecomposition out;
  out.sector_integrals = sector_contributions(trace, p);

  const double half = std::numbers::pi / n;
  double pair_sum = 0.0;
  for (const auto& pr : lemma_sector_pairs(n)) {
    const int src = pr.source;
    const int m = pr.axis_index;
    SectorPair sp;
    sp.source = src;
    sp.target = pr.target;
    sp.axis = trace.t + m * half;
    sp.min_integrand = std::numeric_limits<double>::infinity();
    // Sample idx sits at relative angle (idx + 1/2) * dphi with dphi =
    // pi/(n*per_sector); the mirror across axis index m has index
    // 2*m*per_sector - idx - 1 (mod total).
    for (int j = 0; j < per_sector; ++j) {
      int idx = src * per_sector + j;
      int mirror = ((m * per_sector * 2 - (idx + 1)) % total_samples + total_samples) %
                   total_samples;
      const auto& x = trace.samples[idx];
      const auto& xr = trace.samples[mirror];
      double diff = std::pow(std::abs(xr.du_dn), p) - std::pow(std::abs(x.du_dn), p);
      double integrand = diff * x.eta_dot_v;
      sp.min_integrand = std::min(sp.min_integrand, integrand);
      sp.value += integrand * x.ds;
    }
    pair_sum += sp.value;
    out.pairs.push_back(sp);
  }
  out.total = (p - 1.0) * pair_sum;
  return out;
}

double finite_difference_derivative(const AnnularDomain& domain, const MeshParams& mesh_params,
                                    const SolverParams& solver_params, double delta) {
  if (!(delta > 0.0)) throw invalid_error("finite difference step must be positive");
  auto lambda_at = [&](double t) {
    AnnularDomain rotated = domain.with_rotation(t);
    Mesh2D mesh = build_mesh(rotated, mesh_params);
    return solve_first_eigenpair(mesh, solver_params).lambda;
  };
  double lp = lambda_at(domain.rotation() + delta);
  double lm = lambda_at(domain.rotation() - delta);
  return (lp - lm) / (2.0 * delta);
}

DerivativeEstimate estimate_derivative(const AnnularDomain& domain, const MeshParams& mesh_params,
                                       const SolverParams& solver_params, double delta) {
  Mesh2D mesh = build_mesh(domain, mesh_params);
  FirstEigenpair pair = solve_first_eigenpair(mesh, solver_params);

  int n_inner_edges = 0;
  for (const auto& e : mesh.boundary)
    if (e.tag == BoundaryTag::Inner) ++n_inner_edges;
  int per_sector = n_inner_edges / (2 * domain.shape().order());

  BoundaryTrace trace = boundary_trace(mesh, pair, domain, per_sector);
  DerivativeEstimate est;
  est.t = domain.rotation();
  est.lambda = pair.lambda;
  est.sector_values = sector_contributions(trace, solver_params.p);
  est.hadamard = 0.0;
  for (double s : est.sector_values) est.hadamard += s;
  est.delta = delta;
  est.finite_difference =
      finite_difference_derivative(domain, mesh_params, solver_params, delta);
  return est;
}

}  // namespace pleig
