// SPDX-License-Identifier: Apache-2.0
//
// First variation of the lowest eigenvalue under rotations of the obstacle:
// the boundary-integral formula over the obstacle boundary, its sector
// decomposition, and the central finite-difference cross-check.
#ifndef PLEIG_SHAPE_DERIVATIVE_HPP
#define PLEIG_SHAPE_DERIVATIVE_HPP

#include <vector>

#include "pleig/geometry.hpp"
#include "pleig/mesh.hpp"
#include "pleig/pde.hpp"

namespace pleig {

struct TraceSample {
  double phi = 0.0;       // angular midpoint of the boundary edge
  Vec2 point;             // chord midpoint
  Vec2 normal;            // unit outward normal of the domain (into the obstacle)
  double du_dn = 0.0;     // one-sided normal derivative of the eigenfield
  double eta_dot_v = 0.0; // geometric factor of the rotation field
  double ds = 0.0;        // chord length
  int sector = 0;         // k with phi in (t + k pi/n, t + (k+1) pi/n)
};

struct BoundaryTrace {
  std::vector<TraceSample> samples;  // ordered by angle relative to the rotation
  double t = 0.0;
  int order = 0;  // symmetry order n
};

/// Samples the obstacle boundary at the mesh's inner edge midpoints. The
/// normal and the geometric factor come from the analytic curve; the normal
/// derivative is the gradient of the adjacent triangle against the normal.
/// `samples_per_sector` must match the mesh (n_inner = 2n * samples_per_sector).
BoundaryTrace boundary_trace(const Mesh2D& mesh, const FirstEigenpair& pair,
                             const AnnularDomain& domain, int samples_per_sector);

/// -(p-1) * sum |du/dn|^p <eta, v> ds over the trace.
double hadamard_derivative(const BoundaryTrace& trace, double p);

/// The 2n per-sector pieces of the same quadrature; they sum to the total.
std::vector<double> sector_contributions(const BoundaryTrace& trace, double p);

struct SectorPair {
  int source = 0;
  int target = 0;
  double axis = 0.0;
  double value = 0.0;           // integral of the paired difference over the source
  double min_integrand = 0.0;   // most negative sampled paired integrand
};

struct SectorDecomposition {
  std::vector<double> sector_integrals;  // 2n values
  std::vector<SectorPair> pairs;         // n lemma pairs
  double total = 0.0;                    // (p-1) * sum of pair values
};

/// Pairs each boundary sample with its mirror across the shared sector axis
/// and integrates the paired differences; requires the trace sampling to be
/// reflection-closed (inner node count divisible by the symmetry order).
SectorDecomposition decompose_by_sectors(const BoundaryTrace& trace, const AnnularDomain& domain,
                                         double p);

struct DerivativeEstimate {
  double t = 0.0;
  double lambda = 0.0;
  double hadamard = 0.0;
  double finite_difference = 0.0;
  double delta = 0.0;
  std::vector<double> sector_values;
};

/// Central difference (lambda(t+delta) - lambda(t-delta)) / (2 delta) with
/// both eigenvalues solved on meshes whose inner node pattern rotates
/// rigidly with the obstacle.
double finite_difference_derivative(const AnnularDomain& domain, const MeshParams& mesh_params,
                                    const SolverParams& solver_params, double delta);

/// Solves the configuration, evaluates both derivative estimates and the
/// sector split at the configuration's rotation angle.
DerivativeEstimate estimate_derivative(const AnnularDomain& domain, const MeshParams& mesh_params,
                                       const SolverParams& solver_params, double delta);

}  // namespace pleig

#endif
