// SPDX-License-Identifier: Apache-2.0
//
// Rotation sweeps of the lowest eigenvalue, the periodicity/evenness/
// critical-point property checks on isometric image meshes, the
// eigenfunction comparison across sector reflections, and the concentric
// two-obstacle variant.
#ifndef PLEIG_SWEEP_HPP
#define PLEIG_SWEEP_HPP

#include <functional>
#include <string>
#include <vector>

#include "pleig/geometry.hpp"
#include "pleig/mesh.hpp"
#include "pleig/pde.hpp"
#include "pleig/shape_derivative.hpp"

namespace pleig {

struct SweepPoint {
  double t = 0.0;
  double lambda1 = 0.0;
  Phase phase = Phase::Generic;
  double dlambda_hadamard = 0.0;
  double dlambda_fd = 0.0;  // NaN unless requested
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> sector_values;
};

struct SweepOptions {
  bool with_hadamard = true;
  bool with_fd = false;      // two extra eigensolves per grid point
  double fd_delta = 0.0;     // 0: 1e-3 * (pi/n)
  int threads = 1;
};

struct SweepResult {
  std::string description;
  std::vector<SweepPoint> points;
  double solver_tol = 0.0;  // relative lambda tolerance used for every point
};

/// Solves the eigenproblem for every rotation angle in `grid` on meshes with
/// the inner node pattern rigidly attached to the obstacle. Points run on a
/// bounded worker pool; results are merged in grid order.
SweepResult sweep_lambda1(const AnnularDomain& domain, const std::vector<double>& grid,
                          const MeshParams& mesh_params, const SolverParams& solver_params,
                          const SweepOptions& options);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_pass() const;
};

/// Periodicity and evenness residuals on image meshes, critical-point
/// derivatives against the supplied noise floor, and the monotone chain
/// across the swept interval. The strictness requirement follows the
/// exponent: strict gaps for p > 3/2, non-decrease otherwise.
PropertyReport verify_properties(const SweepResult& result, const AnnularDomain& domain,
                                 const MeshParams& mesh_params, const SolverParams& solver_params,
                                 double noise_floor);

/// Largest |Hadamard derivative| over a short concentric control sweep at
/// the same resolution; calibrates every zero-claim about derivatives.
double derivative_noise_floor(const AnnularDomain& domain, const MeshParams& mesh_params,
                              const SolverParams& solver_params);

struct ComparisonReport {
  struct PairResult {
    int source = 0;
    int target = 0;
    double axis = 0.0;
    double min_interior_difference = 0.0;   // min of v - u over interior samples
    double max_normal_difference = 0.0;     // max of dv/dn - du/dn over the source trace
    int interior_samples = 0;
  };
  std::vector<PairResult> pairs;
  double min_interior_difference() const;
  double max_normal_difference() const;
};

/// Proposition-style eigenfunction comparison: v(x) = u(reflection of x)
/// against u on every lemma source sector, sampled on an interior polar
/// grid plus the boundary trace.
ComparisonReport verify_eigenfunction_comparison(const AnnularDomain& domain,
                                                 const FirstEigenpair& pair, const Mesh2D& mesh,
                                                 int samples_per_sector);

/// Remark-style concentric variant: the outer boundary is a dihedral curve
/// instead of a disk and the inner obstacle rotates within it.
SweepResult sweep_concentric_pair(const DihedralShape& outer_shape,
                                  const DihedralShape& inner_shape,
                                  const std::vector<double>& grid, const MeshParams& mesh_params,
                                  const SolverParams& solver_params, const SweepOptions& options);

}  // namespace pleig

#endif
