// SPDX-License-Identifier: Apache-2.0
//
// P1 finite elements for the Dirichlet p-Laplacian on a triangulated
// domain: energies, norms, the regularized inner minimization, the inverse
// power iteration for the first eigenpair, and the linear (p = 2) pair of
// smallest eigenpairs.
#ifndef PLEIG_PDE_HPP
#define PLEIG_PDE_HPP

#include <vector>

#include "pleig/mesh.hpp"

namespace pleig {

/// One value per mesh vertex; Dirichlet vertices are pinned to zero.
using DiscreteField = std::vector<double>;

struct SolverParams {
  double p = 2.0;             // exponent, 1 < p < inf (validated range [1.2, 6])
  double outer_tol = 1e-9;    // relative lambda change between outer iterations
  double inner_tol = 1e-10;   // gradient norm for the inner minimization
  int max_outer = 300;
  int max_inner = 80;
  double epsilon = -1.0;      // Hessian regularization; < 0 selects 1e-8 * diam
  unsigned seed = 0;          // reserved; the default pipelines are deterministic
};

struct FirstEigenpair {
  double lambda = 0.0;
  DiscreteField u;   // positive in the interior, unit p-norm
  int iterations = 0;
  double residual = 0.0;  // relative weak-form residual at exit
};

struct LinearEigenpairs {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;  // next value, reported to expose a degenerate lambda2
  DiscreteField u1, u2, u3;
  double gap = 0.0;       // lambda2 - lambda1
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// Sum over triangles of |grad u|^p * area; exact for P1 fields.
double p_dirichlet_energy(const Mesh2D& mesh, const DiscreteField& u, double p);

/// (integral of |u|^p)^{1/p} by a 6-point order-4 rule per triangle.
double p_norm(const Mesh2D& mesh, const DiscreteField& u, double p);

double rayleigh_quotient(const Mesh2D& mesh, const DiscreteField& u, double p);

/// Minimizes (1/p) * p_dirichlet_energy(w) - integral(source * w) over fields
/// vanishing on the boundary, by damped Newton with the regularization
/// applied inside the Hessian only. For p = 2 this is a single sparse solve.
DiscreteField inner_solve(const Mesh2D& mesh, const DiscreteField& source, double p,
                          const SolverParams& params);

/// Inverse power iteration from the normalized interior indicator.
FirstEigenpair solve_first_eigenpair(const Mesh2D& mesh, const SolverParams& params);

/// The two smallest eigenpairs of the p = 2 generalized problem by
/// shift-invert subspace iteration with deterministic seeding; `count`
/// must be 2.
LinearEigenpairs solve_linear_eigenpairs(const Mesh2D& mesh, int count);

}  // namespace pleig

#endif
