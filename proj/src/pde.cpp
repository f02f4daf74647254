// SPDX-License-Identifier: Apache-2.0
#include "pleig/pde.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pleig/errors.hpp"

namespace pleig {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// 6-point order-4 quadrature on the reference triangle (barycentric).
struct QuadPoint {
  double l0, l1, l2, w;
};
constexpr QuadPoint kQuad6[6] = {
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
};

// Per-mesh assembly cache: P1 basis gradients, areas, interior dof map.
struct P1Space {
  const Mesh2D& mesh;
  std::vector<double> area;
  std::vector<std::array<Vec2, 3>> grad;  // gradient of each local basis
  std::vector<int> dof;                   // vertex -> interior index, -1 on Dirichlet
  std::vector<int> vertex;                // interior index -> vertex
  int n_dof = 0;

  explicit P1Space(const Mesh2D& m) : mesh(m) {
    const int nt = m.n_triangles();
    area.resize(nt);
    grad.resize(nt);
    for (int t = 0; t < nt; ++t) {
      const auto& tri = m.triangles[t];
      Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
      double a2 = (b - a).cross(c - a);
      if (!(a2 > 0.0)) throw mesh_error("triangle with non-positive area in assembly");
      area[t] = 0.5 * a2;
      grad[t][0] = Vec2{b.y - c.y, c.x - b.x} * (1.0 / a2);
      grad[t][1] = Vec2{c.y - a.y, a.x - c.x} * (1.0 / a2);
      grad[t][2] = Vec2{a.y - b.y, b.x - a.x} * (1.0 / a2);
    }
    dof.assign(m.n_vertices(), -1);
    for (int v = 0; v < m.n_vertices(); ++v) {
      if (!m.dirichlet[v]) {
        dof[v] = n_dof++;
        vertex.push_back(v);
      }
    }
    if (n_dof == 0) throw mesh_error("mesh has no interior vertices");
  }

  Vec2 field_gradient(const DiscreteField& u, int t) const {
    const auto& tri = mesh.triangles[t];
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 3; ++i) g = g + grad[t][i] * u[tri[i]];
    return g;
  }

  SpMat stiffness() const {
    std::vector<Triplet> trip;
    trip.reserve(mesh.n_triangles() * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int di = dof[tri[i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          int dj = dof[tri[j]];
          if (dj < 0) continue;
          trip.emplace_back(di, dj, area[t] * grad[t][i].dot(grad[t][j]));
        }
      }
    }
    SpMat K(n_dof, n_dof);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  }

  SpMat mass() const {
    std::vector<Triplet> trip;
    trip.reserve(mesh.n_triangles() * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int di = dof[tri[i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          int dj = dof[tri[j]];
          if (dj < 0) continue;
          trip.emplace_back(di, dj, area[t] / 12.0 * (i == j ? 2.0 : 1.0));
        }
      }
    }
    SpMat M(n_dof, n_dof);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
  }

  // Consistent load vector of a P1 source: f_i = integral(source * phi_i).
  Eigen::VectorXd load(const DiscreteField& source) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n_dof);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int di = dof[tri[i]];
        if (di < 0) continue;
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += (i == j ? 2.0 : 1.0) * source[tri[j]];
        f[di] += area[t] / 12.0 * s;
      }
    }
    return f;
  }

  DiscreteField to_field(const Eigen::VectorXd& x) const {
    DiscreteField u(mesh.n_vertices(), 0.0);
    for (int k = 0; k < n_dof; ++k) u[vertex[k]] = x[k];
    return u;
  }

  Eigen::VectorXd to_vector(const DiscreteField& u) const {
    Eigen::VectorXd x(n_dof);
    for (int k = 0; k < n_dof; ++k) x[k] = u[vertex[k]];
    return x;
  }

  double diameter() const {
    double x1 = 1e300, y1 = 1e300, x2 = -1e300, y2 = -1e300;
    for (const auto& v : mesh.vertices) {
      x1 = std::min(x1, v.x);
      y1 = std::min(y1, v.y);
      x2 = std::max(x2, v.x);
      y2 = std::max(y2, v.y);
    }
    return std::hypot(x2 - x1, y2 - y1);
  }
};

void check_field_size(const Mesh2D& mesh, const DiscreteField& u) {
  if (static_cast<int>(u.size()) != mesh.n_vertices())
    throw invalid_error("field size does not match the mesh vertex count");
}

void check_exponent(double p) {
  if (!(p > 1.0)) throw invalid_error("exponent must satisfy p > 1");
}

// Energy of the inner objective: (1/p) sum A_T |grad w|^p - f^T w.
double inner_objective(const P1Space& space, const DiscreteField& w_full,
                       const Eigen::VectorXd& w, const Eigen::VectorXd& f, double p) {
  double e = 0.0;
  for (int t = 0; t < space.mesh.n_triangles(); ++t) {
    Vec2 g = space.field_gradient(w_full, t);
    e += space.area[t] * std::pow(g.dot(g), 0.5 * p);
  }
  return e / p - f.dot(w);
}

// Newton minimization of the regularized inner objective. The returned field
// satisfies the unregularized optimality system to `tol` in the l2 norm.
DiscreteField newton_inner_solve(const P1Space& space, const Eigen::VectorXd& f, double p,
                                 double epsilon, double tol, int max_iter,
                                 const DiscreteField* warm_start) {
  const Mesh2D& mesh = space.mesh;
  DiscreteField w_full(mesh.n_vertices(), 0.0);
  if (warm_start) w_full = *warm_start;
  Eigen::VectorXd w = space.to_vector(w_full);

  Eigen::SimplicialLDLT<SpMat> solver;
  bool analyzed = false;
  const double fscale = std::max(1.0, f.norm());
  const double eps2 = epsilon * epsilon;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Gradient of the (unregularized) objective.
    Eigen::VectorXd r = -f;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      Vec2 g = space.field_gradient(w_full, t);
      double g2 = g.dot(g);
      if (g2 == 0.0) continue;
      double coef = space.area[t] * std::pow(g2, 0.5 * p - 1.0);
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int di = space.dof[tri[i]];
        if (di >= 0) r[di] += coef * g.dot(space.grad[t][i]);
      }
    }
    if (r.norm() <= tol * fscale) return w_full;

    // Regularized Hessian: |grad w|^2 -> |grad w|^2 + eps^2.
    std::vector<Triplet> trip;
    trip.reserve(mesh.n_triangles() * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      Vec2 g = space.field_gradient(w_full, t);
      double q = g.dot(g) + eps2;
      double c1 = space.area[t] * std::pow(q, 0.5 * p - 1.0);
      double c2 = space.area[t] * (p - 2.0) * std::pow(q, 0.5 * p - 2.0);
      const auto& tri = mesh.triangles[t];
      for (int i = 0; i < 3; ++i) {
        int di = space.dof[tri[i]];
        if (di < 0) continue;
        double gi = g.dot(space.grad[t][i]);
        for (int j = 0; j < 3; ++j) {
          int dj = space.dof[tri[j]];
          if (dj < 0) continue;
          double gj = g.dot(space.grad[t][j]);
          trip.emplace_back(di, dj, c1 * space.grad[t][i].dot(space.grad[t][j]) + c2 * gi * gj);
        }
      }
    }
    SpMat H(space.n_dof, space.n_dof);
    H.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      solver.analyzePattern(H);
      analyzed = true;
    }
    solver.factorize(H);
    if (solver.info() != Eigen::Success)
      throw solver_error("inner solve: Hessian factorization failed");
    Eigen::VectorXd d = solver.solve(-r);

    // Backtracking line search (Armijo).
    double f0 = inner_objective(space, w_full, w, f, p);
    double slope = r.dot(d);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd w_try = w + step * d;
      DiscreteField w_try_full = space.to_field(w_try);
      double f1 = inner_objective(space, w_try_full, w_try, f, p);
      if (f1 <= f0 + 1e-4 * step * slope) {
        w = w_try;
        w_full = std::move(w_try_full);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Flat to rounding; treat as converged if the residual is small.
      if (r.norm() <= 1e3 * tol * fscale) return w_full;
      std::ostringstream os;
      os << "inner solve: line search failed at residual " << r.norm();
      throw solver_error(os.str());
    }
  }
  std::ostringstream os;
  os << "inner solve: no convergence within " << max_iter << " Newton steps";
  throw solver_error(os.str());
}

double weak_residual(const P1Space& space, const DiscreteField& u, double lambda, double p) {
  // || grad E_p(u) - lambda * M |u|^{p-2}u || / (lambda * ||M s||)
  Eigen::VectorXd r = Eigen::VectorXd::Zero(space.n_dof);
  for (int t = 0; t < space.mesh.n_triangles(); ++t) {
    Vec2 g = space.field_gradient(u, t);
    double g2 = g.dot(g);
    if (g2 == 0.0) continue;
    double coef = space.area[t] * std::pow(g2, 0.5 * p - 1.0);
    const auto& tri = space.mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      int di = space.dof[tri[i]];
      if (di >= 0) r[di] += coef * g.dot(space.grad[t][i]);
    }
  }
  DiscreteField s(u.size());
  for (size_t i = 0; i < u.size(); ++i)
    s[i] = std::pow(std::abs(u[i]), p - 2.0) * u[i];
  Eigen::VectorXd ms = space.load(s);
  double denom = std::max(1e-300, lambda * ms.norm());
  return (r - lambda * ms).norm() / denom;
}

}  // namespace

// ---------------------------------------------------------------------------

double p_dirichlet_energy(const Mesh2D& mesh, const DiscreteField& u, double p) {
  check_field_size(mesh, u);
  check_exponent(p);
  P1Space space(mesh);
  double e = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    Vec2 g = space.field_gradient(u, t);
    e += space.area[t] * std::pow(g.dot(g), 0.5 * p);
  }
  return e;
}

double p_norm(const Mesh2D& mesh, const DiscreteField& u, double p) {
  check_field_size(mesh, u);
  check_exponent(p);
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double u0 = u[tri[0]], u1 = u[tri[1]], u2 = u[tri[2]];
    double area = mesh.triangle_area(t);
    double acc = 0.0;
    for (const auto& q : kQuad6) {
      double v = q.l0 * u0 + q.l1 * u1 + q.l2 * u2;
      acc += q.w * std::pow(std::abs(v), p);
    }
    s += area * acc;
  }
  return std::pow(s, 1.0 / p);
}

double rayleigh_quotient(const Mesh2D& mesh, const DiscreteField& u, double p) {
  double norm = p_norm(mesh, u, p);
  if (!(norm > 0.0)) throw invalid_error("Rayleigh quotient of the zero field");
  return p_dirichlet_energy(mesh, u, p) / std::pow(norm, p);
}

DiscreteField inner_solve(const Mesh2D& mesh, const DiscreteField& source, double p,
                          const SolverParams& params) {
  check_field_size(mesh, source);
  check_exponent(p);
  P1Space space(mesh);
  Eigen::VectorXd f = space.load(source);
  if (p == 2.0) {
    Eigen::SimplicialLDLT<SpMat> solver;
    solver.compute(space.stiffness());
    if (solver.info() != Eigen::Success) throw solver_error("stiffness factorization failed");
    return space.to_field(solver.solve(f));
  }
  double eps = params.epsilon >= 0.0 ? params.epsilon : 1e-8 * space.diameter();
  return newton_inner_solve(space, f, p, eps, params.inner_tol, params.max_inner, nullptr);
}

FirstEigenpair solve_first_eigenpair(const Mesh2D& mesh, const SolverParams& params) {
  check_exponent(params.p);
  if (!(params.outer_tol > 0.0) || !(params.inner_tol > 0.0))
    throw invalid_error("solver tolerances must be positive");
  const double p = params.p;
  P1Space space(mesh);
  const double eps = params.epsilon >= 0.0 ? params.epsilon : 1e-8 * space.diameter();

  // p = 2 reuses one stiffness factorization across all outer iterations.
  Eigen::SimplicialLDLT<SpMat> linear_solver;
  if (p == 2.0) {
    linear_solver.compute(space.stiffness());
    if (linear_solver.info() != Eigen::Success)
      throw solver_error("stiffness factorization failed");
  }

  // Deterministic symmetric start: the interior indicator, unit p-norm.
  DiscreteField u(mesh.n_vertices(), 0.0);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (!mesh.dirichlet[v]) u[v] = 1.0;
  double nrm = p_norm(mesh, u, p);
  for (auto& x : u) x /= nrm;

  double lambda = rayleigh_quotient(mesh, u, p);
  int iter = 0;
  for (; iter < params.max_outer; ++iter) {
    DiscreteField source(u.size());
    for (size_t i = 0; i < u.size(); ++i)
      source[i] = std::pow(std::abs(u[i]), p - 2.0) * u[i];
    Eigen::VectorXd f = space.load(source);

    DiscreteField w;
    if (p == 2.0) {
      w = space.to_field(linear_solver.solve(f));
    } else {
      // Warm start from the current iterate scaled to the expected fixed point.
      DiscreteField warm = u;
      double scale = std::pow(lambda, -1.0 / (p - 1.0));
      for (auto& x : warm) x *= scale;
      w = newton_inner_solve(space, f, p, eps, params.inner_tol, params.max_inner, &warm);
    }

    double wn = p_norm(mesh, w, p);
    if (!(wn > 0.0)) throw solver_error("inverse iteration collapsed to zero");
    for (auto& x : w) x /= wn;

    double min_interior = 1e300;
    for (int v = 0; v < mesh.n_vertices(); ++v)
      if (!mesh.dirichlet[v]) min_interior = std::min(min_interior, w[v]);
    if (!(min_interior > 0.0))
      throw solver_error("inverse iteration lost interior positivity");

    double lambda_new = rayleigh_quotient(mesh, w, p);
    if (lambda_new > lambda * (1.0 + 1e-12) + 1e-14)
      throw solver_error("Rayleigh quotient increased across an inverse-power step");
    u = std::move(w);
    bool converged = std::abs(lambda - lambda_new) <= params.outer_tol * std::abs(lambda_new);
    lambda = lambda_new;
    if (converged) {
      ++iter;
      break;
    }
  }
  if (iter >= params.max_outer)
    throw solver_error("inverse power iteration: outer budget exhausted");

  FirstEigenpair pair;
  pair.lambda = lambda;
  pair.u = std::move(u);
  pair.iterations = iter;
  pair.residual = weak_residual(space, pair.u, lambda, p);
  return pair;
}

// ---------------------------------------------------------------------------

LinearEigenpairs solve_linear_eigenpairs(const Mesh2D& mesh, int count) {
  if (count != 2) throw invalid_error("solve_linear_eigenpairs supports count = 2");
  P1Space space(mesh);
  SpMat K = space.stiffness();
  SpMat M = space.mass();
  Eigen::SimplicialLDLT<SpMat> solver;
  solver.compute(K);
  if (solver.info() != Eigen::Success) throw solver_error("stiffness factorization failed");

  const int nd = space.n_dof;
  const int block = std::min(nd, 5);
  Eigen::MatrixXd X(nd, block);
  // Deterministic polynomial seed fields on the interior vertices.
  for (int k = 0; k < nd; ++k) {
    Vec2 v = mesh.vertices[space.vertex[k]];
    X(k, 0) = 1.0;
    if (block > 1) X(k, 1) = v.x;
    if (block > 2) X(k, 2) = v.y;
    if (block > 3) X(k, 3) = v.x * v.y;
    if (block > 4) X(k, 4) = v.x * v.x - v.y * v.y;
  }

  auto m_orthonormalize = [&](Eigen::MatrixXd& Y) {
    for (int j = 0; j < Y.cols(); ++j) {
      for (int i = 0; i < j; ++i) {
        double proj = Y.col(i).dot(M * Y.col(j));
        Y.col(j) -= proj * Y.col(i);
      }
      double nn = std::sqrt(Y.col(j).dot(M * Y.col(j)));
      if (!(nn > 1e-300)) throw solver_error("subspace iteration produced a degenerate block");
      Y.col(j) /= nn;
    }
  };

  m_orthonormalize(X);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(block);
  const int max_sweeps = 500;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Eigen::MatrixXd Y(nd, block);
    for (int j = 0; j < block; ++j) Y.col(j) = solver.solve(M * X.col(j));
    m_orthonormalize(Y);
    Eigen::MatrixXd A(block, block);
    for (int i = 0; i < block; ++i)
      for (int j = 0; j < block; ++j) A(i, j) = Y.col(i).dot(K * Y.col(j));
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    X = Y * es.eigenvectors();
    values = es.eigenvalues();

    // Residual check on the two requested pairs.
    bool ok = true;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd mu = M * X.col(j);
      double res = (K * X.col(j) - values[j] * mu).norm() / mu.norm();
      if (res > 1e-8) ok = false;
    }
    if (ok) break;
  }
  if (sweep >= max_sweeps) throw solver_error("subspace iteration: no convergence");

  LinearEigenpairs out;
  out.lambda1 = values[0];
  out.lambda2 = values[1];
  out.lambda3 = block > 2 ? values[2] : values[1];
  out.gap = values[1] - values[0];
  if (out.gap < 1e-10)
    throw solver_error("first eigenvalue appears degenerate (gap below 1e-10)");

  auto sign_fix = [&](Eigen::VectorXd v, bool positive_mean) {
    if (positive_mean) {
      if (v.sum() < 0.0) v = -v;
    } else {
      for (int k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) > 1e-12) {
          if (v[k] < 0.0) v = -v;
          break;
        }
      }
    }
    return v;
  };
  out.u1 = space.to_field(sign_fix(X.col(0), true));
  out.u2 = space.to_field(sign_fix(X.col(1), false));
  out.u3 = space.to_field(sign_fix(X.col(block > 2 ? 2 : 1), false));
  {
    Eigen::VectorXd x0 = space.to_vector(out.u1);
    Eigen::VectorXd x1 = space.to_vector(out.u2);
    Eigen::VectorXd m0 = M * x0, m1 = M * x1;
    out.residual1 = (K * x0 - out.lambda1 * m0).norm() / m0.norm();
    out.residual2 = (K * x1 - out.lambda2 * m1).norm() / m1.norm();
  }
  return out;
}

}  // namespace pleig
