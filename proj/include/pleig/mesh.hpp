// SPDX-License-Identifier: Apache-2.0
//
// Deterministic triangulation of the annular region between the obstacle
// boundary and the outer boundary, with tagged boundary loops and exact
// mesh isometries.
#ifndef PLEIG_MESH_HPP
#define PLEIG_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pleig/geometry.hpp"

namespace pleig {

enum class BoundaryTag : std::uint8_t { Outer = 0, Inner = 1 };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Outer;
};

struct Mesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary;
  std::vector<std::uint8_t> dirichlet;  // per-vertex flag

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double total_area() const;
};

struct MeshParams {
  double target_h = 0.05;
  int n_outer = 0;  // 0: derived from target_h (and rounded to a multiple of 2n)
  int n_inner = 0;
  double min_angle_deg = 20.0;
};

struct BoundaryPolylines {
  std::vector<Vec2> outer;  // closed, counterclockwise; node i at angle outer_angles[i]
  std::vector<Vec2> inner;
  std::vector<double> outer_angles;  // polar angle about the origin
  std::vector<double> inner_angles;
  bool outer_matches_inner_pattern = false;
};

/// Places N_inner nodes at angles t + j 2 pi/N_inner through f (rigidly
/// attached to the rotated obstacle) and N_outer nodes on the outer
/// boundary: uniformly in the disk's own angular parameter about its center
/// for offset disks, uniformly in the shared polar angle for concentric
/// outer boundaries.
BoundaryPolylines discretize_boundary(const AnnularDomain& domain, const MeshParams& params);

/// Structured triangulation between the two loops: log-graded rings sharing
/// the inner angular pattern, quads split to four triangles at their
/// centroids, and (for offset disks) a greedy angular zip band against the
/// outer loop. Deterministic; fails with the achieved angle if the quality
/// threshold cannot be met within the refinement budget.
Mesh2D triangulate(const AnnularDomain& domain, const BoundaryPolylines& loops,
                   const MeshParams& params);

/// discretize_boundary + triangulate with automatic refinement retries.
Mesh2D build_mesh(const AnnularDomain& domain, const MeshParams& params);

/// Vertex-wise reflection about z_alpha with triangle orientation re-fixed.
Mesh2D reflect_mesh(const Mesh2D& mesh, double alpha);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double mean_angle_deg = 0.0;
  double max_edge = 0.0;
  double min_edge = 0.0;
  int n_vertices = 0;
  int n_triangles = 0;
  int n_boundary_edges = 0;
};

MeshQuality mesh_quality(const Mesh2D& mesh);

void write_mesh(std::ostream& os, const Mesh2D& mesh);
Mesh2D read_mesh(std::istream& is);

// ---------------------------------------------------------------------------
// Point location / interpolation support

/// Uniform background grid over triangle bounding boxes for point queries.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Mesh2D& mesh);

  /// Triangle containing `p` (barycentric tolerance 1e-9), or -1.
  int locate(Vec2 p) const;

  /// P1 interpolation of a vertex field at `p`; throws if outside the mesh.
  double interpolate(const std::vector<double>& field, Vec2 p) const;

 private:
  const Mesh2D& mesh_;
  double x0_, y0_, cell_;
  int nx_, ny_;
  std::vector<std::vector<int>> bins_;
};

}  // namespace pleig

#endif
