#pragma once

// 3D convex bodies via support numbers over a fixed normal grid. The body is
// the halfspace intersection {x : <x,u_i> <= h_i}; vertices, facet areas and
// volume come from the dual hull of {u_i/h_i}.

#include <Eigen/Dense>
#include <vector>

#include "curvimg/grid.hpp"

namespace curvimg {

// Geometry of a halfspace intersection over an arbitrary normal set. The
// Minkowski solver works on this directly, so it is not tied to SphereGrid.
struct SupportGeometry {
  std::vector<Eigen::Vector3d> vertices;  // primal vertices, original frame
  std::vector<std::vector<int>> cycles;   // per normal: angle-ordered vertex
                                          // ids; empty when inactive
  Eigen::VectorXd areas;                  // per normal, 0 when inactive
  double volume = 0.0;
  Eigen::Vector3d interior = Eigen::Vector3d::Zero();  // shift point used

  struct Edge {
    int i, j;       // adjacent facet (normal) indices
    double length;  // shared edge length
  };
  std::vector<Edge> edges;
};

// normals: m x 3 with unit rows, m >= 4. Throws GeometryError when the
// intersection is unbounded or has empty interior.
SupportGeometry support_geometry(const Eigen::MatrixXd& normals,
                                 const Eigen::VectorXd& h);

// Exact facet-area derivative dA_i/dh_j from edge lengths and normal angles:
// l_ij/sin(theta_ij) off-diagonal, -sum l_ij*cot(theta_ij) on the diagonal.
// Symmetric; its kernel contains the three translation vectors (<t,u_i>)_i.
Eigen::MatrixXd area_jacobian(const Eigen::MatrixXd& normals,
                              const SupportGeometry& geo);

class Polytope3D {
 public:
  Polytope3D(GridPtr grid, Eigen::VectorXd h);

  const GridPtr& grid_ptr() const { return grid_; }
  const SphereGrid& grid() const { return *grid_; }
  const Eigen::VectorXd& support_numbers() const { return h_; }
  const Eigen::VectorXd& facet_areas() const { return geo_.areas; }
  const std::vector<Eigen::Vector3d>& vertices() const { return geo_.vertices; }
  const std::vector<std::vector<int>>& facet_cycles() const { return geo_.cycles; }
  const SupportGeometry& geometry() const { return geo_; }

  double volume() const { return geo_.volume; }
  int active_count() const;
  // Discrete curvature function samples f_i = A_i / w_i (zero when inactive).
  Eigen::VectorXd curvature_samples() const;

  double support_eval(const Eigen::Vector3d& v) const;
  double min_support() const { return h_.minCoeff(); }
  bool origin_interior() const { return h_.minCoeff() > 0.0; }
  // Exact antipodal equality of the support numbers.
  bool origin_symmetric() const;

  // | sum A_i u_i |, the closedness defect of the discrete area measure.
  double closedness_defect() const;

 private:
  GridPtr grid_;
  Eigen::VectorXd h_;
  SupportGeometry geo_;
};

Polytope3D make_ball3(GridPtr grid, double radius = 1.0);

// Axis-aligned cube [-half,half]^3: support numbers half on the +-e_j nodes
// and a large inactive slack elsewhere. Requires the grid to contain the
// coordinate axes (icosphere grids do).
Polytope3D make_cube3(GridPtr grid, double half = 1.0);

// Smooth random body: h = 1 + amplitude * (quadratic + cubic harmonics),
// convex-safe for amplitude <= 0.25. even_only drops the odd part.
Polytope3D random_polytope(GridPtr grid, unsigned seed, double amplitude = 0.2,
                           bool even_only = false);

double volume(const Polytope3D& p);

// V_1(K,L) = (1/3) sum h_L(u_i) A_i(K) on the stored support numbers.
double mixed_volume(const Polytope3D& k, const Polytope3D& l);

// Volume of conv{u_i/h_i}. Requires the origin strictly interior.
double polar_volume(const Polytope3D& p);

Eigen::Vector3d santalo_point(const Polytope3D& p);

// K + x: support numbers h_i + <x,u_i>.
Polytope3D translate(const Polytope3D& p, const Eigen::Vector3d& x);

// Pairwise antipodal average of the support numbers; origin-symmetric output.
Polytope3D symmetrize(const Polytope3D& p);

// Support-grid surrogate max_i |h_i - h'_i|.
double hausdorff(const Polytope3D& a, const Polytope3D& b);

}  // namespace curvimg
