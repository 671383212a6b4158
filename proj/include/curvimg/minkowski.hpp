#pragma once

// Discrete Minkowski problem: recover the convex body whose surface area
// measure matches prescribed data, unique up to translation.

#include "curvimg/body2d.hpp"
#include "curvimg/curvature_data.hpp"
#include "curvimg/polytope3d.hpp"

namespace curvimg {

// Spectral solve of h'' + h = g on the circle. The k = 1 modes of g must
// vanish (closure); the returned body has them identically zero, fixing the
// canonical translate. Exactly antipodally symmetric data keeps all odd
// modes structurally zero.
Body2D solve_2d(const CurvatureData& data, int degree = -1);

struct Solve3DOptions {
  int max_newton = 100;
  double tol = 1e-10;        // relative l2 residual on facet areas
  bool fd_jacobian = false;  // finite-difference Jacobian instead of exact
  // Optional warm start; defaults to h_i = sqrt(a_i / w_i)-style seeding.
  Eigen::VectorXd init;
};

struct Solve3DReport {
  int newton_steps = 0;
  double residual = 0.0;  // final ||A(h) - a|| / ||a||
  bool repaired = false;  // closure repair applied to the input data
};

// Damped Newton on the prescribed-areas system A_i(h) = a_i over an
// arbitrary normal set. Translations are pinned by a KKT constraint; the
// caller chooses the canonical translate afterwards.
Eigen::VectorXd solve_support_numbers(const Eigen::MatrixXd& normals,
                                      const Eigen::VectorXd& target_areas,
                                      const Solve3DOptions& opt = {},
                                      Solve3DReport* report = nullptr);

// Grid frontend: targets a_i = g_i w_i, canonical translate (vertex centroid
// at the origin).
Polytope3D solve_3d(const CurvatureData& data, const Solve3DOptions& opt = {},
                    Solve3DReport* report = nullptr);

}  // namespace curvimg
