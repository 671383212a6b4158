#pragma once

// Prescribed curvature data: positive density g against spherical Lebesgue
// measure, subject to the closure condition |integral of g*u| <= closure_tol.

#include <Eigen/Dense>

#include "curvimg/grid.hpp"

namespace curvimg {

struct CurvatureData {
  GridPtr grid;
  Eigen::VectorXd g;           // density samples, > 0
  double closure_tol = 1e-8;
  bool repaired = false;       // small closure violation projected out

  // Discrete facet areas a_i = g_i * w_i (the 3D solver's target).
  Eigen::VectorXd areas() const { return g.cwiseProduct(grid->weights); }
};

// Validates positivity and closure. Violations below 10*closure_tol are
// repaired by the linear tilt g <- g*(1 + <beta,u>); larger ones throw.
CurvatureData make_curvature_data(GridPtr grid, Eigen::VectorXd g,
                                  double closure_tol = 1e-8);

}  // namespace curvimg
