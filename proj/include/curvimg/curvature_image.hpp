#pragma once

// The curvature-image operator: form the data c * h^(p-1)/phi, solve the
// Minkowski problem for it, then translate the result so the weighted
// moment condition holds. Fixed points solve phi * h^(1-p) * f = const.

#include <Eigen/Dense>

#include "curvimg/body2d.hpp"
#include "curvimg/curvature_data.hpp"
#include "curvimg/grid.hpp"
#include "curvimg/polytope3d.hpp"

namespace curvimg {

// Admissibility cases: (1) even phi with an origin-symmetric body,
// (2) p in (-n, -n+1] with the moment condition, (3) uniform phi with the
// moment condition and p in [-n, 1).
enum class AssumptionCase { kSymmetric = 1, kLowRange = 2, kUniform = 3 };

struct OperatorConfig {
  double p = 0.0;
  Density phi;
  double closure_tol = 1e-8;
  double normalize_tol = 1e-10;
  bool unsafe = false;  // skip the assumption check (exploratory runs)
  int degree = -1;      // 2D spectral projection degree, -1 = grid/4
};

AssumptionCase check_assumption(const Body2D& k, const Density& phi, double p,
                                double closure_tol = 1e-8);
AssumptionCase check_assumption(const Polytope3D& k, const Density& phi, double p,
                                double closure_tol = 1e-8);

// Shift x* solving integral of u * (h - <x,u>)^(p-1) / phi = o; the body is
// then translated by -x*. Requires p < 1.
Eigen::VectorXd normalize_shift(const Eigen::VectorXd& h, const Density& phi, double p,
                                double tol);
Body2D normalize_translation(const Body2D& k, const Density& phi, double p,
                             double tol = 1e-10);
Polytope3D normalize_translation(const Polytope3D& k, const Density& phi, double p,
                                 double tol = 1e-10);

// Data of the image body: g = [V(K) / ((1/n) integral h^p/phi)] * h^(p-1)/phi.
CurvatureData lambda_data(const Body2D& k, const Density& phi, double p,
                          double closure_tol = 1e-8);
CurvatureData lambda_data(const Polytope3D& k, const Density& phi, double p,
                          double closure_tol = 1e-8);

// data -> solve -> normalize. In case 1 symmetry is enforced structurally.
Body2D apply(const Body2D& k, const OperatorConfig& config);
Polytope3D apply(const Polytope3D& k, const OperatorConfig& config);

// max over nodes of |phi h^(1-p) f / c - 1| with the same constant c.
double fixed_point_residual(const Body2D& k, const Density& phi, double p);
double fixed_point_residual(const Polytope3D& k, const Density& phi, double p);

}  // namespace curvimg
