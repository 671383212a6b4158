#pragma once

// The entropy-like functionals A_p, B_p, Omega_p attached to a weight
// density phi, the affine surface area, and the volume product. p = 0 is an
// exact branch (geometric means); p = 1 is excluded for B_p and Omega_p.

#include <Eigen/Dense>

#include "curvimg/body2d.hpp"
#include "curvimg/grid.hpp"
#include "curvimg/polytope3d.hpp"

namespace curvimg {

// Sample-level cores, shared by the 2D and 3D front ends. n = grid dim.
double a_p_from_samples(double vol, const Eigen::VectorXd& h, const Density& phi, double p);
double b_p_from_samples(double vol, const Eigen::VectorXd& f, const Density& phi, double p);
double omega_p_from_samples(const Eigen::VectorXd& f, const Density& phi, double p);

double A_p(const Body2D& k, const Density& phi, double p);
double B_p(const Body2D& k, const Density& phi, double p);
double Omega_p(const Body2D& k, const Density& phi, double p);

double A_p(const Polytope3D& k, const Density& phi, double p);
double B_p(const Polytope3D& k, const Density& phi, double p);
double Omega_p(const Polytope3D& k, const Density& phi, double p);

// Affine surface area: Omega_p at p = -n, phi uniform.
double affine_surface_area(const Body2D& k);
double affine_surface_area(const Polytope3D& k);

// V(K) * V((K - s)*), s the Santalo point.
double volume_product(const Body2D& k);
double volume_product(const Polytope3D& k);

// True when p falls in the exact p = 0 branch (|p| < 1e-9).
bool is_zero_branch(double p);

}  // namespace curvimg
