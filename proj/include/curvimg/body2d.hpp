#pragma once

// Planar convex bodies represented by truncated Fourier support functions
//   h(t) = a_0 + sum_k a_k cos(kt) + b_k sin(kt).
// The curvature function is h + h'' and is evaluated spectrally, so the
// Minkowski relations between h and f are exact per mode.

#include <Eigen/Dense>
#include <cstdint>

#include "curvimg/grid.hpp"

namespace curvimg {

class Body2D {
 public:
  static constexpr int kDim = 2;
  using Point = Eigen::Vector2d;

  // Coefficient vectors indexed by mode: cos_coef[0] = a_0, sin_coef[0] unused.
  Body2D(GridPtr grid, Eigen::VectorXd cos_coef, Eigen::VectorXd sin_coef);

  int degree() const { return static_cast<int>(cos_.size()) - 1; }
  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& cos_coef() const { return cos_; }
  const Eigen::VectorXd& sin_coef() const { return sin_; }

  const Eigen::VectorXd& support_samples() const { return h_; }
  const Eigen::VectorXd& curvature_samples() const { return f_; }

  double min_support() const { return h_.minCoeff(); }
  double min_curvature() const { return f_.minCoeff(); }
  bool origin_interior() const { return min_support() > 0; }
  // Structural origin symmetry: every odd-mode coefficient is exactly zero.
  bool origin_symmetric() const;

  double support_at(double theta) const;
  double support_derivative_at(double theta) const;
  // Boundary point x(t) = h*u + h'*u_perp.
  Point boundary_point(double theta) const;

 private:
  GridPtr grid_;
  Eigen::VectorXd cos_, sin_;
  Eigen::VectorXd h_, f_;
};

Body2D make_disk(GridPtr grid, double radius);
Body2D make_ellipse(GridPtr grid, double semi_a, double semi_b);
// Fourier projection of support samples to the given degree (default M/4).
Body2D body_from_support_samples(GridPtr grid, const Eigen::VectorXd& h, int degree = -1);

// Seeded generator: h = 1 + perturbation of modes 2..degree with k^-3 decay,
// rescaled so that min f >= 0.1. amplitude must be < 1.
Body2D random_body(GridPtr grid, std::uint64_t seed, int degree, double amplitude,
                   bool even_only = false);

Eigen::VectorXd curvature_fn(const Body2D& body);
double volume(const Body2D& body);
double mixed_volume(const Body2D& k, const Body2D& l); // V_1(K, L)
double polar_volume(const Body2D& body);
Body2D translate(const Body2D& body, const Eigen::Vector2d& shift); // K + shift
Eigen::Vector2d santalo_point(const Body2D& body);
double hausdorff(const Body2D& k, const Body2D& l);
// Odd-mode projection onto the origin-symmetric class.
Body2D symmetrize(const Body2D& body);

// Interior point that always exists for valid bodies (the first harmonics).
Eigen::Vector2d steiner_point(const Body2D& body);

}  // namespace curvimg
