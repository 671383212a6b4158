#pragma once

// Quadrature grids on S^1 and S^2, and densities sampled on them.
// All integrals elsewhere in the library reduce to weighted sums over a grid.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "curvimg/errors.hpp"

namespace curvimg {

struct SphereGrid {
  int dim = 2;               // ambient dimension n (node space), 2 or 3
  Eigen::MatrixXd nodes;     // count x dim, unit rows
  Eigen::VectorXd weights;   // positive, sums to |S^{n-1}|
  Eigen::VectorXd theta;     // dim==2: node angles 2*pi*k/M
  std::vector<int> antipode; // index of the exact antipodal node, or -1

  // Icosphere triangulation, kept for S^2 grids (vertex index triples).
  std::vector<std::array<int, 3>> faces;

  int count() const { return static_cast<int>(nodes.rows()); }
  double sphere_measure() const;

  // Structural compatibility: same dim, same node set.
  bool same_as(const SphereGrid& other) const;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Uniform angular grid on S^1 with M nodes (M even keeps antipodal pairs exact).
GridPtr make_circle_grid(int node_count);

// Subdivided-icosahedron nodes with spherical-Voronoi-cell weights.
// level 0 -> 12 nodes, 1 -> 42, 2 -> 162, 3 -> 642, 4 -> 2562.
GridPtr make_icosphere_grid(int level);

// resolution: node count for dim 2; node count (10*4^l+2) or level (<12) for dim 3.
GridPtr make_sphere_grid(int dim, int resolution);

double integrate(const Eigen::VectorXd& samples, const SphereGrid& grid);

// Sum of w_i * s_i * u_i, accumulated over antipodal pairs so that even
// samples cancel exactly.
Eigen::VectorXd vector_moment(const Eigen::VectorXd& samples, const SphereGrid& grid);

struct Density {
  GridPtr grid;
  Eigen::VectorXd values; // > 0
  bool even = false;

  const SphereGrid& g() const { return *grid; }
};

Density make_uniform_density(GridPtr grid, double value = 1.0);

// Samples fn(u) at the nodes. Evenness is detected by comparing antipodal
// samples; near-even samples are symmetrized so the flag is exact.
Density make_density(GridPtr grid, const std::function<double(const Eigen::VectorXd&)>& fn);

Density make_density_from_samples(GridPtr grid, Eigen::VectorXd samples);

}  // namespace curvimg
