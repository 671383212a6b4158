#pragma once

// Incremental 3D convex hull (quickhull) with epsilon tie-breaking.
// Serves dual-hull reconstruction and polar volumes; not a general-purpose
// exact-predicate hull.

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace curvimg {

struct Hull3D {
  std::vector<Eigen::Vector3d> points;       // the input set
  std::vector<std::array<int, 3>> facets;    // outward-oriented triangles
  Eigen::Vector3d interior = Eigen::Vector3d::Zero();

  double volume() const;
  // True when p lies inside or on the hull (within eps slack).
  bool contains(const Eigen::Vector3d& p, double eps) const;
};

Hull3D convex_hull(const std::vector<Eigen::Vector3d>& points);

}  // namespace curvimg
