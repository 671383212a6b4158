#include "curvimg/minkowski.hpp"

#include <cmath>
#include <numbers>

#include "curvimg/errors.hpp"

namespace curvimg {

Body2D solve_2d(const CurvatureData& data, int degree) {
  const SphereGrid& grid = *data.grid;
  if (grid.dim != 2) throw DimensionError("solve_2d needs a circle grid");
  const int m = grid.count();
  if (degree < 0) degree = m / 4;
  if (2 * degree >= m) throw DimensionError("solve degree too high for grid");
  if (data.g.minCoeff() <= 0) throw GeometryError("curvature data must be positive");

  bool even_data = !grid.antipode.empty();
  for (int j = 0; even_data && j < m; ++j)
    if (data.g[j] != data.g[grid.antipode[j]]) even_data = false;

  // Fourier analysis of g; division by (1 - k^2) inverts h'' + h mode-wise.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(degree + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(degree + 1);
  double c1 = 0, d1 = 0;
  for (int j = 0; j < m; ++j) {
    double ck = 1.0, sk = 0.0;
    const double c = grid.nodes(j, 0), s = grid.nodes(j, 1);
    a[0] += data.g[j];
    for (int k = 1; k <= degree; ++k) {
      const double cn = ck * c - sk * s;
      sk = sk * c + ck * s;
      ck = cn;
      if (k == 1) {
        c1 += data.g[j] * ck;
        d1 += data.g[j] * sk;
        continue;
      }
      if (even_data && (k % 2 != 0)) continue;
      a[k] += data.g[j] / (1.0 - double(k) * double(k)) * ck;
      b[k] += data.g[j] / (1.0 - double(k) * double(k)) * sk;
    }
  }
  a[0] /= m;
  a.tail(degree) *= 2.0 / m;
  b.tail(degree) *= 2.0 / m;

  // first-harmonic content of g measured as the moment integral pi*(c1,d1)
  const double closure =
      std::numbers::pi * std::hypot(c1 * 2.0 / m, d1 * 2.0 / m);
  if (closure > data.closure_tol)
    throw GeometryError("solve_2d: data violates closure, |first harmonic| = " +
                        std::to_string(closure));
  a[1] = b[1] = 0.0;
  return Body2D(data.grid, std::move(a), std::move(b));
}

}  // namespace curvimg
