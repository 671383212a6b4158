#include "curvimg/curvature_data.hpp"

#include "curvimg/errors.hpp"

namespace curvimg {

CurvatureData make_curvature_data(GridPtr grid, Eigen::VectorXd g, double closure_tol) {
  if (g.size() != grid->count()) throw DimensionError("curvature data size mismatch");
  if (!(closure_tol > 0)) throw ConfigError("closure tolerance must be positive");
  if (g.minCoeff() <= 0) throw GeometryError("curvature data must be positive");

  CurvatureData data;
  data.closure_tol = closure_tol;
  Eigen::VectorXd moment = vector_moment(g, *grid);
  const double violation = moment.norm();
  if (violation > 10 * closure_tol)
    throw GeometryError("curvature data closure violation " + std::to_string(violation) +
                        " exceeds the repair threshold");
  if (violation > closure_tol) {
    // Tilt g by 1 + <beta,u>; beta solves moment + M beta = 0 with
    // M = integral of g u u^T.
    const int m = grid->count();
    const int d = grid->dim;
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd u = grid->nodes.row(i).transpose();
      second += grid->weights[i] * g[i] * (u * u.transpose());
    }
    const Eigen::VectorXd beta = second.ldlt().solve(-moment);
    for (int i = 0; i < m; ++i)
      g[i] *= 1.0 + beta.dot(grid->nodes.row(i).transpose());
    if (g.minCoeff() <= 0)
      throw GeometryError("closure repair drove the data nonpositive");
    data.repaired = true;
  }
  data.grid = std::move(grid);
  data.g = std::move(g);
  return data;
}

}  // namespace curvimg
