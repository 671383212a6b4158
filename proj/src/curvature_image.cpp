#include "curvimg/curvature_image.hpp"

#include <cmath>
#include <string>

#include "curvimg/errors.hpp"
#include "curvimg/minkowski.hpp"

namespace curvimg {

namespace {

bool is_uniform(const Density& phi) {
  return (phi.values.array() == 1.0).all();
}

// Weighted moment integral of u * (h - <x,u>)^(p-1) / phi and its Jacobian.
struct MomentSystem {
  const SphereGrid& grid;
  const Eigen::VectorXd& h;
  const Density& phi;
  double p;

  double margin(const Eigen::VectorXd& x) const {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.count(); ++i)
      lo = std::min(lo, h[i] - grid.nodes.row(i).dot(x.transpose()));
    return lo;
  }

  Eigen::VectorXd value(const Eigen::VectorXd& x) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.dim);
    for (int i = 0; i < grid.count(); ++i) {
      const int j = grid.antipode.empty() ? -1 : grid.antipode[i];
      if (j >= 0 && j < i) continue;
      const Eigen::VectorXd u = grid.nodes.row(i).transpose();
      const double r = h[i] - u.dot(x);
      Eigen::VectorXd term =
          grid.weights[i] * std::pow(r, p - 1.0) / phi.values[i] * u;
      if (j > i) {
        const Eigen::VectorXd v = grid.nodes.row(j).transpose();
        const double rj = h[j] - v.dot(x);
        term += grid.weights[j] * std::pow(rj, p - 1.0) / phi.values[j] * v;
      }
      acc += term;
    }
    return acc;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grid.dim, grid.dim);
    for (int i = 0; i < grid.count(); ++i) {
      const Eigen::VectorXd u = grid.nodes.row(i).transpose();
      const double r = h[i] - u.dot(x);
      acc += (1.0 - p) * grid.weights[i] * std::pow(r, p - 2.0) / phi.values[i] *
             (u * u.transpose());
    }
    return acc;
  }
};

}  // namespace

namespace {

AssumptionCase check_assumption_core(const SphereGrid& grid, const Eigen::VectorXd& h,
                                     bool symmetric, bool interior, const Density& phi,
                                     double p, double closure_tol) {
  const int n = grid.dim;
  std::string why;

  if (phi.even && symmetric && p > -double(n) && std::abs(p - 1.0) > 1e-9)
    return AssumptionCase::kSymmetric;
  why += "case 1: ";
  why += !phi.even   ? "phi is not even; "
         : !symmetric ? "body is not origin-symmetric; "
                      : "p outside (-n, 1) u (1, inf); ";

  if (p > -double(n) && p <= -double(n) + 1.0 && interior) {
    const Eigen::VectorXd integrand = h.array().pow(p - 1.0) / phi.values.array();
    if (vector_moment(integrand, grid).norm() < closure_tol)
      return AssumptionCase::kLowRange;
    why += "case 2: moment condition fails; ";
  } else {
    why += (p <= -double(n) || p > -double(n) + 1.0)
               ? "case 2: p outside (-n, -n+1]; "
               : "case 2: origin not interior; ";
  }

  if (is_uniform(phi) && p >= -double(n) && std::abs(p - 1.0) > 1e-9 && interior) {
    const Eigen::VectorXd integrand = h.array().pow(p - 1.0);
    if (vector_moment(integrand, grid).norm() < closure_tol)
      return AssumptionCase::kUniform;
    why += "case 3: moment condition fails";
  } else {
    why += !is_uniform(phi) ? "case 3: phi is not uniform"
           : (p < -double(n) || std::abs(p - 1.0) <= 1e-9)
               ? "case 3: p outside [-n, 1) u (1, inf)"
               : "case 3: origin not interior";
  }
  throw ConfigError("no admissibility case applies (" + why + ")");
}

}  // namespace

AssumptionCase check_assumption(const Body2D& k, const Density& phi, double p,
                                double closure_tol) {
  if (!k.grid()->same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return check_assumption_core(*k.grid(), k.support_samples(), k.origin_symmetric(),
                               k.origin_interior(), phi, p, closure_tol);
}

AssumptionCase check_assumption(const Polytope3D& k, const Density& phi, double p,
                                double closure_tol) {
  if (!k.grid().same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return check_assumption_core(k.grid(), k.support_numbers(), k.origin_symmetric(),
                               k.origin_interior(), phi, p, closure_tol);
}

Eigen::VectorXd normalize_shift(const Eigen::VectorXd& h, const Density& phi, double p,
                                double tol) {
  if (p >= 1.0) throw ConfigError("translation normalization requires p < 1");
  const SphereGrid& grid = *phi.grid;
  MomentSystem sys{grid, h, phi, p};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(grid.dim);
  if (sys.margin(x) <= 0)
    throw GeometryError("normalize: origin is not interior, translate first");

  bool polished = false;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd m = sys.value(x);
    if (m.norm() < tol) {
      if (polished) return x;
      polished = true;  // one extra step so repeated calls are no-ops
    }
    const Eigen::VectorXd step = -sys.jacobian(x).ldlt().solve(m);
    if (polished && !std::isfinite(step.norm())) return x;
    double t = 1.0;
    while (t > 1e-12 && sys.margin(x + t * step) <= 0) t *= 0.5;
    if (t <= 1e-12) throw ConvergenceError("normalize: step left the feasible set");
    x += t * step;
    if (polished) return x;
  }
  throw ConvergenceError("normalize: Newton did not converge in 100 steps");
}

Body2D normalize_translation(const Body2D& k, const Density& phi, double p, double tol) {
  if (!k.grid()->same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  Body2D base = k;
  if (!k.origin_interior()) {
    // move an interior point to the origin before running Newton
    base = translate(k, -Eigen::Vector2d(steiner_point(k)));
  }
  const Eigen::VectorXd x = normalize_shift(base.support_samples(), phi, p, tol);
  return translate(base, -Eigen::Vector2d(x));
}

Polytope3D normalize_translation(const Polytope3D& k, const Density& phi, double p,
                                 double tol) {
  if (!k.grid().same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  Polytope3D base = k;
  if (!k.origin_interior()) {
    base = translate(k, -k.geometry().interior);
  }
  const Eigen::VectorXd x = normalize_shift(base.support_numbers(), phi, p, tol);
  return translate(base, -Eigen::Vector3d(x));
}

namespace {

// c * h^(p-1)/phi with c = V / ((1/n) integral h^p/phi dsigma).
CurvatureData lambda_data_core(const GridPtr& grid, const Eigen::VectorXd& h, double vol,
                               const Density& phi, double p, double closure_tol) {
  const int n = grid->dim;
  if (h.minCoeff() <= 0) throw GeometryError("lambda data needs the origin interior");
  const Eigen::VectorXd hp_over_phi = h.array().pow(p) / phi.values.array();
  const double c = vol / (integrate(hp_over_phi, *grid) / n);
  Eigen::VectorXd g = c * h.array().pow(p - 1.0) / phi.values.array();
  return make_curvature_data(grid, std::move(g), closure_tol);
}

double residual_core(const SphereGrid& grid, const Eigen::VectorXd& h,
                     const Eigen::VectorXd& f, double vol, const Density& phi, double p) {
  const double c =
      vol / (integrate(Eigen::VectorXd(h.array().pow(p) / phi.values.array()), grid) /
             grid.dim);
  const Eigen::ArrayXd lhs = phi.values.array() * h.array().pow(1.0 - p) * f.array();
  return (lhs / c - 1.0).abs().maxCoeff();
}

}  // namespace

CurvatureData lambda_data(const Body2D& k, const Density& phi, double p,
                          double closure_tol) {
  if (!k.grid()->same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return lambda_data_core(k.grid(), k.support_samples(), volume(k), phi, p, closure_tol);
}

CurvatureData lambda_data(const Polytope3D& k, const Density& phi, double p,
                          double closure_tol) {
  if (!k.grid().same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return lambda_data_core(k.grid_ptr(), k.support_numbers(), k.volume(), phi, p,
                          closure_tol);
}

Body2D apply(const Body2D& k, const OperatorConfig& config) {
  AssumptionCase c = AssumptionCase::kUniform;
  bool checked = false;
  if (!config.unsafe) {
    c = check_assumption(k, config.phi, config.p, config.closure_tol);
    checked = true;
  }
  CurvatureData data = lambda_data(k, config.phi, config.p, config.closure_tol);
  Body2D image = solve_2d(data, config.degree);
  if (checked && c == AssumptionCase::kSymmetric) image = symmetrize(image);
  return normalize_translation(image, config.phi, config.p, config.normalize_tol);
}

Polytope3D apply(const Polytope3D& k, const OperatorConfig& config) {
  AssumptionCase c = AssumptionCase::kUniform;
  bool checked = false;
  if (!config.unsafe) {
    c = check_assumption(k, config.phi, config.p, config.closure_tol);
    checked = true;
  }
  CurvatureData data = lambda_data(k, config.phi, config.p, config.closure_tol);
  Polytope3D image = solve_3d(data);
  if (checked && c == AssumptionCase::kSymmetric) image = symmetrize(image);
  return normalize_translation(image, config.phi, config.p, config.normalize_tol);
}

double fixed_point_residual(const Body2D& k, const Density& phi, double p) {
  if (!k.grid()->same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return residual_core(*k.grid(), k.support_samples(), k.curvature_samples(), volume(k),
                       phi, p);
}

double fixed_point_residual(const Polytope3D& k, const Density& phi, double p) {
  if (!k.grid().same_as(*phi.grid))
    throw DimensionError("body and density live on different grids");
  return residual_core(k.grid(), k.support_numbers(), k.curvature_samples(), k.volume(),
                       phi, p);
}

}  // namespace curvimg
