#include <algorithm>
#include <cmath>
#include <limits>

#include "curvimg/errors.hpp"
#include "curvimg/minkowski.hpp"

namespace curvimg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ||A(h) - a||, +inf when the halfspace intersection degenerates.
double merit_of(const Eigen::MatrixXd& normals, const Eigen::VectorXd& h,
                const Eigen::VectorXd& a) {
  try {
    return (support_geometry(normals, h).areas - a).norm();
  } catch (const GeometryError&) {
    return kInf;
  }
}

Eigen::MatrixXd fd_area_jacobian(const Eigen::MatrixXd& normals,
                                 const Eigen::VectorXd& h) {
  const int m = static_cast<int>(h.size());
  const double delta = 1e-5 * h.cwiseAbs().maxCoeff();
  Eigen::MatrixXd jac(m, m);
  Eigen::VectorXd hp = h, hm = h;
  for (int j = 0; j < m; ++j) {
    hp[j] = h[j] + delta;
    hm[j] = h[j] - delta;
    jac.col(j) = (support_geometry(normals, hp).areas -
                  support_geometry(normals, hm).areas) /
                 (2.0 * delta);
    hp[j] = h[j];
    hm[j] = h[j];
  }
  return jac;
}

}  // namespace

Eigen::VectorXd solve_support_numbers(const Eigen::MatrixXd& normals,
                                      const Eigen::VectorXd& target_areas,
                                      const Solve3DOptions& opt,
                                      Solve3DReport* report) {
  const int m = static_cast<int>(normals.rows());
  if (target_areas.size() != m)
    throw DimensionError("solve_support_numbers: size mismatch");
  if (target_areas.minCoeff() <= 0.0)
    throw GeometryError("solve_support_numbers: target areas must be positive");
  const double total = target_areas.sum();
  if ((normals.transpose() * target_areas).norm() > 1e-6 * total)
    throw GeometryError("solve_support_numbers: data not closed");
  if (opt.max_newton < 1)
    throw ConfigError("solve_support_numbers: max_newton must be >= 1");

  Eigen::VectorXd h;
  if (opt.init.size() == m) {
    h = opt.init;
  } else if (opt.init.size() == 0) {
    h = target_areas.cwiseSqrt();
  } else {
    throw DimensionError("solve_support_numbers: bad warm start size");
  }
  if (h.minCoeff() <= 0.0)
    throw GeometryError("solve_support_numbers: warm start not positive");

  // The raw start is rarely a support function; blend toward its mean until
  // every halfspace is active, so the Newton system starts nonsingular.
  {
    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(m, h.mean());
    for (double beta : {1.0, 0.5, 0.25, 0.0}) {
      const Eigen::VectorXd probe = beta * h + (1.0 - beta) * flat;
      try {
        if (support_geometry(normals, probe).areas.minCoeff() > 0.0) {
          h = probe;
          break;
        }
      } catch (const GeometryError&) {
      }
      if (beta == 0.0)
        throw ConvergenceError("solve_support_numbers: no full-support start");
    }
  }

  // Match the overall scale first: areas are 2-homogeneous in h.
  {
    const Eigen::VectorXd a0 = support_geometry(normals, h).areas;
    const double t2 = a0.dot(target_areas) / std::max(a0.squaredNorm(), 1e-300);
    if (t2 > 0.0) h *= std::sqrt(t2);
  }

  // Globalization fallback: descend the scale-invariant Minkowski functional
  // J(h) = <a,h>/V(h)^{1/3}, whose minimizer has A(h) proportional to a. Its
  // gradient pulls slack halfspaces back onto the body, restoring a full
  // active set when a Newton step overshoots.
  auto variational_descent = [&](Eigen::VectorXd& hh) {
    for (int step = 0; step < 40; ++step) {
      SupportGeometry geo;
      try {
        geo = support_geometry(normals, hh);
      } catch (const GeometryError&) {
        throw ConvergenceError(
            "solve_support_numbers: iterate left the feasible cone");
      }
      if (geo.areas.minCoeff() > 0.0 && step >= 5) return;
      const double v13 = std::cbrt(geo.volume);
      const double j0 = target_areas.dot(hh) / v13;
      const Eigen::VectorXd grad =
          target_areas / v13 -
          (target_areas.dot(hh) / (3.0 * geo.volume * v13)) * geo.areas;
      const double gn = grad.cwiseAbs().maxCoeff();
      if (gn <= 0.0) return;
      double t = 0.05 * hh.cwiseAbs().maxCoeff() / gn;
      bool ok = false;
      for (int half = 0; half < 30 && !ok; ++half, t *= 0.5) {
        const Eigen::VectorXd h2 = hh - t * grad;
        try {
          if (target_areas.dot(h2) /
                  std::cbrt(support_geometry(normals, h2).volume) <
              j0) {
            hh = h2;
            ok = true;
          }
        } catch (const GeometryError&) {
        }
      }
      if (!ok) return;
    }
  };

  const double a_norm = target_areas.norm();
  const int nk = m + 3;  // KKT system: translations pinned
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nk, nk);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
  kkt.block(0, m, m, 3) = normals;
  kkt.block(m, 0, 3, m) = normals.transpose();

  int steps = 0;
  int rescues = 0;
  double rel = kInf;
  bool converged = false;
  while (steps < opt.max_newton) {
    const SupportGeometry geo = support_geometry(normals, h);
    const Eigen::VectorXd f = geo.areas - target_areas;
    const double merit = f.norm();
    rel = merit / a_norm;
    if (rel < opt.tol) {
      converged = true;
      break;
    }

    if (geo.areas.minCoeff() <= 0.0) {
      if (++rescues > 8)
        throw ConvergenceError(
            "solve_support_numbers: persistent inactive halfspaces");
      variational_descent(h);
      continue;
    }

    ++steps;
    kkt.topLeftCorner(m, m) =
        opt.fd_jacobian ? fd_area_jacobian(normals, h) : area_jacobian(normals, geo);
    rhs.head(m) = -f;
    const Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(kkt).solve(rhs);
    Eigen::VectorXd dh = sol.head(m);
    if (!dh.allFinite())
      dh = Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs).head(m);
    if (!dh.allFinite())
      throw ConvergenceError("solve_support_numbers: singular Newton system");

    const double h_scale = h.cwiseAbs().maxCoeff();
    if (dh.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, h_scale)) {
      // Step at rounding level: the residual floor is reached.
      h += dh;
      rel = merit_of(normals, h, target_areas) / a_norm;
      converged = rel < 100.0 * opt.tol;
      break;
    }

    double t = 1.0;
    bool accepted = false;
    while (t >= 0x1p-20) {
      const double m2 = merit_of(normals, h + t * dh, target_areas);
      if (m2 < merit * (1.0 - 1e-4 * t)) {
        h += t * dh;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (++rescues > 8)
        throw ConvergenceError("solve_support_numbers: line search stalled");
      variational_descent(h);
    }
  }

  if (!converged)
    throw ConvergenceError("solve_support_numbers: no convergence after " +
                           std::to_string(steps) + " Newton steps");

  const SupportGeometry final_geo = support_geometry(normals, h);
  if (final_geo.areas.minCoeff() <= 0.0)
    throw ConvergenceError(
        "solve_support_numbers: degenerate facet at the solution");

  if (report) {
    report->newton_steps = steps;
    report->residual = (final_geo.areas - target_areas).norm() / a_norm;
  }
  return h;
}

Polytope3D solve_3d(const CurvatureData& data, const Solve3DOptions& opt,
                    Solve3DReport* report) {
  const GridPtr& grid = data.grid;
  if (grid->dim != 3) throw DimensionError("solve_3d: needs an S^2 grid");

  Solve3DOptions local = opt;
  if (local.init.size() == 0) local.init = data.g.cwiseSqrt();
  Eigen::VectorXd h =
      solve_support_numbers(grid->nodes, data.areas(), local, report);
  if (report) report->repaired = data.repaired;

  bool even = true;
  for (int i = 0; i < h.size() && even; ++i) {
    const int j = grid->antipode[i];
    even = j >= 0 && data.g[i] == data.g[j];
  }
  if (even) {
    // Keep symmetric data exactly symmetric; the vertex centroid is already
    // at the origin up to rounding, so no extra shift.
    Eigen::VectorXd sym(h.size());
    for (int i = 0; i < h.size(); ++i)
      sym[i] = 0.5 * (h[i] + h[grid->antipode[i]]);
    return Polytope3D(grid, std::move(sym));
  }

  Polytope3D raw(grid, std::move(h));
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& v : raw.vertices()) centroid += v;
  centroid /= static_cast<double>(raw.vertices().size());
  return translate(raw, -centroid);
}

}  // namespace curvimg
