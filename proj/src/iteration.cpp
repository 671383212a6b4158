#include "curvimg/iteration.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include "curvimg/errors.hpp"
#include "curvimg/functionals.hpp"

namespace curvimg {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from) {
  return std::chrono::duration<double, std::milli>(Clock::now() - from).count();
}

const SphereGrid& grid_of(const Body2D& k) { return *k.grid(); }
const SphereGrid& grid_of(const Polytope3D& k) { return k.grid(); }

const Eigen::VectorXd& support_vec(const Body2D& k) { return k.support_samples(); }
const Eigen::VectorXd& support_vec(const Polytope3D& k) { return k.support_numbers(); }

template <class BodyT>
TraceRow metrics_row(int iter, const BodyT& k, const OperatorConfig& op) {
  TraceRow row;
  row.iter = iter;
  row.volume = volume(k);
  row.a_p = A_p(k, op.phi, op.p);
  // Curvature-side functionals can be undefined for degenerate starts (a
  // polytope with inactive facets has zeros in f); record NaN, keep going.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    row.b_p = B_p(k, op.phi, op.p);
  } catch (const Error&) {
    row.b_p = nan;
  }
  try {
    row.omega_p = Omega_p(k, op.phi, op.p);
  } catch (const Error&) {
    row.omega_p = nan;
  }
  try {
    row.vol_product = volume_product(k);
  } catch (const Error&) {
    row.vol_product = nan;
  }
  row.residual = fixed_point_residual(k, op.phi, op.p);
  row.h_min = support_vec(k).minCoeff();
  row.h_max = support_vec(k).maxCoeff();
  return row;
}

// One renormalized operator step. The classical scheme follows the solve
// with minimal position and a Santalo recentering; its admissibility
// (p = -n, uniform phi) is validated up front, and the Santalo point is not
// the root of the case-3 moment on a finite grid, so the per-step case check
// is skipped there.
template <class BodyT>
BodyT advance(const BodyT& k, const RunConfig& config) {
  OperatorConfig op = config.op;
  if (config.minimal_position) op.unsafe = true;
  BodyT next = apply(k, op);
  if (config.minimal_position) {
    next = minimal_position(next).first;
    next = translate(next, -santalo_point(next));
  }
  return next;
}

template <class BodyT, class Observe>
std::pair<BodyT, IterationTrace> run_loop(const BodyT& initial, const RunConfig& config,
                                          const Observe& observe) {
  if (config.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(config.tol_step > 0) || !(config.tol_residual > 0))
    throw ConfigError("tolerances must be positive");
  if (config.minimal_position) {
    const bool uniform = (config.op.phi.values.array() == 1.0).all();
    if (config.op.p != -double(grid_of(initial).dim) || !uniform)
      throw ConfigError("minimal position renormalization needs p = -n, uniform phi");
  }

  IterationTrace trace;
  BodyT k = config.minimal_position
                ? translate(initial, -santalo_point(initial))
                : normalize_translation(initial, config.op.phi, config.op.p,
                                        config.op.normalize_tol);
  if (!config.op.unsafe && !config.minimal_position)
    check_assumption(k, config.op.phi, config.op.p, config.op.closure_tol);

  trace.rows.push_back(metrics_row(0, k, config.op));
  if (observe) observe(0, k);
  std::deque<Eigen::VectorXd> window;
  window.push_back(support_vec(k));

  bool errored = false;
  for (int i = 0; i < config.max_iter; ++i) {
    const auto tic = Clock::now();
    BodyT next = k;
    try {
      next = advance(k, config);
    } catch (const Error& e) {
      trace.status = RunStatus::kError;
      trace.error = e.what();
      errored = true;
    }
    if (errored) break;  // partial trace is returned as-is

    TraceRow row = metrics_row(i + 1, next, config.op);
    row.hausdorff_step = hausdorff(k, next);
    row.vol_ratio = row.volume / trace.rows.back().volume;
    row.ms = elapsed_ms(tic);
    trace.rows.push_back(row);
    if (observe) observe(i + 1, next);

    window.push_back(support_vec(next));
    if (window.size() > 50) window.pop_front();
    k = std::move(next);

    if (row.residual < config.tol_residual || row.hausdorff_step < config.tol_step) {
      trace.status = RunStatus::kConverged;
      break;
    }
  }
  if (!errored && trace.status != RunStatus::kConverged)
    trace.status = RunStatus::kMaxIter;

  Eigen::VectorXd lo = window.front(), hi = window.front();
  for (const auto& h : window) {
    lo = lo.cwiseMin(h);
    hi = hi.cwiseMax(h);
  }
  trace.tail_oscillation = (hi - lo).maxCoeff();
  return {std::move(k), std::move(trace)};
}

}  // namespace

std::pair<Body2D, IterationTrace> iterate(const Body2D& initial, const RunConfig& config,
                                          const Observer2D& observe) {
  return run_loop(initial, config, observe);
}

std::pair<Polytope3D, IterationTrace> iterate(const Polytope3D& initial,
                                              const RunConfig& config,
                                              const Observer3D& observe) {
  return run_loop(initial, config, observe);
}

std::pair<Body2D, IterationTrace> iterate_classical(const Body2D& initial,
                                                    RunConfig config,
                                                    const Observer2D& observe) {
  config.minimal_position = true;
  config.op.p = -double(initial.grid()->dim);
  return iterate(initial, config, observe);
}

std::pair<Polytope3D, IterationTrace> iterate_classical(const Polytope3D& initial,
                                                        RunConfig config,
                                                        const Observer3D& observe) {
  config.minimal_position = true;
  config.op.p = -3.0;
  return iterate(initial, config, observe);
}

double anisotropy(const Body2D& k) {
  const Eigen::VectorXd& h = k.support_samples();
  return (h.maxCoeff() - h.minCoeff()) / h.mean();
}

double anisotropy(const Polytope3D& k) {
  const Eigen::VectorXd& h = k.support_numbers();
  return (h.maxCoeff() - h.minCoeff()) / h.mean();
}

namespace {

// Support samples of exp(S)K on the body's own grid; S symmetric traceless,
// so the map is SPD with determinant one.
Eigen::VectorXd mapped_support(const Body2D& k, const Eigen::Matrix2d& a) {
  const SphereGrid& grid = *k.grid();
  Eigen::VectorXd h(grid.count());
  for (int i = 0; i < grid.count(); ++i) {
    const Eigen::Vector2d v = a * grid.nodes.row(i).transpose();  // A^T u, A symmetric
    const double len = v.norm();
    h[i] = len * k.support_at(std::atan2(v[1], v[0]));
  }
  return h;
}

Eigen::Matrix2d exp_traceless(const Eigen::Vector2d& s) {
  // exp([[s0, s1], [s1, -s0]]) = cosh(r) I + sinh(r)/r * S
  const double r = s.norm();
  Eigen::Matrix2d mat;
  mat << s[0], s[1], s[1], -s[0];
  const double sinc = r < 1e-12 ? 1.0 : std::sinh(r) / r;
  return std::cosh(r) * Eigen::Matrix2d::Identity() + sinc * mat;
}

}  // namespace

std::pair<Body2D, Eigen::Matrix2d> minimal_position(const Body2D& k, double tol) {
  const SphereGrid& grid = *k.grid();
  auto perimeter = [&](const Eigen::Vector2d& s) {
    return integrate(mapped_support(k, exp_traceless(s)), grid);
  };

  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  double value = perimeter(s);
  const double fd = 1e-5;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d grad;
    Eigen::Matrix2d hess;
    const double f0 = value;
    double fp[2], fm[2];
    for (int a = 0; a < 2; ++a) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[a] = fd;
      fp[a] = perimeter(s + e);
      fm[a] = perimeter(s - e);
      grad[a] = (fp[a] - fm[a]) / (2 * fd);
      hess(a, a) = (fp[a] - 2 * f0 + fm[a]) / (fd * fd);
    }
    {
      const Eigen::Vector2d e01(fd, fd);
      const double fpp = perimeter(s + e01);
      const double fmm = perimeter(s - e01);
      hess(0, 1) = hess(1, 0) =
          (fpp - fp[0] - fp[1] + 2 * f0 - fm[0] - fm[1] + fmm) / (2 * fd * fd);
    }
    if (grad.norm() < tol * std::max(1.0, f0)) break;

    Eigen::Vector2d step;
    const Eigen::LLT<Eigen::Matrix2d> llt(hess);
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(grad);
    } else {
      step = -grad / std::max(1.0, grad.norm());
    }
    double t = 1.0;
    double trial = perimeter(s + t * step);
    while (trial > value && t > 1e-10) {
      t *= 0.5;
      trial = perimeter(s + t * step);
    }
    if (t <= 1e-10)
      throw ConvergenceError("minimal position: line search stalled");
    s += t * step;
    value = trial;
    if ((t * step).norm() < 1e-13) break;
  }

  const Eigen::Matrix2d a = exp_traceless(s);
  // The map shifts spectral content upward; keep a wider band so the
  // projection preserves volume to rounding.
  const int out_degree = std::min(grid.count() / 2 - 1, 2 * k.degree());
  Body2D out = body_from_support_samples(k.grid(), mapped_support(k, a), out_degree);
  return {std::move(out), a};
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;

Eigen::Matrix3d exp_sym_traceless(const Vec5& s) {
  Eigen::Matrix3d m;
  m << s[0], s[2], s[3],
       s[2], s[1], s[4],
       s[3], s[4], -s[0] - s[1];
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  return es.eigenvectors() *
         es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

// Exact surface area of A K from the facet cycles: each mapped facet is the
// planar polygon with vertices A v, and its vector area is half the summed
// cross products around the cycle.
double mapped_surface_area(const std::vector<Eigen::Vector3d>& verts,
                           const std::vector<std::vector<int>>& cycles,
                           const Eigen::Matrix3d& a) {
  std::vector<Eigen::Vector3d> mv(verts.size());
  for (size_t i = 0; i < verts.size(); ++i) mv[i] = a * verts[i];
  double total = 0;
  for (const auto& cyc : cycles) {
    if (cyc.size() < 3) continue;
    Eigen::Vector3d va = Eigen::Vector3d::Zero();
    for (size_t t = 0; t < cyc.size(); ++t)
      va += mv[cyc[t]].cross(mv[cyc[(t + 1) % cyc.size()]]);
    total += 0.5 * va.norm();
  }
  return total;
}

}  // namespace

std::pair<Polytope3D, Eigen::Matrix3d> minimal_position(const Polytope3D& k, double tol) {
  const SphereGrid& grid = k.grid();
  const auto& verts = k.vertices();
  const auto& cycles = k.facet_cycles();
  auto area = [&](const Vec5& s) {
    return mapped_surface_area(verts, cycles, exp_sym_traceless(s));
  };

  Vec5 s = Vec5::Zero();
  double value = area(s);
  const double fd = 1e-5;
  for (int it = 0; it < 200; ++it) {
    Vec5 grad, fp, fm;
    Eigen::Matrix<double, 5, 5> hess;
    const double f0 = value;
    for (int a = 0; a < 5; ++a) {
      Vec5 e = Vec5::Zero();
      e[a] = fd;
      fp[a] = area(s + e);
      fm[a] = area(s - e);
      grad[a] = (fp[a] - fm[a]) / (2 * fd);
      hess(a, a) = (fp[a] - 2 * f0 + fm[a]) / (fd * fd);
    }
    for (int a = 0; a < 5; ++a)
      for (int b = a + 1; b < 5; ++b) {
        Vec5 e = Vec5::Zero();
        e[a] = fd;
        e[b] = fd;
        const double fpp = area(s + e);
        const double fmm = area(s - e);
        hess(a, b) = hess(b, a) =
            (fpp - fp[a] - fp[b] + 2 * f0 - fm[a] - fm[b] + fmm) / (2 * fd * fd);
      }
    if (grad.norm() < tol * std::max(1.0, f0)) break;

    Vec5 step;
    const Eigen::LLT<Eigen::Matrix<double, 5, 5>> llt(hess);
    if (llt.info() == Eigen::Success) {
      step = -llt.solve(grad);
    } else {
      step = -grad / std::max(1.0, grad.norm());
    }
    // near the optimum the merit change drops below rounding while the FD
    // gradient still sits above its noise floor; take the tiny step, stop
    if (step.norm() < 1e-8 * std::max(1.0, s.norm())) {
      s += step;
      break;
    }
    double t = 1.0;
    double trial = area(s + t * step);
    while (trial > value && t > 1e-10) {
      t *= 0.5;
      trial = area(s + t * step);
    }
    if (t <= 1e-10) {
      if (step.norm() < 1e-6 * std::max(1.0, s.norm())) {
        s += step;  // decrease is unresolvable at this scale
        break;
      }
      throw ConvergenceError("minimal position: line search stalled");
    }
    s += t * step;
    value = trial;
    if ((t * step).norm() < 1e-13) break;
  }

  const Eigen::Matrix3d a = exp_sym_traceless(s);
  // Support numbers of A K: A is symmetric, so h(u) = max_v <A v, u>. The
  // finite normal grid widens the mapped body by O(mesh^2); a final scaling
  // puts the volume back.
  Eigen::VectorXd h(grid.count());
  for (int i = 0; i < grid.count(); ++i) {
    const Eigen::Vector3d au = a * grid.nodes.row(i).transpose();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : verts) best = std::max(best, au.dot(v));
    h[i] = best;
  }
  const Polytope3D raw(k.grid_ptr(), h);
  const double lambda = std::cbrt(k.volume() / raw.volume());
  return {Polytope3D(k.grid_ptr(), lambda * h), a};
}

}  // namespace curvimg
