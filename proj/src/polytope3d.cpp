#include "curvimg/polytope3d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include "curvimg/errors.hpp"
#include "curvimg/hull3d.hpp"

namespace curvimg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Vector3d node_at(const Eigen::MatrixXd& normals, int i) {
  return normals.row(i).transpose();
}

// A point with positive margin against every halfspace. Zero when the data
// already has positive support numbers; otherwise a least-squares seed
// polished by subgradient ascent on the worst margin.
Eigen::Vector3d find_interior_point(const Eigen::MatrixXd& normals,
                                    const Eigen::VectorXd& h) {
  if (h.minCoeff() > 0.0) return Eigen::Vector3d::Zero();

  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (int i = 0; i < normals.rows(); ++i) {
    const Eigen::Vector3d u = node_at(normals, i);
    gram += u * u.transpose();
    rhs += h[i] * u;
  }
  Eigen::Vector3d x = gram.ldlt().solve(rhs);

  auto worst = [&](const Eigen::Vector3d& pt, int& idx) {
    double m = kInf;
    idx = -1;
    for (int i = 0; i < normals.rows(); ++i) {
      const double mi = h[i] - normals.row(i).dot(pt);
      if (mi < m) {
        m = mi;
        idx = i;
      }
    }
    return m;
  };

  int iw = -1;
  double m = worst(x, iw);
  for (int iter = 0; iter < 200 && m <= 0.0; ++iter) {
    const Eigen::Vector3d dir = -node_at(normals, iw);
    double t = 2.0 * (-m) + 1e-12;
    bool moved = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      int iw2 = -1;
      const double m2 = worst(x + t * dir, iw2);
      if (m2 > m) {
        x += t * dir;
        m = m2;
        iw = iw2;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (m <= 0.0)
    throw GeometryError("support_geometry: empty interior");
  return x;
}

}  // namespace

SupportGeometry support_geometry(const Eigen::MatrixXd& normals,
                                 const Eigen::VectorXd& h) {
  const int m = static_cast<int>(normals.rows());
  if (normals.cols() != 3)
    throw DimensionError("support_geometry: normals must be m x 3");
  if (h.size() != m)
    throw DimensionError("support_geometry: size mismatch");
  if (!h.allFinite())
    throw GeometryError("support_geometry: non-finite support numbers");
  if (m < 4)
    throw GeometryError("support_geometry: need at least 4 halfspaces");

  SupportGeometry geo;
  geo.interior = find_interior_point(normals, h);
  Eigen::VectorXd hs = h - normals * geo.interior;  // shifted frame
  const double h_scale = hs.maxCoeff();
  if (hs.minCoeff() <= 1e-14 * std::max(1.0, h_scale))
    throw GeometryError("support_geometry: empty interior");

  std::vector<Eigen::Vector3d> dual(m);
  for (int i = 0; i < m; ++i) dual[i] = node_at(normals, i) / hs[i];
  const Hull3D hull = convex_hull(dual);

  // Each dual facet plane <n,y> = d with d > 0 maps to the primal vertex n/d;
  // d -> 0 means the primal intersection is unbounded.
  double y_scale = 0.0;
  for (const auto& y : dual) y_scale = std::max(y_scale, y.lpNorm<Eigen::Infinity>());

  std::vector<Eigen::Vector3d> raw_vertices;
  raw_vertices.reserve(hull.facets.size());
  for (const auto& f : hull.facets) {
    const Eigen::Vector3d& a = dual[f[0]];
    const Eigen::Vector3d n = (dual[f[1]] - a).cross(dual[f[2]] - a);
    const double d = n.dot(a);
    if (d <= 1e-12 * n.norm() * y_scale)
      throw GeometryError("support_geometry: unbounded intersection");
    raw_vertices.push_back(n / d);
  }

  // Merge vertices repeated across the triangulated dual facets.
  double v_scale = 0.0;
  for (const auto& v : raw_vertices)
    v_scale = std::max(v_scale, v.lpNorm<Eigen::Infinity>());
  const double quant = 1e-9 * std::max(v_scale, 1e-30);
  std::map<std::array<long long, 3>, int> vid_of;
  std::vector<int> vid(raw_vertices.size());
  for (size_t t = 0; t < raw_vertices.size(); ++t) {
    const Eigen::Vector3d& v = raw_vertices[t];
    const std::array<long long, 3> key = {std::llround(v[0] / quant),
                                          std::llround(v[1] / quant),
                                          std::llround(v[2] / quant)};
    auto [it, fresh] = vid_of.try_emplace(key, static_cast<int>(geo.vertices.size()));
    if (fresh) geo.vertices.push_back(v);
    vid[t] = it->second;
  }

  std::vector<std::vector<int>> incident(m);
  for (size_t t = 0; t < hull.facets.size(); ++t)
    for (int corner : hull.facets[t]) incident[corner].push_back(vid[t]);

  geo.cycles.assign(m, {});
  geo.areas = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    auto& ids = incident[i];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 3) continue;  // inactive or degenerate sliver

    const Eigen::Vector3d u = node_at(normals, i);
    const Eigen::Vector3d t1 = u.unitOrthogonal();
    const Eigen::Vector3d t2 = u.cross(t1);
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (int id : ids) c += geo.vertices[id];
    c /= static_cast<double>(ids.size());

    std::vector<std::pair<double, int>> ang;
    ang.reserve(ids.size());
    for (int id : ids) {
      const Eigen::Vector3d r = geo.vertices[id] - c;
      ang.emplace_back(std::atan2(r.dot(t2), r.dot(t1)), id);
    }
    std::sort(ang.begin(), ang.end());

    auto& cyc = geo.cycles[i];
    cyc.reserve(ang.size());
    for (const auto& [a, id] : ang) {
      (void)a;
      cyc.push_back(id);
    }

    double two_a = 0.0;
    for (size_t k = 0; k < cyc.size(); ++k) {
      const Eigen::Vector3d pa = geo.vertices[cyc[k]] - c;
      const Eigen::Vector3d pb = geo.vertices[cyc[(k + 1) % cyc.size()]] - c;
      two_a += pa.dot(t1) * pb.dot(t2) - pb.dot(t1) * pa.dot(t2);
    }
    geo.areas[i] = 0.5 * std::abs(two_a);
  }

  geo.volume = geo.areas.dot(hs) / 3.0;

  // Facet adjacency: a vertex pair consecutive in exactly two cycles is a
  // polytope edge shared by those facets.
  std::map<std::pair<int, int>, std::vector<int>> edge_facets;
  for (int i = 0; i < m; ++i) {
    const auto& cyc = geo.cycles[i];
    for (size_t k = 0; k < cyc.size(); ++k) {
      int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
      if (a > b) std::swap(a, b);
      edge_facets[{a, b}].push_back(i);
    }
  }
  for (const auto& [vp, fs] : edge_facets) {
    if (fs.size() != 2) continue;
    const double len = (geo.vertices[vp.first] - geo.vertices[vp.second]).norm();
    geo.edges.push_back({fs[0], fs[1], len});
  }

  for (auto& v : geo.vertices) v += geo.interior;
  return geo;
}

Eigen::MatrixXd area_jacobian(const Eigen::MatrixXd& normals,
                              const SupportGeometry& geo) {
  const int m = static_cast<int>(normals.rows());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : geo.edges) {
    const double c =
        std::clamp(normals.row(e.i).dot(normals.row(e.j)), -1.0, 1.0);
    const double s = std::sqrt(std::max(1.0 - c * c, 1e-28));
    jac(e.i, e.j) += e.length / s;
    jac(e.j, e.i) += e.length / s;
    jac(e.i, e.i) -= e.length * c / s;
    jac(e.j, e.j) -= e.length * c / s;
  }
  return jac;
}

Polytope3D::Polytope3D(GridPtr grid, Eigen::VectorXd h)
    : grid_(std::move(grid)), h_(std::move(h)) {
  if (!grid_ || grid_->dim != 3)
    throw DimensionError("Polytope3D: needs an S^2 grid");
  if (h_.size() != grid_->count())
    throw DimensionError("Polytope3D: support numbers do not match grid");
  geo_ = support_geometry(grid_->nodes, h_);
}

int Polytope3D::active_count() const {
  return static_cast<int>((geo_.areas.array() > 0.0).count());
}

Eigen::VectorXd Polytope3D::curvature_samples() const {
  return geo_.areas.array() / grid_->weights.array();
}

double Polytope3D::support_eval(const Eigen::Vector3d& v) const {
  double best = -kInf;
  for (const auto& x : geo_.vertices) best = std::max(best, x.dot(v));
  return best;
}

bool Polytope3D::origin_symmetric() const {
  for (int i = 0; i < h_.size(); ++i) {
    const int j = grid_->antipode[i];
    if (j < 0 || h_[i] != h_[j]) return false;
  }
  return true;
}

double Polytope3D::closedness_defect() const {
  return (grid_->nodes.transpose() * geo_.areas).norm();
}

Polytope3D make_ball3(GridPtr grid, double radius) {
  if (!(radius > 0.0)) throw GeometryError("make_ball3: radius must be positive");
  const int m = grid->count();
  return Polytope3D(std::move(grid), Eigen::VectorXd::Constant(m, radius));
}

Polytope3D make_cube3(GridPtr grid, double half) {
  if (!(half > 0.0)) throw GeometryError("make_cube3: half side must be positive");
  Eigen::VectorXd h = Eigen::VectorXd::Constant(grid->count(), 10.0 * half);
  int found = 0;
  for (int i = 0; i < grid->count(); ++i) {
    for (int d = 0; d < 3; ++d) {
      if (std::abs(std::abs(grid->nodes(i, d)) - 1.0) < 1e-12) {
        h[i] = half;
        ++found;
      }
    }
  }
  if (found != 6)
    throw GeometryError("make_cube3: grid lacks the coordinate axes");
  return Polytope3D(std::move(grid), std::move(h));
}

Polytope3D random_polytope(GridPtr grid, unsigned seed, double amplitude,
                           bool even_only) {
  if (!(amplitude >= 0.0 && amplitude < 0.5))
    throw ConfigError("random_polytope: amplitude must lie in [0, 0.5)");
  std::mt19937_64 rng(seed);
  auto draw = [&rng]() {  // uniform in [-1, 1), platform independent
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
  };

  Eigen::Matrix3d q;
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) q(r, c) = q(c, r) = draw();
  q -= Eigen::Matrix3d::Identity() * (q.trace() / 3.0);
  const double qn = q.norm();
  if (qn > 0.0) q /= qn;
  const double cubic = draw();  // consumed regardless of even_only

  const int m = grid->count();
  Eigen::VectorXd h(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d u = grid->nodes.row(i).transpose();
    double val = u.dot(q * u);
    if (!even_only) val += cubic * u[0] * u[1] * u[2] * 3.0;
    h[i] = 1.0 + amplitude * val;
  }
  return Polytope3D(std::move(grid), std::move(h));
}

double volume(const Polytope3D& p) { return p.volume(); }

double mixed_volume(const Polytope3D& k, const Polytope3D& l) {
  if (!k.grid().same_as(l.grid()))
    throw DimensionError("mixed_volume: grid mismatch");
  return l.support_numbers().dot(k.facet_areas()) / 3.0;
}

double polar_volume(const Polytope3D& p) {
  if (!p.origin_interior())
    throw GeometryError("polar_volume: origin not interior");
  const int m = p.grid().count();
  std::vector<Eigen::Vector3d> dual(m);
  for (int i = 0; i < m; ++i)
    dual[i] = p.grid().nodes.row(i).transpose() / p.support_numbers()[i];
  return convex_hull(dual).volume();
}

Polytope3D translate(const Polytope3D& p, const Eigen::Vector3d& x) {
  return Polytope3D(p.grid_ptr(),
                    p.support_numbers() + p.grid().nodes * x);
}

Polytope3D symmetrize(const Polytope3D& p) {
  const SphereGrid& grid = p.grid();
  if (grid.antipode.empty())
    throw GeometryError("symmetrize needs an antipodal grid");
  Eigen::VectorXd h = p.support_numbers();
  for (int i = 0; i < grid.count(); ++i) {
    const int j = grid.antipode[i];
    if (j <= i) continue;
    const double avg = 0.5 * (h[i] + h[j]);
    h[i] = avg;
    h[j] = avg;
  }
  return Polytope3D(p.grid_ptr(), std::move(h));
}

double hausdorff(const Polytope3D& a, const Polytope3D& b) {
  if (!a.grid().same_as(b.grid()))
    throw DimensionError("hausdorff: grid mismatch");
  return (a.support_numbers() - b.support_numbers()).cwiseAbs().maxCoeff();
}

namespace {

// Polar volume of P - s, or +inf when s leaves the interior.
struct SantaloObjective {
  const Polytope3D& p;
  mutable int evals = 0;

  double operator()(const Eigen::Vector3d& s) const {
    ++evals;
    const Eigen::VectorXd margins =
        p.support_numbers() - p.grid().nodes * s;
    if (margins.minCoeff() <= 0.0) return kInf;
    const int m = p.grid().count();
    std::vector<Eigen::Vector3d> dual(m);
    for (int i = 0; i < m; ++i)
      dual[i] = p.grid().nodes.row(i).transpose() / margins[i];
    return convex_hull(dual).volume();
  }
};

}  // namespace

Eigen::Vector3d santalo_point(const Polytope3D& p) {
  if (p.origin_symmetric()) return Eigen::Vector3d::Zero();

  const SantaloObjective fn{p};
  constexpr int kBudget = 200;
  Eigen::Vector3d s = p.geometry().interior;
  double f0 = fn(s);
  if (!std::isfinite(f0)) {
    // Interior shift sits on a face in pathological cases; nudge via vertex mean.
    s.setZero();
    for (const auto& v : p.vertices()) s += v;
    s /= static_cast<double>(p.vertices().size());
    f0 = fn(s);
    if (!std::isfinite(f0))
      throw ConvergenceError("santalo_point: no interior start");
  }

  // Derivative-free sweep: per-axis parabolic refinement. Probe length stays
  // inside the margin of the start point, so probes remain feasible.
  const double spread = p.support_numbers().maxCoeff();
  double t0 = 0.25 * (p.support_numbers() - p.grid().nodes * s).minCoeff();
  for (int sweep = 0; sweep < 2; ++sweep, t0 *= 0.25) {
    for (int d = 0; d < 3; ++d) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[d] = 1.0;
      const double fp = fn(s + t0 * e);
      const double fm = fn(s - t0 * e);
      const double denom = fp - 2.0 * f0 + fm;
      double step = 0.0;
      if (std::isfinite(fp) && std::isfinite(fm) && denom > 0.0)
        step = std::clamp(0.5 * t0 * (fm - fp) / denom, -2.0 * t0, 2.0 * t0);
      else if (fp < f0)
        step = t0;
      else if (fm < f0)
        step = -t0;
      if (step != 0.0) {
        const double ft = fn(s + step * e);
        if (ft < f0) {
          s += step * e;
          f0 = ft;
        }
      }
      if (fn.evals > kBudget)
        throw ConvergenceError("santalo_point: evaluation budget exhausted");
    }
  }

  // Gradient polish: finite-difference Newton.
  const double delta = 1e-6 * std::max(1.0, spread);
  for (int iter = 0; iter < 12; ++iter) {
    double fpd[3], fmd[3];
    Eigen::Vector3d grad;
    for (int d = 0; d < 3; ++d) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[d] = delta;
      fpd[d] = fn(s + e);
      fmd[d] = fn(s - e);
      grad[d] = (fpd[d] - fmd[d]) / (2.0 * delta);
    }
    if (grad.norm() < 1e-8) return s;
    if (fn.evals > kBudget)
      throw ConvergenceError("santalo_point: evaluation budget exhausted");

    Eigen::Matrix3d hess;
    for (int d = 0; d < 3; ++d)
      hess(d, d) = (fpd[d] - 2.0 * f0 + fmd[d]) / (delta * delta);
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        Eigen::Vector3d ea = Eigen::Vector3d::Zero(), eb = Eigen::Vector3d::Zero();
        ea[a] = delta;
        eb[b] = delta;
        const double v = (fn(s + ea + eb) - fn(s + ea - eb) - fn(s - ea + eb) +
                          fn(s - ea - eb)) /
                         (4.0 * delta * delta);
        hess(a, b) = hess(b, a) = v;
      }
    }

    Eigen::Vector3d dir;
    const Eigen::LLT<Eigen::Matrix3d> llt(hess);
    if (llt.info() == Eigen::Success)
      dir = -llt.solve(grad);
    else
      dir = -grad * (delta / grad.norm());

    if (dir.norm() < 1e-5 * std::max(1.0, spread)) {
      // Endgame: the merit change is below rounding, take the step as is.
      const double ft = fn(s + dir);
      if (std::isfinite(ft)) {
        s += dir;
        f0 = ft;
      }
      continue;
    }

    double t = 1.0;
    bool ok = false;
    for (int half = 0; half < 30; ++half, t *= 0.5) {
      const double ft = fn(s + t * dir);
      if (ft < f0) {
        s += t * dir;
        f0 = ft;
        ok = true;
        break;
      }
      if (fn.evals > kBudget)
        throw ConvergenceError("santalo_point: evaluation budget exhausted");
    }
    if (!ok) throw ConvergenceError("santalo_point: stalled line search");
  }
  throw ConvergenceError("santalo_point: no convergence in budget");
}

}  // namespace curvimg
