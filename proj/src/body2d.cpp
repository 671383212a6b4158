#include "curvimg/body2d.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "curvimg/errors.hpp"

namespace curvimg {

namespace {

constexpr double kConvexityFloor = 1e-10;

// Accumulates sum_k coef-weighted harmonics at one node, using the stored
// node components so evaluation and quadrature see identical angles.
struct HarmonicWalker {
  double c1, s1;   // cos t, sin t
  double ck, sk;   // cos kt, sin kt, starts at k = 0
  explicit HarmonicWalker(double c, double s) : c1(c), s1(s), ck(1.0), sk(0.0) {}
  void step() {
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
};

}  // namespace

Body2D::Body2D(GridPtr grid, Eigen::VectorXd cos_coef, Eigen::VectorXd sin_coef)
    : grid_(std::move(grid)), cos_(std::move(cos_coef)), sin_(std::move(sin_coef)) {
  if (!grid_ || grid_->dim != 2) throw DimensionError("Body2D requires a circle grid");
  if (cos_.size() != sin_.size() || cos_.size() < 1)
    throw DimensionError("coefficient vectors must share a positive length");
  const int m = grid_->count();
  const int n = degree();
  if (2 * n >= m)
    throw DimensionError("degree too high for grid: need 2*degree < node count");
  sin_[0] = 0.0;

  h_.resize(m);
  f_.resize(m);
  for (int j = 0; j < m; ++j) {
    HarmonicWalker w(grid_->nodes(j, 0), grid_->nodes(j, 1));
    double h = cos_[0];
    double f = cos_[0];
    for (int k = 1; k <= n; ++k) {
      w.step();
      const double term = cos_[k] * w.ck + sin_[k] * w.sk;
      h += term;
      f += (1.0 - double(k) * double(k)) * term;
    }
    h_[j] = h;
    f_[j] = f;
  }
  if (f_.minCoeff() < kConvexityFloor)
    throw GeometryError("degenerate body: curvature function below 1e-10");
}

bool Body2D::origin_symmetric() const {
  for (int k = 1; k <= degree(); k += 2)
    if (cos_[k] != 0.0 || sin_[k] != 0.0) return false;
  return true;
}

double Body2D::support_at(double theta) const {
  HarmonicWalker w(std::cos(theta), std::sin(theta));
  double h = cos_[0];
  for (int k = 1; k <= degree(); ++k) {
    w.step();
    h += cos_[k] * w.ck + sin_[k] * w.sk;
  }
  return h;
}

double Body2D::support_derivative_at(double theta) const {
  HarmonicWalker w(std::cos(theta), std::sin(theta));
  double d = 0.0;
  for (int k = 1; k <= degree(); ++k) {
    w.step();
    d += double(k) * (sin_[k] * w.ck - cos_[k] * w.sk);
  }
  return d;
}

Body2D::Point Body2D::boundary_point(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double h = support_at(theta);
  const double dh = support_derivative_at(theta);
  return Point(h * c - dh * s, h * s + dh * c);
}

Body2D make_disk(GridPtr grid, double radius) {
  if (radius <= 0) throw GeometryError("disk radius must be positive");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(1), b = Eigen::VectorXd::Zero(1);
  a[0] = radius;
  return Body2D(std::move(grid), std::move(a), std::move(b));
}

Body2D make_ellipse(GridPtr grid, double semi_a, double semi_b) {
  if (semi_a <= 0 || semi_b <= 0) throw GeometryError("ellipse semi-axes must be positive");
  const int m = grid->count();
  Eigen::VectorXd h(m);
  for (int j = 0; j < m; ++j) {
    const double c = grid->nodes(j, 0), s = grid->nodes(j, 1);
    h[j] = std::sqrt(semi_a * semi_a * c * c + semi_b * semi_b * s * s);
  }
  return body_from_support_samples(std::move(grid), h);
}

Body2D body_from_support_samples(GridPtr grid, const Eigen::VectorXd& h, int degree) {
  const int m = grid->count();
  if (h.size() != m) throw DimensionError("sample count does not match grid");
  if (degree < 0) degree = m / 4;
  if (2 * degree >= m) throw DimensionError("projection degree too high for grid");

  // Exactly antipodally symmetric samples get structurally zero odd modes,
  // so origin symmetry survives round-trips bit for bit.
  bool even_samples = !grid->antipode.empty();
  for (int j = 0; even_samples && j < m; ++j)
    if (h[j] != h[grid->antipode[j]]) even_samples = false;

  Eigen::VectorXd a = Eigen::VectorXd::Zero(degree + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(degree + 1);
  for (int j = 0; j < m; ++j) {
    HarmonicWalker w(grid->nodes(j, 0), grid->nodes(j, 1));
    a[0] += h[j];
    for (int k = 1; k <= degree; ++k) {
      w.step();
      if (even_samples && (k % 2 != 0)) continue;
      a[k] += h[j] * w.ck;
      b[k] += h[j] * w.sk;
    }
  }
  a[0] /= m;
  a.tail(degree) *= 2.0 / m;
  b.tail(degree) *= 2.0 / m;
  return Body2D(std::move(grid), std::move(a), std::move(b));
}

Body2D random_body(GridPtr grid, std::uint64_t seed, int degree, double amplitude,
                   bool even_only) {
  if (!(amplitude >= 0 && amplitude < 1))
    throw ConfigError("random body amplitude must lie in [0, 1)");
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    // 53 mantissa bits -> [0, 1); platform-independent unlike the
    // distribution adapters.
    return double(rng() >> 11) * 0x1p-53;
  };
  Eigen::VectorXd a = Eigen::VectorXd::Zero(degree + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(degree + 1);
  a[0] = 1.0;
  for (int k = 2; k <= degree; ++k) {
    const double ca = 2.0 * unit() - 1.0;
    const double cb = 2.0 * unit() - 1.0;
    if (even_only && (k % 2 != 0)) continue;
    const double decay = amplitude / (double(k) * double(k) * double(k));
    a[k] = decay * ca;
    b[k] = decay * cb;
  }

  // Worst-case curvature dip of the perturbation alone; rescale so the
  // composite f = 1 + pert stays at or above 0.1.
  const int m = grid->count();
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    HarmonicWalker w(grid->nodes(j, 0), grid->nodes(j, 1));
    w.step();  // skip k = 1
    double pert = 0.0;
    for (int k = 2; k <= degree; ++k) {
      w.step();
      pert += (1.0 - double(k) * double(k)) * (a[k] * w.ck + b[k] * w.sk);
    }
    worst = std::min(worst, pert);
  }
  if (worst < -0.9) {
    const double scale = 0.9 / (-worst);
    a.tail(degree) *= scale;
    b.tail(degree) *= scale;
  }
  return Body2D(std::move(grid), std::move(a), std::move(b));
}

Eigen::VectorXd curvature_fn(const Body2D& body) { return body.curvature_samples(); }

double mixed_volume(const Body2D& k, const Body2D& l) {
  if (!k.grid()->same_as(*l.grid())) throw DimensionError("mixed volume needs a shared grid");
  return 0.5 * integrate(l.support_samples().cwiseProduct(k.curvature_samples()), *k.grid());
}

double volume(const Body2D& body) { return mixed_volume(body, body); }

double polar_volume(const Body2D& body) {
  if (!body.origin_interior())
    throw GeometryError("polar volume needs the origin in the interior");
  return 0.5 * integrate(body.support_samples().array().square().inverse().matrix(),
                         *body.grid());
}

Body2D translate(const Body2D& body, const Eigen::Vector2d& shift) {
  Eigen::VectorXd a = body.cos_coef(), b = body.sin_coef();
  if (a.size() < 2) {
    a.conservativeResize(2);
    b.conservativeResize(2);
    a[1] = b[1] = 0.0;
  }
  a[1] += shift[0];
  b[1] += shift[1];
  return Body2D(body.grid(), std::move(a), std::move(b));
}

Eigen::Vector2d steiner_point(const Body2D& body) {
  if (body.degree() < 1) return Eigen::Vector2d::Zero();
  return Eigen::Vector2d(body.cos_coef()[1], body.sin_coef()[1]);
}

Eigen::Vector2d santalo_point(const Body2D& body) {
  // Minimizer of x -> vol((K - x)^polar); stationarity is
  // integrate(u / (h - <x,u>)^3) = 0. Damped Newton from the Steiner point,
  // which is interior for every valid body.
  const auto& g = *body.grid();
  const int m = g.count();
  const Eigen::VectorXd& h = body.support_samples();
  Eigen::Vector2d x = steiner_point(body);

  auto margin = [&](const Eigen::Vector2d& p) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      const Eigen::Vector2d u = g.nodes.row(j).transpose();
      lo = std::min(lo, h[j] - u.dot(p));
    }
    return lo;
  };
  if (margin(x) <= 0) throw GeometryError("santalo point: no interior starting point");

  const double scale = body.support_samples().maxCoeff();
  const double tol = 1e-10 / (scale * scale * scale);
  for (int it = 0; it < 100; ++it) {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    for (int j = 0; j < m; ++j) {
      const Eigen::Vector2d u = g.nodes.row(j).transpose();
      const double r = h[j] - u.dot(x);
      const double w = g.weights[j];
      const double r3 = r * r * r;
      grad += w * u / r3;
      hess += (3.0 * w / (r3 * r)) * (u * u.transpose());
    }
    if (grad.norm() < tol) return x;
    Eigen::Vector2d step = -hess.ldlt().solve(grad);
    double t = 1.0;
    while (t > 1e-12 && margin(x + t * step) <= 0) t *= 0.5;
    if (t <= 1e-12) throw ConvergenceError("santalo point: step collapsed");
    x += t * step;
  }
  throw ConvergenceError("santalo point: Newton did not converge in 100 steps");
}

double hausdorff(const Body2D& k, const Body2D& l) {
  if (!k.grid()->same_as(*l.grid())) throw DimensionError("hausdorff needs a shared grid");
  return (k.support_samples() - l.support_samples()).cwiseAbs().maxCoeff();
}

Body2D symmetrize(const Body2D& body) {
  Eigen::VectorXd a = body.cos_coef(), b = body.sin_coef();
  for (int k = 1; k <= body.degree(); k += 2) a[k] = b[k] = 0.0;
  return Body2D(body.grid(), std::move(a), std::move(b));
}

}  // namespace curvimg
