#include "curvimg/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace curvimg {

namespace {

constexpr double kPi = std::numbers::pi;

// Midpoint of a sphere edge, normalized. Negated inputs produce the exactly
// negated output, which keeps antipodal pairs exact through subdivision.
Eigen::Vector3d arc_midpoint(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Eigen::Vector3d m = a + b;
  return m / m.norm();
}

struct IcoMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

IcoMesh icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double nrm = std::sqrt(1.0 + phi * phi);
  const double a = 1.0 / nrm, c = phi / nrm;
  IcoMesh m;
  m.verts = {
      {-a, c, 0}, {a, c, 0},  {-a, -c, 0}, {a, -c, 0}, {0, -a, c}, {0, a, c},
      {0, -a, -c}, {0, a, -c}, {c, 0, -a}, {c, 0, a},  {-c, 0, -a}, {-c, 0, a},
  };
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint_of;
  auto midpoint = [&](int i, int j) {
    auto key = std::minmax(i, j);
    auto it = midpoint_of.find(key);
    if (it != midpoint_of.end()) return it->second;
    int idx = static_cast<int>(out.verts.size());
    out.verts.push_back(arc_midpoint(in.verts[key.first], in.verts[key.second]));
    midpoint_of.emplace(key, idx);
    return idx;
  };
  for (const auto& f : in.faces) {
    int ab = midpoint(f[0], f[1]);
    int bc = midpoint(f[1], f[2]);
    int ca = midpoint(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

// Circumcenter of a spherical triangle, on the same side as the face.
Eigen::Vector3d face_circumcenter(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                  const Eigen::Vector3d& c) {
  Eigen::Vector3d n = (b - a).cross(c - a);
  double len = n.norm();
  if (len <= 0) throw GeometryError("degenerate icosphere face");
  n /= len;
  if (n.dot(a + b + c) < 0) n = -n;
  return n;
}

// Area of a convex spherical polygon via the angle-excess formula.
double spherical_polygon_area(const std::vector<Eigen::Vector3d>& corners) {
  const int m = static_cast<int>(corners.size());
  double angle_sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const Eigen::Vector3d& prev = corners[(k + m - 1) % m];
    const Eigen::Vector3d& cur = corners[k];
    const Eigen::Vector3d& next = corners[(k + 1) % m];
    Eigen::Vector3d tp = prev - prev.dot(cur) * cur;
    Eigen::Vector3d tn = next - next.dot(cur) * cur;
    double denom = tp.norm() * tn.norm();
    if (denom <= 0) throw GeometryError("degenerate Voronoi cell corner");
    double cosang = std::clamp(tp.dot(tn) / denom, -1.0, 1.0);
    angle_sum += std::acos(cosang);
  }
  return angle_sum - (m - 2) * kPi;
}

void pair_antipodes(SphereGrid& g) {
  const int n = g.count();
  g.antipode.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (g.antipode[i] >= 0) continue;
    Eigen::VectorXd target = -g.nodes.row(i).transpose();
    int best = -1;
    double best_d = 1e300;
    for (int j = 0; j < n; ++j) {
      if (j == i || g.antipode[j] >= 0) continue;
      double d = (g.nodes.row(j).transpose() - target).norm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0 || best_d > 1e-9)
      throw GeometryError("grid is not antipodally symmetric");
    g.nodes.row(best) = -g.nodes.row(i); // force exactness
    g.antipode[i] = best;
    g.antipode[best] = i;
  }
}

} // namespace

double SphereGrid::sphere_measure() const { return dim == 2 ? 2.0 * kPi : 4.0 * kPi; }

bool SphereGrid::same_as(const SphereGrid& other) const {
  if (this == &other) return true;
  if (dim != other.dim || count() != other.count()) return false;
  return (nodes - other.nodes).cwiseAbs().maxCoeff() < 1e-14;
}

GridPtr make_circle_grid(int node_count) {
  if (node_count < 4) throw ConfigError("circle grid needs at least 4 nodes");
  auto g = std::make_shared<SphereGrid>();
  g->dim = 2;
  const int m = node_count;
  g->nodes.resize(m, 2);
  g->theta.resize(m);
  g->weights = Eigen::VectorXd::Constant(m, 2.0 * kPi / m);
  const int half = m / 2;
  for (int k = 0; k < m; ++k) {
    double t = 2.0 * kPi * k / m;
    g->theta[k] = t;
    if (m % 2 == 0 && k >= half) {
      g->nodes.row(k) = -g->nodes.row(k - half); // exact antipode
    } else {
      g->nodes(k, 0) = std::cos(t);
      g->nodes(k, 1) = std::sin(t);
    }
  }
  if (m % 2 == 0) {
    g->antipode.resize(m);
    for (int k = 0; k < m; ++k) g->antipode[k] = (k + half) % m;
  } else {
    g->antipode.assign(m, -1);
  }
  return g;
}

GridPtr make_icosphere_grid(int level) {
  if (level < 0 || level > 6) throw ConfigError("icosphere level must be in [0,6]");
  IcoMesh mesh = icosahedron();
  for (int l = 0; l < level; ++l) mesh = subdivide(mesh);

  const int n = static_cast<int>(mesh.verts.size());
  auto g = std::make_shared<SphereGrid>();
  g->dim = 3;
  g->nodes.resize(n, 3);
  for (int i = 0; i < n; ++i) g->nodes.row(i) = mesh.verts[i].transpose();
  g->faces = mesh.faces;
  pair_antipodes(*g);
  for (int i = 0; i < n; ++i) mesh.verts[i] = g->nodes.row(i).transpose();

  // Voronoi cell of a node = spherical polygon of adjacent face circumcenters.
  std::vector<Eigen::Vector3d> centers(mesh.faces.size());
  std::vector<std::vector<int>> faces_at(n);
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    centers[f] = face_circumcenter(mesh.verts[tri[0]], mesh.verts[tri[1]], mesh.verts[tri[2]]);
    for (int v : tri) faces_at[v].push_back(static_cast<int>(f));
  }

  g->weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d u = mesh.verts[i];
    // Tangent-plane angular order of the adjacent circumcenters.
    Eigen::Vector3d e1 = u.unitOrthogonal();
    Eigen::Vector3d e2 = u.cross(e1);
    std::vector<std::pair<double, int>> order;
    for (int f : faces_at[i]) {
      Eigen::Vector3d d = centers[f] - centers[f].dot(u) * u;
      order.emplace_back(std::atan2(d.dot(e2), d.dot(e1)), f);
    }
    std::sort(order.begin(), order.end());
    std::vector<Eigen::Vector3d> cell;
    cell.reserve(order.size());
    for (const auto& [ang, f] : order) cell.push_back(centers[f]);
    g->weights[i] = spherical_polygon_area(cell);
  }

  // Exact even symmetry, then exact total measure.
  for (int i = 0; i < n; ++i) {
    int j = g->antipode[i];
    if (j > i) {
      double w = 0.5 * (g->weights[i] + g->weights[j]);
      g->weights[i] = g->weights[j] = w;
    }
  }
  g->weights *= 4.0 * kPi / g->weights.sum();
  return g;
}

GridPtr make_sphere_grid(int dim, int resolution) {
  if (dim == 2) return make_circle_grid(resolution);
  if (dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  if (resolution < 12) return make_icosphere_grid(resolution);
  for (int level = 0; level <= 6; ++level) {
    if (10 * (1 << (2 * level)) + 2 == resolution) return make_icosphere_grid(level);
  }
  throw ConfigError("icosphere node count must be 10*4^level+2 (12, 42, 162, 642, 2562, ...)");
}

double integrate(const Eigen::VectorXd& samples, const SphereGrid& grid) {
  if (samples.size() != grid.count())
    throw DimensionError("integrate: sample count does not match grid");
  return grid.weights.dot(samples);
}

Eigen::VectorXd vector_moment(const Eigen::VectorXd& samples, const SphereGrid& grid) {
  if (samples.size() != grid.count())
    throw DimensionError("vector_moment: sample count does not match grid");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.dim);
  for (int i = 0; i < grid.count(); ++i) {
    int j = grid.antipode.empty() ? -1 : grid.antipode[i];
    if (j >= 0 && j < i) continue; // handled with its mate
    Eigen::VectorXd term = grid.weights[i] * samples[i] * grid.nodes.row(i).transpose();
    if (j > i) term += grid.weights[j] * samples[j] * grid.nodes.row(j).transpose();
    acc += term;
  }
  return acc;
}

Density make_uniform_density(GridPtr grid, double value) {
  if (value <= 0) throw ConfigError("density must be positive");
  Density d;
  d.values = Eigen::VectorXd::Constant(grid->count(), value);
  d.grid = std::move(grid);
  d.even = true;
  return d;
}

Density make_density_from_samples(GridPtr grid, Eigen::VectorXd samples) {
  if (samples.size() != grid->count())
    throw DimensionError("density: sample count does not match grid");
  if (samples.minCoeff() <= 0) throw ConfigError("density must be positive at every node");
  Density d;
  d.values = std::move(samples);
  d.grid = std::move(grid);
  // Even only if exactly symmetric; symmetrize when within rounding error.
  d.even = true;
  for (int i = 0; i < d.grid->count(); ++i) {
    int j = d.grid->antipode.empty() ? -1 : d.grid->antipode[i];
    if (j < 0) {
      d.even = false;
      break;
    }
    double rel = std::abs(d.values[i] - d.values[j]) /
                 std::max(1.0, std::max(std::abs(d.values[i]), std::abs(d.values[j])));
    if (rel > 1e-12) {
      d.even = false;
      break;
    }
  }
  if (d.even) {
    for (int i = 0; i < d.grid->count(); ++i) {
      int j = d.grid->antipode[i];
      if (j > i) {
        double v = 0.5 * (d.values[i] + d.values[j]);
        d.values[i] = d.values[j] = v;
      }
    }
  }
  return d;
}

Density make_density(GridPtr grid, const std::function<double(const Eigen::VectorXd&)>& fn) {
  Eigen::VectorXd v(grid->count());
  for (int i = 0; i < grid->count(); ++i) v[i] = fn(grid->nodes.row(i).transpose());
  return make_density_from_samples(std::move(grid), std::move(v));
}

}  // namespace curvimg
