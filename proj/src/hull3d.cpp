#include "curvimg/hull3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "curvimg/errors.hpp"

namespace curvimg {
namespace {

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d normal;
  double offset = 0.0;
  std::vector<int> outside;
  bool alive = true;
};

double plane_dist(const Face& f, const Eigen::Vector3d& p) {
  return f.normal.dot(p) - f.offset;
}

}  // namespace

double Hull3D::volume() const {
  double six_v = 0.0;
  for (const auto& f : facets) {
    const Eigen::Vector3d a = points[f[0]] - interior;
    const Eigen::Vector3d b = points[f[1]] - interior;
    const Eigen::Vector3d c = points[f[2]] - interior;
    six_v += a.dot(b.cross(c));
  }
  return six_v / 6.0;
}

bool Hull3D::contains(const Eigen::Vector3d& p, double eps) const {
  for (const auto& f : facets) {
    const Eigen::Vector3d a = points[f[0]];
    Eigen::Vector3d n =
        (points[f[1]] - a).cross(points[f[2]] - a);
    const double nn = n.norm();
    if (nn == 0.0) continue;
    n /= nn;
    if (n.dot(p - a) > eps) return false;
  }
  return true;
}

Hull3D convex_hull(const std::vector<Eigen::Vector3d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) throw GeometryError("convex_hull: need at least 4 points");

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  if (!(scale > 0.0)) throw GeometryError("convex_hull: all points at origin");
  const double eps = 1e-12 * scale;

  // Initial simplex: spread pair among axis extremes, then farthest from the
  // line, then farthest from the plane.
  int ax_min[3], ax_max[3];
  for (int d = 0; d < 3; ++d) {
    ax_min[d] = ax_max[d] = 0;
    for (int i = 1; i < n; ++i) {
      if (points[i][d] < points[ax_min[d]][d]) ax_min[d] = i;
      if (points[i][d] > points[ax_max[d]][d]) ax_max[d] = i;
    }
  }
  int i0 = 0, i1 = 0;
  double best = -1.0;
  for (int d = 0; d < 3; ++d) {
    const double spread = (points[ax_max[d]] - points[ax_min[d]]).norm();
    if (spread > best) {
      best = spread;
      i0 = ax_min[d];
      i1 = ax_max[d];
    }
  }
  if (best <= eps) throw GeometryError("convex_hull: points coincide");

  const Eigen::Vector3d dir = (points[i1] - points[i0]).normalized();
  int i2 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d r = points[i] - points[i0];
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) throw GeometryError("convex_hull: points are collinear");

  Eigen::Vector3d nrm =
      (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(points[i] - points[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) throw GeometryError("convex_hull: points are coplanar");

  Hull3D hull;
  hull.points = points;
  hull.interior =
      (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

  std::vector<Face> faces;
  auto make_face = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    Eigen::Vector3d nn =
        (points[b] - points[a]).cross(points[c] - points[a]);
    const double len = nn.norm();
    if (len <= 0.0) throw GeometryError("convex_hull: degenerate facet");
    nn /= len;
    if (nn.dot(hull.interior - points[a]) > 0.0) {
      std::swap(f.v[1], f.v[2]);
      nn = -nn;
    }
    f.normal = nn;
    f.offset = nn.dot(points[f.v[0]]);
    return f;
  };

  faces.push_back(make_face(i0, i1, i2));
  faces.push_back(make_face(i0, i1, i3));
  faces.push_back(make_face(i0, i2, i3));
  faces.push_back(make_face(i1, i2, i3));

  // Conflict lists: each point goes to the face it is farthest outside of.
  auto assign_points = [&](const std::vector<int>& ids,
                           const std::vector<int>& face_ids) {
    for (int pid : ids) {
      double d_best = eps;
      int f_best = -1;
      for (int fid : face_ids) {
        if (!faces[fid].alive) continue;
        const double d = plane_dist(faces[fid], points[pid]);
        if (d > d_best) {
          d_best = d;
          f_best = fid;
        }
      }
      if (f_best >= 0) faces[f_best].outside.push_back(pid);
    }
  };
  {
    std::vector<int> all_pts, all_faces = {0, 1, 2, 3};
    for (int i = 0; i < n; ++i)
      if (i != i0 && i != i1 && i != i2 && i != i3) all_pts.push_back(i);
    assign_points(all_pts, all_faces);
  }

  // Insertion loop.
  for (;;) {
    int fid = -1;
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
      if (faces[i].alive && !faces[i].outside.empty()) {
        fid = i;
        break;
      }
    }
    if (fid < 0) break;

    // Farthest conflict point of this face.
    int apex = -1;
    double d_best = -1.0;
    for (int pid : faces[fid].outside) {
      const double d = plane_dist(faces[fid], points[pid]);
      if (d > d_best) {
        d_best = d;
        apex = pid;
      }
    }
    const Eigen::Vector3d p = points[apex];

    // Visible region (connected since p is outside), then horizon edges:
    // directed edges of visible faces whose reverse lives on a hidden face.
    std::vector<int> visible;
    std::vector<char> is_visible(faces.size(), 0);
    for (int i = 0; i < static_cast<int>(faces.size()); ++i) {
      if (faces[i].alive && plane_dist(faces[i], p) > eps) {
        visible.push_back(i);
        is_visible[i] = 1;
      }
    }

    std::map<std::pair<int, int>, int> edge_owner;
    for (int vf : visible) {
      const auto& t = faces[vf].v;
      for (int e = 0; e < 3; ++e)
        edge_owner[{t[e], t[(e + 1) % 3]}] = vf;
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [edge, owner] : edge_owner) {
      (void)owner;
      if (edge_owner.find({edge.second, edge.first}) == edge_owner.end())
        horizon.push_back(edge);
    }

    std::vector<int> orphans;
    for (int vf : visible) {
      faces[vf].alive = false;
      for (int pid : faces[vf].outside)
        if (pid != apex) orphans.push_back(pid);
      faces[vf].outside.clear();
    }

    std::vector<int> fresh;
    for (const auto& [a, b] : horizon) {
      faces.push_back(make_face(a, b, apex));
      fresh.push_back(static_cast<int>(faces.size()) - 1);
    }
    assign_points(orphans, fresh);
  }

  for (const auto& f : faces)
    if (f.alive) hull.facets.push_back(f.v);
  return hull;
}

}  // namespace curvimg
