#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "curvimg/errors.hpp"
#include "curvimg/hull3d.hpp"
#include "curvimg/polytope3d.hpp"

using namespace curvimg;
using std::numbers::pi;

namespace {

double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
}

std::vector<Eigen::Vector3d> cube_corners() {
  std::vector<Eigen::Vector3d> pts;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) pts.emplace_back(sx, sy, sz);
  return pts;
}

}  // namespace

TEST_CASE("hull of a tetrahedron") {
  std::vector<Eigen::Vector3d> pts = {
      {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Hull3D hull = convex_hull(pts);
  CHECK(hull.facets.size() == 4);
  CHECK(hull.volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("hull volume is exact under affine images of a cube") {
  // |det A| * 8 is an exact oracle for the hull of the mapped corners;
  // interior points (convex combinations) must not disturb it.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::Matrix3d a;
    double det = 0.0;
    do {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = uniform_pm1(rng);
      det = a.determinant();
    } while (std::abs(det) < 0.1);

    std::vector<Eigen::Vector3d> pts;
    for (const auto& c : cube_corners()) pts.push_back(a * c);
    for (int k = 0; k < 40; ++k) {
      Eigen::Vector3d mix(uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng));
      pts.push_back(a * (0.9 * mix));
    }
    const Hull3D hull = convex_hull(pts);
    CHECK(hull.volume() ==
          doctest::Approx(8.0 * std::abs(det)).epsilon(1e-12));
    for (const auto& p : pts) CHECK(hull.contains(p, 1e-9));
  }
}

TEST_CASE("hull rejects degenerate input") {
  std::vector<Eigen::Vector3d> line = {
      {0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
  CHECK_THROWS_AS(convex_hull(line), GeometryError);
  std::vector<Eigen::Vector3d> plane = {
      {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0.3, 0.4, 1}};
  CHECK_THROWS_AS(convex_hull(plane), GeometryError);
}

TEST_CASE("support geometry of the cube") {
  Eigen::MatrixXd normals(6, 3);
  normals << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  const Eigen::VectorXd h = Eigen::VectorXd::Ones(6);
  const SupportGeometry geo = support_geometry(normals, h);

  CHECK(geo.volume == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(geo.vertices.size() == 8);
  CHECK(geo.edges.size() == 12);
  for (int i = 0; i < 6; ++i) {
    CHECK(geo.areas[i] == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(geo.cycles[i].size() == 4);
  }
  CHECK((normals.transpose() * geo.areas).norm() < 1e-12);
}

TEST_CASE("support geometry of the regular octahedron") {
  Eigen::MatrixXd normals(8, 3);
  int r = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        normals.row(r++) = Eigen::Vector3d(sx, sy, sz).normalized().transpose();
  const double inv = 1.0 / std::sqrt(3.0);
  const SupportGeometry geo =
      support_geometry(normals, Eigen::VectorXd::Constant(8, inv));

  // |x|_1 <= 1: volume 4/3, eight equilateral facets of area sqrt(3)/2.
  CHECK(geo.volume == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(geo.vertices.size() == 6);
  for (int i = 0; i < 8; ++i)
    CHECK(geo.areas[i] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("support geometry shifts to an interior point when needed") {
  // Cube of side 2 centered at (-1.5, 0, 0): the +x support number is
  // negative, so the origin is outside.
  Eigen::MatrixXd normals(6, 3);
  normals << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  Eigen::VectorXd h(6);
  h << -0.5, 2.5, 1, 1, 1, 1;
  const SupportGeometry geo = support_geometry(normals, h);
  CHECK(geo.volume == doctest::Approx(8.0).epsilon(1e-12));
  for (int i = 0; i < 6; ++i)
    CHECK(geo.areas[i] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("area jacobian: exactness and homogeneity") {
  auto grid = make_icosphere_grid(1);  // 42 nodes keeps the FD sweep cheap
  const Polytope3D body = random_polytope(grid, 7, 0.15);
  const SupportGeometry& geo = body.geometry();
  const Eigen::MatrixXd jac = area_jacobian(grid->nodes, geo);

  // Areas are 2-homogeneous in h, so J h = 2 A (Euler identity).
  const Eigen::VectorXd jh = jac * body.support_numbers();
  CHECK((jh - 2.0 * geo.areas).cwiseAbs().maxCoeff() < 1e-9);

  CHECK((jac - jac.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // Finite differences of the area map agree with the closed form.
  const double delta = 1e-6;
  Eigen::VectorXd hp = body.support_numbers(), hm = body.support_numbers();
  for (int j = 0; j < 42; j += 5) {
    hp[j] += delta;
    hm[j] -= delta;
    const Eigen::VectorXd col = (support_geometry(grid->nodes, hp).areas -
                                 support_geometry(grid->nodes, hm).areas) /
                                (2.0 * delta);
    CHECK((col - jac.col(j)).cwiseAbs().maxCoeff() < 1e-6);
    hp[j] -= delta;
    hm[j] += delta;
  }
}

TEST_CASE("grid ball: volume, activity, closedness") {
  auto grid = make_icosphere_grid(3);
  const Polytope3D ball = make_ball3(grid);
  CHECK(ball.volume() == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-2));
  CHECK(ball.volume() > 4.0 * pi / 3.0);  // circumscribed
  CHECK(ball.active_count() == grid->count());
  CHECK(ball.closedness_defect() < 1e-10);
  CHECK(ball.origin_symmetric());
}

TEST_CASE("cube on the grid") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D cube = make_cube3(grid);
  CHECK(cube.volume() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(cube.active_count() == 6);
  CHECK(cube.support_eval({1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-13));
  const Eigen::Vector3d corner = Eigen::Vector3d(1, 1, 1).normalized();
  CHECK(cube.support_eval(corner) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("active support numbers match support_eval") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D body = random_polytope(grid, 11, 0.15);
  for (int i = 0; i < grid->count(); ++i) {
    if (body.facet_areas()[i] <= 0.0) continue;
    const Eigen::Vector3d u = grid->nodes.row(i).transpose();
    CHECK(std::abs(body.support_eval(u) - body.support_numbers()[i]) < 1e-12);
  }
}

TEST_CASE("volume identity (1/3) sum A_i h_i holds off-center") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D body = random_polytope(grid, 3, 0.2);
  const Polytope3D moved = translate(body, {0.4, -0.25, 0.15});
  CHECK(moved.volume() == doctest::Approx(body.volume()).epsilon(1e-12));
  const double direct =
      moved.facet_areas().dot(moved.support_numbers()) / 3.0;
  CHECK(std::abs(direct - moved.volume()) < 1e-10);
  CHECK(moved.closedness_defect() < 1e-10);
}

TEST_CASE("volume under grid refinement") {
  // Fixed smooth support function sampled at two resolutions.
  Eigen::Matrix3d q;
  q << 0.3, 0.1, -0.05, 0.1, -0.2, 0.08, -0.05, 0.08, -0.1;
  auto sample = [&](const SphereGrid& g) {
    Eigen::VectorXd h(g.count());
    for (int i = 0; i < g.count(); ++i) {
      const Eigen::Vector3d u = g.nodes.row(i).transpose();
      h[i] = 1.0 + u.dot(q * u);
    }
    return h;
  };
  auto g3 = make_icosphere_grid(3);
  auto g4 = make_icosphere_grid(4);
  const double v3 = Polytope3D(g3, sample(*g3)).volume();
  const double v4 = Polytope3D(g4, sample(*g4)).volume();
  CHECK(std::abs(v4 - v3) / v3 < 1e-2);
}

TEST_CASE("polar volumes") {
  auto grid = make_icosphere_grid(3);

  const Polytope3D ball = make_ball3(grid);
  const double vb = ball.volume();
  const double vp = polar_volume(ball);
  CHECK(std::abs(vp - vb) / vb < 2e-2);  // inscribed hull vs circumscribed body

  const Polytope3D cube = make_cube3(grid);
  CHECK(polar_volume(cube) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  const Polytope3D big(grid, 2.0 * cube.support_numbers());
  CHECK(polar_volume(big) ==
        doctest::Approx(polar_volume(cube) / 8.0).epsilon(1e-10));

  const Polytope3D outside = translate(cube, {1.5, 0, 0});
  CHECK_THROWS_AS(polar_volume(outside), GeometryError);
}

TEST_CASE("mixed volume V1") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D cube = make_cube3(grid);
  const Polytope3D ball = make_ball3(grid);

  CHECK(mixed_volume(cube, cube) == doctest::Approx(8.0).epsilon(1e-12));
  // (1/3) * surface area of the cube.
  CHECK(mixed_volume(cube, ball) == doctest::Approx(8.0).epsilon(1e-12));

  for (unsigned seed : {1u, 2u, 3u}) {
    const Polytope3D k = random_polytope(grid, seed, 0.18);
    const Polytope3D l = random_polytope(grid, seed + 100, 0.18, true);
    CHECK(mixed_volume(k, k) == doctest::Approx(k.volume()).epsilon(1e-12));
    const double v1 = mixed_volume(k, l);
    CHECK(v1 * v1 * v1 >=
          k.volume() * k.volume() * l.volume() - 1e-9);
  }
}

TEST_CASE("santalo point: symmetry, equivariance, gradient") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D cube = make_cube3(grid);
  CHECK(santalo_point(cube).norm() == 0.0);

  const Eigen::Vector3d c(0.3, -0.2, 0.1);
  const Eigen::Vector3d s_moved = santalo_point(translate(cube, c));
  CHECK((s_moved - c).norm() < 1e-6);

  const Polytope3D body = random_polytope(grid, 17, 0.15);
  const Eigen::Vector3d s = santalo_point(body);
  // Verify the first-order condition by central differences.
  const double delta = 1e-5;
  for (int d = 0; d < 3; ++d) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[d] = delta;
    const double fp = polar_volume(translate(body, -(s + e)));
    const double fm = polar_volume(translate(body, -(s - e)));
    CHECK(std::abs(fp - fm) / (2.0 * delta) < 1e-5);
  }
}

TEST_CASE("Blaschke-Santalo bound on the grid") {
  auto grid = make_icosphere_grid(3);
  const double bound = std::pow(4.0 * pi / 3.0, 2);

  const Polytope3D ball = make_ball3(grid);
  const double prod_ball = ball.volume() * polar_volume(ball);
  CHECK(prod_ball <= bound + 1e-6);
  CHECK(prod_ball > 0.95 * bound);

  for (unsigned seed : {5u, 9u}) {
    const Polytope3D k = random_polytope(grid, seed, 0.15);
    const Eigen::Vector3d s = santalo_point(k);
    const double prod = k.volume() * polar_volume(translate(k, -s));
    CHECK(prod <= bound + 1e-6);
  }
}

TEST_CASE("translate and hausdorff") {
  auto grid = make_icosphere_grid(2);
  const Polytope3D body = random_polytope(grid, 23, 0.2);
  CHECK(hausdorff(body, body) == 0.0);

  const Eigen::Vector3d c(0.2, 0.05, -0.1);
  const Polytope3D moved = translate(body, c);
  for (int i = 0; i < grid->count(); ++i) {
    const double expect =
        body.support_numbers()[i] + grid->nodes.row(i).dot(c);
    CHECK(moved.support_numbers()[i] == expect);
  }
  CHECK(hausdorff(body, moved) <= c.norm() + 1e-15);
  CHECK(hausdorff(body, moved) > 0.9 * c.norm());
}

TEST_CASE("reconstruct validation") {
  auto grid = make_icosphere_grid(1);
  Eigen::VectorXd h = Eigen::VectorXd::Ones(grid->count());
  h[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Polytope3D(grid, h), GeometryError);

  auto circle = make_circle_grid(64);
  CHECK_THROWS_AS(Polytope3D(circle, Eigen::VectorXd::Ones(64)),
                  DimensionError);

  // All-negative support numbers: empty intersection.
  CHECK_THROWS_AS(
      Polytope3D(grid, Eigen::VectorXd::Constant(grid->count(), -1.0)),
      GeometryError);
}
