#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "curvimg/body2d.hpp"
#include "curvimg/errors.hpp"

using namespace curvimg;
using std::numbers::pi;

namespace {

GridPtr grid512() {
  static GridPtr g = make_circle_grid(512);
  return g;
}

Body2D scaled(const Body2D& k, double lam) {
  return Body2D(k.grid(), lam * k.cos_coef(), lam * k.sin_coef());
}

// Inscribed-polygon (shoelace) area from boundary points at m uniform angles.
double shoelace_area(const Body2D& k, int m) {
  double acc = 0;
  Eigen::Vector2d prev = k.boundary_point(0.0);
  const Eigen::Vector2d first = prev;
  for (int j = 1; j <= m; ++j) {
    const Eigen::Vector2d cur =
        (j == m) ? first : k.boundary_point(2 * pi * j / m);
    acc += prev[0] * cur[1] - prev[1] * cur[0];
    prev = cur;
  }
  return 0.5 * acc;
}

// The inscribed polygon underestimates area by c/m^2 + O(m^-4); one
// Richardson step removes the leading term.
double polygon_area_oracle(const Body2D& k, int m) {
  return (4.0 * shoelace_area(k, 2 * m) - shoelace_area(k, m)) / 3.0;
}

}  // namespace

TEST_CASE("disk basics") {
  auto d = make_disk(grid512(), 1.0);
  CHECK(volume(d) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(d.curvature_samples().minCoeff() == doctest::Approx(1.0));
  CHECK(polar_volume(d) == doctest::Approx(pi).epsilon(1e-14));

  auto d2 = make_disk(grid512(), 2.0);
  CHECK(volume(d2) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(polar_volume(d2) == doctest::Approx(pi / 4).epsilon(1e-14));
  CHECK(hausdorff(d, d2) == doctest::Approx(1.0));
}

TEST_CASE("ellipse volume and polar volume") {
  auto e = make_ellipse(grid512(), 2.0, 0.5);
  CHECK(volume(e) == doctest::Approx(pi).epsilon(1e-9));
  CHECK(polar_volume(e) == doctest::Approx(pi).epsilon(1e-9));
  CHECK(e.origin_symmetric());
}

TEST_CASE("volume against the polygon-area oracle") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    auto k = random_body(grid512(), seed, 128, 0.8);
    const double v = volume(k);
    CHECK(v == doctest::Approx(polygon_area_oracle(k, 2048)).epsilon(1e-9));
    // plain shoelace converges from below at second order
    CHECK(shoelace_area(k, 4096) < v);
    CHECK(v - shoelace_area(k, 4096) < 1e-5);
  }
}

TEST_CASE("mixed volume") {
  auto d1 = make_disk(grid512(), 1.0);
  auto d3 = make_disk(grid512(), 3.0);
  CHECK(mixed_volume(d1, d3) == doctest::Approx(3 * pi).epsilon(1e-14));
  auto k = random_body(grid512(), 7, 128, 0.7);
  CHECK(mixed_volume(k, k) == volume(k));

  // Minkowski inequality, equality for homothets
  auto l = random_body(grid512(), 8, 128, 0.7);
  const double v1 = mixed_volume(k, l);
  CHECK(v1 * v1 >= volume(k) * volume(l) - 1e-12);
  auto hom = translate(scaled(k, 2.0), Eigen::Vector2d(0.2, -0.1));
  const double v1h = mixed_volume(k, hom);
  CHECK(v1h * v1h == doctest::Approx(volume(k) * volume(hom)).epsilon(1e-12));
}

TEST_CASE("translate moves the body, leaves shape data alone") {
  auto k = random_body(grid512(), 21, 128, 0.6);
  auto t = translate(k, Eigen::Vector2d(0.3, 0.0));
  CHECK(volume(t) == doctest::Approx(volume(k)).epsilon(1e-13));
  CHECK((t.curvature_samples() - k.curvature_samples()).norm() == 0.0);
  auto back = translate(t, Eigen::Vector2d(-0.3, 0.0));
  CHECK(hausdorff(back, k) < 1e-15);
  // support transforms as h(u) + <x,u>
  CHECK(t.support_at(0.0) == doctest::Approx(k.support_at(0.0) + 0.3).epsilon(1e-14));
}

TEST_CASE("curvature closure") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    auto k = random_body(grid512(), seed, 128, 0.8);
    CHECK(vector_moment(k.curvature_samples(), *k.grid()).norm() < 1e-12);
  }
}

TEST_CASE("santalo point") {
  auto d = make_disk(grid512(), 1.0);
  CHECK(santalo_point(d).norm() < 1e-12);

  auto sym = random_body(grid512(), 41, 128, 0.7, true);
  CHECK(santalo_point(sym).norm() < 1e-10);

  // equivariance
  const Eigen::Vector2d c(0.23, -0.31);
  auto moved = translate(sym, c);
  CHECK((santalo_point(moved) - c).norm() < 1e-9);

  // minimality probe on an asymmetric body
  auto k = random_body(grid512(), 42, 128, 0.8);
  const Eigen::Vector2d s = santalo_point(k);
  const double best = polar_volume(translate(k, -s));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double ang = 2 * pi * double(rng() >> 11) * 0x1p-53;
    const Eigen::Vector2d delta(1e-3 * std::cos(ang), 1e-3 * std::sin(ang));
    CHECK(polar_volume(translate(k, -(s + delta))) >= best);
  }
}

TEST_CASE("blaschke-santalo inequality") {
  for (std::uint64_t seed : {51u, 52u, 53u, 54u, 55u}) {
    auto k = random_body(grid512(), seed, 128, 0.8);
    auto centered = translate(k, -santalo_point(k));
    CHECK(volume(centered) * polar_volume(centered) <= pi * pi + 1e-9);
  }
  auto e = make_ellipse(grid512(), 1.7, 0.4);
  CHECK(volume(e) * polar_volume(e) == doctest::Approx(pi * pi).epsilon(1e-6));
}

TEST_CASE("scaling laws") {
  auto k = random_body(grid512(), 61, 128, 0.7);
  auto k2 = scaled(k, 2.5);
  CHECK(volume(k2) == doctest::Approx(2.5 * 2.5 * volume(k)).epsilon(1e-12));
  CHECK((k2.curvature_samples() - 2.5 * k.curvature_samples()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(polar_volume(k2) ==
        doctest::Approx(polar_volume(k) / (2.5 * 2.5)).epsilon(1e-12));
}

TEST_CASE("random body generator") {
  auto a = random_body(grid512(), 99, 128, 0.8);
  auto b = random_body(grid512(), 99, 128, 0.8);
  CHECK((a.cos_coef() - b.cos_coef()).norm() == 0.0);
  CHECK((a.sin_coef() - b.sin_coef()).norm() == 0.0);
  CHECK(a.min_curvature() >= 0.1);

  auto disk = random_body(grid512(), 99, 128, 0.0);
  CHECK(disk.degree() == 128);
  CHECK(hausdorff(disk, make_disk(grid512(), 1.0)) == 0.0);

  auto even = random_body(grid512(), 77, 128, 0.8, true);
  CHECK(even.origin_symmetric());
  CHECK_FALSE(random_body(grid512(), 77, 128, 0.8).origin_symmetric());
  CHECK(symmetrize(random_body(grid512(), 77, 128, 0.8)).origin_symmetric());
}

TEST_CASE("support sample projection round-trip") {
  auto k = random_body(grid512(), 88, 128, 0.8);
  auto back = body_from_support_samples(k.grid(), k.support_samples(), 128);
  CHECK((back.cos_coef() - k.cos_coef()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((back.sin_coef() - k.sin_coef()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("degenerate bodies are rejected") {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b = Eigen::VectorXd::Zero(3);
  a[0] = 1.0;
  a[2] = 0.9;  // f = 1 - 2.7 cos(2t) dips negative
  CHECK_THROWS_AS(Body2D(grid512(), a, b), GeometryError);
}

TEST_CASE("boundary points and support evaluation agree with samples") {
  auto k = random_body(grid512(), 13, 128, 0.8);
  auto g = k.grid();
  for (int j : {0, 17, 200, 333, 501}) {
    CHECK(k.support_at(g->theta[j]) ==
          doctest::Approx(k.support_samples()[j]).epsilon(1e-12));
  }
  auto d = make_disk(grid512(), 2.0);
  const Eigen::Vector2d bp = d.boundary_point(0.7);
  CHECK(bp[0] == doctest::Approx(2 * std::cos(0.7)));
  CHECK(bp[1] == doctest::Approx(2 * std::sin(0.7)));
}
