// Acceptance gate: one line per criterion, exit 0 iff all pass. Tolerances
// are pinned here on purpose; loosening them is a behavior change, not a
// cleanup.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "curvimg/curvature_image.hpp"
#include "curvimg/errors.hpp"
#include "curvimg/functionals.hpp"
#include "curvimg/iteration.hpp"
#include "curvimg/minkowski.hpp"

using namespace curvimg;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  bool pass = true;
  double worst = 0;  // criterion-specific headline number
  std::string note;

  void merge(bool ok, double metric) {
    pass = pass && ok;
    worst = std::max(worst, metric);
  }
  void le(double value, double bound, double slack) {
    merge(value <= bound + slack, value - bound);
  }
  void ge(double value, double bound, double slack) { le(bound, value, slack); }
  void rel(double a, double b, double tol) {
    const double err = std::abs(a / b - 1.0);
    merge(err <= tol, err);
  }
  void small(double v, double tol) { merge(std::abs(v) < tol, std::abs(v)); }
};

GridPtr grid2() {
  static GridPtr g = make_circle_grid(512);
  return g;
}

GridPtr grid3() {
  static GridPtr g = make_icosphere_grid(3);
  return g;
}

Density uniform2() { return make_uniform_density(grid2()); }

Density wavy2() {
  return make_density(grid2(), [](const Eigen::VectorXd& u) {
    return 1.0 + 0.5 * (u[0] * u[0] - u[1] * u[1]);
  });
}

OperatorConfig op_for(double p, Density phi) {
  OperatorConfig c;
  c.p = p;
  c.phi = std::move(phi);
  return c;
}

// Traces produced by criteria 5-7 and 9, re-checked by criterion 4.
struct TaggedTrace {
  IterationTrace trace;
  double p;
  int n;
};
std::vector<TaggedTrace> g_traces;

Criterion criterion_1() {
  Criterion c;
  const auto t0 = Clock::now();
  for (unsigned seed = 1; seed <= 20; ++seed) {
    auto k = random_body(grid2(), seed, 128, 0.8);
    auto solved = solve_2d(make_curvature_data(grid2(), k.curvature_samples()));
    c.small(hausdorff(solved, translate(k, -steiner_point(k))), 1e-10);
  }
  const double dt = seconds_since(t0);
  c.merge(dt < 1.0, 0.0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "sup %.2e over 20 seeds, %.2f s", c.worst, dt);
  c.note = buf;
  return c;
}

Criterion criterion_2() {
  Criterion c;
  double worst2 = 0, worst3 = 0;
  for (double p : {-1.9, -1.0, -0.5, 0.0, 0.5, 0.9}) {
    auto disk = make_disk(grid2(), 1.0);
    const double d = hausdorff(apply(disk, op_for(p, uniform2())), disk);
    c.small(d, 1e-9);
    worst2 = std::max(worst2, d);
  }
  for (double p : {-2.5, -1.0, 0.0, 0.5}) {
    auto ball = make_ball3(grid3(), 1.0);
    const double d =
        hausdorff(apply(ball, op_for(p, make_uniform_density(grid3()))), ball);
    c.merge(d < 1e-3, d);
    worst3 = std::max(worst3, d);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "2d %.2e (tol 1e-9), 3d %.2e (tol 1e-3)", worst2,
                worst3);
  c.note = buf;
  return c;
}

Criterion criterion_3() {
  Criterion c;
  const Density uni = uniform2(), wav = wavy2();
  for (unsigned seed = 1; seed <= 20; ++seed) {
    auto k = random_body(grid2(), 300 + seed, 128, 0.8, true);
    for (double p : {-1.5, -0.5, 0.0, 0.5}) {
      for (const Density& phi : {uni, wav}) {
        auto image = apply(k, op_for(p, phi));
        c.rel(B_p(image, phi, p),
              4.0 * (volume(k) / volume(image)) * A_p(k, phi, p), 1e-7);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "rel err %.2e over 160 cases (tol 1e-7)", c.worst);
  c.note = buf;
  return c;
}

Criterion criterion_4() {
  Criterion c;
  int rows = 0;
  for (const TaggedTrace& tagged : g_traces) {
    const auto& r = tagged.trace.rows;
    const double v0 = r.front().volume;
    for (size_t i = 1; i < r.size(); ++i) {
      ++rows;
      c.le(r[i].volume, r[i - 1].volume, 1e-9);
      c.ge(r[i].a_p, r[i - 1].a_p, 1e-9);
      c.merge(r[i].volume > 0, 0.0);
      c.le(r[i].volume, v0, 1e-9);
      if (tagged.p == 0.0) {
        c.ge(r[i].omega_p, r[i - 1].omega_p, 1e-9);
      } else {
        const double e = tagged.n * (tagged.p - 1) / (tagged.p * (tagged.n - 1));
        c.ge(std::pow(r[i].omega_p, e), std::pow(r[i - 1].omega_p, e), 1e-9);
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%zu traces, %d steps, worst margin %.2e",
                g_traces.size(), rows, c.worst);
  c.note = buf;
  return c;
}

Criterion criterion_5() {
  Criterion c;
  const auto t0 = Clock::now();
  for (double p : {-1.5, 0.0, 0.5}) {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      auto k = random_body(grid2(), 500 + seed, 96, 0.7, true);
      RunConfig rc;
      rc.op = op_for(p, wavy2());
      rc.max_iter = 500;
      auto [body, trace] = iterate(k, rc);
      c.merge(trace.status == RunStatus::kConverged && trace.iterations() <= 500, 0.0);
      c.small(fixed_point_residual(body, rc.op.phi, p), 1e-6);
      g_traces.push_back({std::move(trace), p, 2});
    }
  }
  const double dt = seconds_since(t0);
  c.merge(dt < 30.0, 0.0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "30 runs converged, residual %.2e, %.1f s", c.worst,
                dt);
  c.note = buf;
  return c;
}

Criterion criterion_6() {
  Criterion c;
  for (double p : {-1.5, 0.0, 0.5}) {
    for (unsigned seed = 1; seed <= 10; ++seed) {
      auto k = random_body(grid2(), 600 + seed, 96, 0.7, true);
      RunConfig rc;
      rc.op = op_for(p, uniform2());
      rc.max_iter = 500;
      auto [body, trace] = iterate(k, rc);
      c.merge(trace.status == RunStatus::kConverged, 0.0);
      c.small(anisotropy(body), 1e-5);
      g_traces.push_back({std::move(trace), p, 2});
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "anisotropy %.2e over 30 runs (tol 1e-5)", c.worst);
  c.note = buf;
  return c;
}

Criterion criterion_7() {
  Criterion c;
  std::vector<Body2D> starts;
  starts.push_back(make_ellipse(grid2(), 2.0, 0.5));
  for (unsigned seed = 1; seed <= 5; ++seed)
    starts.push_back(random_body(grid2(), 700 + seed, 96, 0.7, true));
  for (const Body2D& k : starts) {
    RunConfig rc;
    rc.op = op_for(-2.0, uniform2());
    rc.max_iter = 400;
    auto [body, trace] = iterate_classical(k, rc);
    c.merge(trace.status == RunStatus::kConverged, 0.0);
    c.small(anisotropy(body), 1e-5);  // the limit is a circle
    for (size_t i = 1; i < trace.rows.size(); ++i)
      c.ge(trace.rows[i].vol_product, trace.rows[i - 1].vol_product, 1e-9);
    c.rel(trace.rows.back().vol_product, pi * pi, 1e-5);
    g_traces.push_back({std::move(trace), -2.0, 2});
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "6 starts, monotone product, final/pi^2 err %.2e",
                std::abs(g_traces.back().trace.rows.back().vol_product / (pi * pi) - 1));
  c.note = buf;
  return c;
}

Criterion criterion_8() {
  Criterion c;
  const Density uni = uniform2();
  const double pi2 = pi * pi;
  for (unsigned seed = 1; seed <= 50; ++seed) {
    auto k = random_body(grid2(), 800 + seed, 128, 0.8);
    auto centered = translate(k, -santalo_point(k));
    c.le(volume_product(k), pi2, 1e-9);
    auto other = random_body(grid2(), 900 + seed, 128, 0.8);
    const double v1 = mixed_volume(k, other);
    c.ge(v1 * v1, volume(k) * volume(other), 1e-9);
    c.le(std::pow(affine_surface_area(k), 3), 8.0 * pi2 * volume(k), 1e-9);
    for (double p : {-2.0, -1.2, -0.5, 0.0, 0.5, 0.9})
      c.le(B_p(centered, uni, p), 4.0 * A_p(centered, uni, p), 1e-9);
    OperatorConfig op = op_for(-2.0, uni);
    op.unsafe = true;
    auto image = apply(centered, op);
    c.rel(std::pow(affine_surface_area(image), 3),
          8.0 * volume(centered) * volume(centered) * polar_volume(centered), 1e-7);
  }
  // 3D bound with the 3-ball constant; polytope volumes are exact geometry.
  const double w3sq = std::pow(4.0 * pi / 3.0, 2);
  auto coarse = make_icosphere_grid(2);
  for (unsigned seed = 1; seed <= 10; ++seed)
    c.le(volume_product(random_polytope(coarse, 850 + seed, 0.2)), w3sq, 1e-9 * w3sq);
  // Equality cases on disks.
  auto disk = make_disk(grid2(), 1.1);
  c.rel(volume_product(disk), pi2, 1e-8);
  c.rel(std::pow(affine_surface_area(disk), 3), 8.0 * pi2 * volume(disk), 1e-8);
  for (double p : {-1.5, 0.0, 0.5}) c.rel(B_p(disk, uni, p), 4.0 * A_p(disk, uni, p), 1e-8);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "50 bodies, worst margin %.2e", c.worst);
  c.note = buf;
  return c;
}

Criterion criterion_9() {
  Criterion c;
  const auto t0 = Clock::now();
  // Cube from its six normals and equal areas, translation-invariantly.
  Eigen::MatrixXd normals(6, 3);
  normals << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  Solve3DOptions opt;
  opt.init = Eigen::VectorXd::Ones(6);
  for (int i = 0; i < 6; ++i) opt.init[i] += 0.2 * std::sin(1.0 + i);
  const Eigen::VectorXd h =
      solve_support_numbers(normals, Eigen::VectorXd::Constant(6, 4.0), opt);
  for (int d = 0; d < 3; ++d) c.small(h[2 * d] + h[2 * d + 1] - 2.0, 1e-8);
  c.small(support_geometry(normals, h).volume - 8.0, 1e-8);

  auto k = random_polytope(grid3(), 901, 0.15, true);
  RunConfig rc;
  rc.op.p = 0.0;
  rc.op.phi = make_uniform_density(grid3());
  rc.max_iter = 200;
  auto [body, trace] = iterate(k, rc);
  c.merge(trace.status == RunStatus::kConverged, 0.0);
  for (size_t i = 1; i < trace.rows.size(); ++i) {
    c.le(trace.rows[i].volume, trace.rows[i - 1].volume, 1e-9);
    c.ge(trace.rows[i].a_p, trace.rows[i - 1].a_p, 1e-4 * trace.rows[i - 1].a_p);
  }
  const double aniso = anisotropy(body);
  c.merge(aniso < 1e-2, aniso);
  const double dt = seconds_since(t0);
  c.merge(dt < 300.0, 0.0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "cube exact, 642-node run: anisotropy %.2e, %.1f s",
                aniso, dt);
  c.note = buf;
  return c;
}

}  // namespace

int main() {
  const char* labels[9] = {
      "spectral Minkowski round-trip (2d)",
      "ball fixed points (2d, 3d)",
      "operator identity B_p(image) = n^n (V/V')^(n-1) A_p",
      "trace monotonicity and volume sandwich",
      "even-phi convergence (p in {-1.5, 0, 0.5})",
      "uniform-phi limits are balls",
      "classical scheme: product climbs to pi^2",
      "inequality suite on 50 bodies",
      "3d polytopal pipeline at 642 nodes",
  };
  Criterion results[9];
  try {
    results[0] = criterion_1();
    results[1] = criterion_2();
    results[2] = criterion_3();
    results[4] = criterion_5();
    results[5] = criterion_6();
    results[6] = criterion_7();
    results[8] = criterion_9();
    results[3] = criterion_4();  // consumes the traces gathered above
    results[7] = criterion_8();
  } catch (const Error& e) {
    std::printf("FAIL exception: %s\n", e.what());
    return 1;
  }

  bool all = true;
  for (int i = 0; i < 9; ++i) {
    all = all && results[i].pass;
    std::printf("%s criterion %d: %s [%s]\n", results[i].pass ? "PASS" : "FAIL", i + 1,
                labels[i], results[i].note.c_str());
  }
  std::printf("acceptance: %d/9 passed\n",
              int(std::count_if(results, results + 9, [](const Criterion& r) {
                return r.pass;
              })));
  return all ? 0 : 1;
}
