#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "curvimg/errors.hpp"
#include "curvimg/experiment.hpp"
#include "curvimg/io.hpp"
#include "curvimg/phi_expr.hpp"
#include "curvimg/toml_lite.hpp"

using namespace curvimg;
namespace fs = std::filesystem;

namespace {

GridPtr grid64() {
  static GridPtr g = make_circle_grid(64);
  return g;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("phi expressions: values, precedence, evenness") {
  auto d = phi_from_expression(grid64(), "1 + 0.5*cos(2*theta)");
  CHECK(d.even);
  const double t3 = grid64()->theta[3];
  CHECK(d.values[3] == doctest::Approx(1 + 0.5 * std::cos(2 * t3)).epsilon(1e-14));

  CHECK_FALSE(phi_from_expression(grid64(), "1 + 0.3*sin(theta)").even);

  // ^ binds tighter than unary minus and is right-associative.
  auto e1 = phi_from_expression(grid64(), "4 - -3^2 / 2 - 2^1^2");
  CHECK(e1.values[0] == doctest::Approx(4 + 4.5 - 2).epsilon(1e-14));
  auto e2 = phi_from_expression(grid64(), "exp(cos(theta))/exp(cos(theta))*pi");
  CHECK(e2.values[1] == doctest::Approx(M_PI).epsilon(1e-14));

  auto sphere = make_icosphere_grid(1);
  auto d3 = phi_from_expression(sphere, "1 + 0.4*(x^2 - z^2)");
  CHECK(d3.even);
  CHECK_FALSE(phi_from_expression(sphere, "1 + 0.2*y").even);
}

TEST_CASE("phi expressions: rejection with a column pointer") {
  CHECK_THROWS_WITH_AS(phi_from_expression(grid64(), "1 + * 2"),
                       doctest::Contains("column 5"), ConfigError);
  CHECK_THROWS_WITH_AS(phi_from_expression(grid64(), "2 * bogus"),
                       doctest::Contains("unknown name"), ConfigError);
  // variables are dimension-checked
  CHECK_THROWS_AS(phi_from_expression(grid64(), "1 + x"), ConfigError);
  CHECK_THROWS_AS(phi_from_expression(make_icosphere_grid(1), "1 + cos(theta)"),
                  ConfigError);
  // positivity of the sampled density
  CHECK_THROWS_AS(phi_from_expression(grid64(), "cos(theta)"), ConfigError);
  CHECK_THROWS_AS(phi_from_expression(grid64(), "1/(1 - 1)"), ConfigError);
  CHECK_THROWS_WITH_AS(phi_from_expression(grid64(), "(1 + theta"),
                       doctest::Contains("')'"), ConfigError);
}

TEST_CASE("toml subset: sections, arrays, strings, diagnostics") {
  const auto table = parse_toml(
      "# comment\n"
      "dim = 2\n"
      "p = [-1.5, 0, 0.5]\n"
      "phi = \"1 + 0.5*cos(2*theta)\" # trailing\n"
      "flag = true\n"
      "\n"
      "[tolerances]\n"
      "step = 1e-9\n",
      "test");
  CHECK(table.at("dim").number == 2);
  CHECK(table.at("p").items.size() == 3);
  CHECK(table.at("p").items[0].number == -1.5);
  CHECK(table.at("phi").str == "1 + 0.5*cos(2*theta)");
  CHECK(table.at("flag").boolean);
  CHECK(table.at("tolerances.step").number == 1e-9);
  CHECK(table.at("tolerances.step").line == 8);

  CHECK_THROWS_WITH_AS(parse_toml("a = [1, 2\n", "t"), doctest::Contains("t:1:10"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_toml("a = 1\na = 2\n", "t"), doctest::Contains("duplicate"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_toml("a = \"x\n", "t"), doctest::Contains("unterminated"),
                       ConfigError);
  CHECK_THROWS_AS(parse_toml("= 3\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_toml("a = nope\n", "t"), ConfigError);
}

TEST_CASE("experiment config: defaults, lists, unknown keys") {
  const auto path = temp_file("curvimg_cfg_ok.toml",
                              "dim = 2\n"
                              "p = [0, 0.5]\n"
                              "init = \"disk 1\"\n"
                              "[tolerances]\n"
                              "residual = 1e-7\n");
  auto cfg = load_experiment(path.string());
  CHECK(cfg.dim == 2);
  CHECK(cfg.p_values.size() == 2);
  CHECK(cfg.phi_list.size() == 1);  // defaults to "1"
  CHECK(cfg.phi_list[0] == "1");
  CHECK(cfg.tol_residual == 1e-7);
  CHECK(cfg.tol_step == 1e-8);
  CHECK(cfg.max_iter == 2000);
  CHECK(cfg.out_dir == (fs::path("runs") / "curvimg_cfg_ok").string());

  const auto bad = temp_file("curvimg_cfg_bad.toml",
                             "dim = 2\np = 0\ninit = \"disk 1\"\nwhatever = 1\n");
  CHECK_THROWS_WITH_AS(load_experiment(bad.string()), doctest::Contains("unknown key"),
                       ConfigError);
  const auto nodim = temp_file("curvimg_cfg_dim.toml", "dim = 4\np = 0\ninit = \"disk 1\"\n");
  CHECK_THROWS_AS(load_experiment(nodim.string()), ConfigError);
  const auto noinit = temp_file("curvimg_cfg_init.toml", "dim = 2\np = 0\n");
  CHECK_THROWS_WITH_AS(load_experiment(noinit.string()), doctest::Contains("init"),
                       ConfigError);
  CHECK_THROWS_AS(load_experiment("/nonexistent/path.toml"), ConfigError);
}

TEST_CASE("trace csv and snapshot formats") {
  IterationTrace trace;
  TraceRow r0;
  r0.iter = 0;
  r0.volume = M_PI;
  r0.a_p = 1.25;
  r0.b_p = std::numeric_limits<double>::quiet_NaN();
  trace.rows.push_back(r0);
  const auto dir = fs::temp_directory_path() / "curvimg_io_test";
  fs::create_directories(dir);

  write_trace_csv((dir / "trace.csv").string(), trace);
  std::ifstream in(dir / "trace.csv");
  std::string header, row;
  std::getline(in, header);
  CHECK(header ==
        "iter,volume,A_p,B_p,Omega_p,vol_product,hausdorff_step,residual,vol_ratio,"
        "h_min,h_max,ms");
  std::getline(in, row);
  CHECK(row.substr(0, 2) == "0,");
  CHECK(row.find("nan") != std::string::npos);

  auto disk = make_disk(grid64(), 1.0);
  write_snapshot_csv((dir / "snap.csv").string(), disk);
  std::ifstream snap(dir / "snap.csv");
  std::getline(snap, header);
  CHECK(header == "theta,h,f");
  int lines = 0;
  while (std::getline(snap, row)) ++lines;
  CHECK(lines == grid64()->count());

  auto ball = make_ball3(make_icosphere_grid(1), 1.0);
  write_snapshot_csv((dir / "snap3.csv").string(), ball);
  std::ifstream snap3(dir / "snap3.csv");
  std::getline(snap3, header);
  CHECK(header == "ux,uy,uz,h,A");

  write_off((dir / "ball.off").string(), ball);
  std::ifstream off(dir / "ball.off");
  std::getline(off, header);
  CHECK(header == "OFF");
  int nv = 0, nf = 0, ne = -1;
  off >> nv >> nf >> ne;
  CHECK(nv == int(ball.vertices().size()));
  CHECK(nf == 42);  // every facet of the grid ball is active
  CHECK(ne == 0);
}

TEST_CASE("svg plots are deterministic byte for byte") {
  IterationTrace trace;
  for (int i = 0; i < 12; ++i) {
    TraceRow r;
    r.iter = i;
    r.volume = 3.0 - 0.1 * i;
    r.a_p = 1.0 + 0.05 * i;
    r.b_p = 4.0 + 0.01 * i;
    r.omega_p = 2.0;
    r.vol_product = 9.5 + 0.02 * i;
    r.residual = std::pow(10.0, -0.5 * i - 1);
    r.hausdorff_step = i ? std::pow(10.0, -0.4 * i) : 0.0;
    r.ms = 17.0 * i;  // must not influence the plot
    trace.rows.push_back(r);
  }
  const auto dir = fs::temp_directory_path() / "curvimg_io_test";
  fs::create_directories(dir);
  write_curves_svg((dir / "c1.svg").string(), trace);
  trace.rows.back().ms = 999.0;
  write_curves_svg((dir / "c2.svg").string(), trace);
  std::ifstream a(dir / "c1.svg", std::ios::binary), b(dir / "c2.svg", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find("<svg") != std::string::npos);

  std::vector<std::pair<int, Body2D>> snaps = {{0, make_disk(grid64(), 1.0)},
                                               {3, make_disk(grid64(), 0.8)}};
  write_outlines_svg((dir / "o1.svg").string(), snaps);
  write_outlines_svg((dir / "o2.svg").string(), snaps);
  std::ifstream oa(dir / "o1.svg", std::ios::binary), ob(dir / "o2.svg", std::ios::binary);
  std::string soa((std::istreambuf_iterator<char>(oa)), std::istreambuf_iterator<char>());
  std::string sob((std::istreambuf_iterator<char>(ob)), std::istreambuf_iterator<char>());
  CHECK(soa == sob);
  CHECK(soa.find("step 3") != std::string::npos);
}

TEST_CASE("full run from a config with phi sampled from a file") {
  std::string samples;
  for (int i = 0; i < grid64()->count(); ++i) samples += "1.5\n";
  const auto phi_path = temp_file("curvimg_phi_samples.txt", samples);
  const auto out_dir = fs::temp_directory_path() / "curvimg_run_phifile";
  fs::remove_all(out_dir);
  const auto cfg_path =
      temp_file("curvimg_cfg_phifile.toml", "dim = 2\np = 0\ninit = \"disk 1\"\n"
                                            "grid = 64\nmax_iter = 20\n"
                                            "phi = \"" + phi_path.string() + "\"\n"
                                            "out_dir = \"" + out_dir.string() + "\"\n");
  auto cfg = load_experiment(cfg_path.string());
  CHECK(cfg.phi_list[0] == phi_path.string());
  // Constant phi keeps the disk a fixed point, so the run converges at once.
  CHECK(cmd_run(cfg) == 0);
  CHECK(fs::exists(out_dir / "trace.csv"));
  CHECK(fs::exists(out_dir / "summary.json"));
  CHECK(fs::exists(out_dir / "outlines.svg"));
  CHECK(fs::exists(out_dir / "curves.svg"));
  std::ifstream in(out_dir / "summary.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"limit_shape\": \"ball\"") != std::string::npos);
  CHECK(text.find("\"status\": \"converged\"") != std::string::npos);
}
