#include "curvimg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "curvimg/errors.hpp"
#include "curvimg/io.hpp"
#include "curvimg/iteration.hpp"
#include "curvimg/phi_expr.hpp"
#include "curvimg/toml_lite.hpp"

namespace curvimg {

namespace {

namespace fs = std::filesystem;

// ---- config loading ---------------------------------------------------

double as_number(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::kNumber)
    throw ConfigError(key + ": expected a number (line " + std::to_string(v.line) + ")");
  return v.number;
}

std::string as_string(const TomlValue& v, const std::string& key) {
  if (v.kind != TomlValue::Kind::kString)
    throw ConfigError(key + ": expected a string (line " + std::to_string(v.line) + ")");
  return v.str;
}

int as_int(const TomlValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d))
    throw ConfigError(key + ": expected an integer (line " + std::to_string(v.line) + ")");
  return int(d);
}

}  // namespace

ExperimentConfig load_experiment(const std::string& path) {
  TomlTable table = parse_toml_file(path);
  ExperimentConfig cfg;

  const auto take = [&](const char* key) -> const TomlValue* {
    auto it = table.find(key);
    if (it == table.end()) return nullptr;
    return &it->second;
  };
  std::vector<std::string> known;

  const auto number_key = [&](const char* key, double fallback) {
    known.push_back(key);
    const TomlValue* v = take(key);
    return v ? as_number(*v, key) : fallback;
  };
  const auto int_key = [&](const char* key, int fallback) {
    known.push_back(key);
    const TomlValue* v = take(key);
    return v ? as_int(*v, key) : fallback;
  };

  cfg.dim = int_key("dim", 2);
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("dim must be 2 or 3");

  known.push_back("p");
  if (const TomlValue* v = take("p")) {
    if (v->kind == TomlValue::Kind::kArray) {
      for (const TomlValue& item : v->items) cfg.p_values.push_back(as_number(item, "p"));
    } else {
      cfg.p_values.push_back(as_number(*v, "p"));
    }
  }

  known.push_back("phi");
  if (const TomlValue* v = take("phi")) {
    if (v->kind == TomlValue::Kind::kArray) {
      for (const TomlValue& item : v->items) cfg.phi_list.push_back(as_string(item, "phi"));
    } else {
      cfg.phi_list.push_back(as_string(*v, "phi"));
    }
  }
  if (cfg.phi_list.empty()) cfg.phi_list.push_back("1");

  known.push_back("init");
  if (const TomlValue* v = take("init")) cfg.init = as_string(*v, "init");
  if (cfg.init.empty()) throw ConfigError("init: a body spec is required");

  cfg.resolution = int_key("grid", 0);
  cfg.max_iter = int_key("max_iter", 2000);
  cfg.seed = unsigned(int_key("seed", 1));
  cfg.tol_step = number_key("tolerances.step", 1e-8);
  cfg.tol_residual = number_key("tolerances.residual", 1e-6);
  cfg.closure_tol = number_key("tolerances.closure", 1e-8);
  cfg.normalize_tol = number_key("tolerances.normalize", 1e-10);

  known.push_back("minimal_position");
  if (const TomlValue* v = take("minimal_position")) {
    if (v->kind != TomlValue::Kind::kBool)
      throw ConfigError("minimal_position: expected a boolean (line " +
                        std::to_string(v->line) + ")");
    cfg.minimal_position = v->boolean;
  }

  known.push_back("out_dir");
  if (const TomlValue* v = take("out_dir")) cfg.out_dir = as_string(*v, "out_dir");
  if (cfg.out_dir.empty())
    cfg.out_dir = (fs::path("runs") / fs::path(path).stem()).string();

  for (const auto& [key, value] : table) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(path + ":" + std::to_string(value.line) + ": unknown key '" +
                        key + "'");
  }
  return cfg;
}

namespace {

// ---- body specs --------------------------------------------------------

std::vector<std::string> split_spec(const std::string& spec) {
  std::istringstream in(spec);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double spec_num(const std::vector<std::string>& tok, size_t i, const std::string& spec) {
  if (i >= tok.size()) throw ConfigError("init: missing argument in '" + spec + "'");
  char* end = nullptr;
  const double v = std::strtod(tok[i].c_str(), &end);
  if (end != tok[i].c_str() + tok[i].size())
    throw ConfigError("init: bad number '" + tok[i] + "' in '" + spec + "'");
  return v;
}

bool spec_even(const std::vector<std::string>& tok, size_t i, const std::string& spec) {
  if (i >= tok.size()) return false;
  if (tok[i] == "even" && i + 1 == tok.size()) return true;
  throw ConfigError("init: unexpected trailing '" + tok[i] + "' in '" + spec + "'");
}

Body2D build_body(const ExperimentConfig& cfg, const GridPtr& grid, const Body2D*) {
  const auto tok = split_spec(cfg.init);
  if (tok.empty()) throw ConfigError("init: empty body spec");
  const std::string& kind = tok[0];
  if (kind == "disk") return make_disk(grid, spec_num(tok, 1, cfg.init));
  if (kind == "ellipse")
    return make_ellipse(grid, spec_num(tok, 1, cfg.init), spec_num(tok, 2, cfg.init));
  if (kind == "random") {
    const int degree = int(spec_num(tok, 1, cfg.init));
    const double amplitude = spec_num(tok, 2, cfg.init);
    return random_body(grid, cfg.seed, degree, amplitude, spec_even(tok, 3, cfg.init));
  }
  throw ConfigError("init: unknown 2d body '" + kind +
                    "' (expected disk, ellipse, or random)");
}

Polytope3D build_body(const ExperimentConfig& cfg, const GridPtr& grid,
                      const Polytope3D*) {
  const auto tok = split_spec(cfg.init);
  if (tok.empty()) throw ConfigError("init: empty body spec");
  const std::string& kind = tok[0];
  if (kind == "ball") return make_ball3(grid, spec_num(tok, 1, cfg.init));
  if (kind == "cube") return make_cube3(grid, spec_num(tok, 1, cfg.init));
  if (kind == "ellipsoid") {
    const double a = spec_num(tok, 1, cfg.init);
    const double b = spec_num(tok, 2, cfg.init);
    const double c = spec_num(tok, 3, cfg.init);
    if (a <= 0 || b <= 0 || c <= 0) throw ConfigError("init: ellipsoid semi-axes must be positive");
    Eigen::VectorXd h(grid->count());
    for (int i = 0; i < grid->count(); ++i) {
      const auto u = grid->nodes.row(i);
      h[i] = std::sqrt(a * a * u[0] * u[0] + b * b * u[1] * u[1] + c * c * u[2] * u[2]);
    }
    return Polytope3D(grid, std::move(h));
  }
  if (kind == "random") {
    const double amplitude = spec_num(tok, 1, cfg.init);
    return random_polytope(grid, cfg.seed, amplitude, spec_even(tok, 2, cfg.init));
  }
  throw ConfigError("init: unknown 3d body '" + kind +
                    "' (expected ball, cube, ellipsoid, or random)");
}

// phi is an expression unless it names a readable file of whitespace-
// separated density samples, one per grid node.
Density phi_from_spec(const GridPtr& grid, const std::string& spec) {
  if (fs::exists(spec) && fs::is_regular_file(spec)) {
    std::ifstream in(spec);
    if (!in) throw IoError("cannot open phi file: " + spec);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    Eigen::VectorXd samples(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) samples[int(i)] = vals[i];
    return make_density_from_samples(grid, std::move(samples));
  }
  return phi_from_expression(grid, spec);
}

// ---- JSON bits ---------------------------------------------------------

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned char>(c));
      out += buf;
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string jnum(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- one full run ------------------------------------------------------

struct RunOutcome {
  RunStatus status = RunStatus::kError;
  int iterations = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double volume = std::numeric_limits<double>::quiet_NaN();
  double anisotropy_final = std::numeric_limits<double>::quiet_NaN();
  std::string limit_shape = "other";
  std::string error;
};

bool snapshot_step(int i) {
  if (i <= 2) return true;
  while (i % 10 == 0) i /= 10;
  return i == 1 || i == 2 || i == 5;
}

std::string snap_base(const fs::path& dir, int iter) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "body_%06d", iter);
  return (dir / buf).string();
}

template <class BodyT>
void write_snapshots(const fs::path& dir,
                     const std::vector<std::pair<int, BodyT>>& snaps) {
  for (const auto& [iter, body] : snaps) {
    write_snapshot_csv(snap_base(dir, iter) + ".csv", body);
    if constexpr (std::is_same_v<BodyT, Polytope3D>)
      write_off(snap_base(dir, iter) + ".off", body);
  }
  if constexpr (std::is_same_v<BodyT, Body2D>)
    write_outlines_svg((dir / "outlines.svg").string(), snaps);
}

// Ball if the body itself is nearly round; ellipse when some volume-
// preserving linear image is. Thresholds sit well above converged-ball
// anisotropy and well below the anisotropy of wavy-phi limits.
template <class BodyT>
std::pair<std::string, double> classify_limit(const BodyT& k, int dim) {
  const double tol = dim == 2 ? 1e-3 : 2e-2;
  const double a0 = anisotropy(k);
  if (a0 < tol) return {"ball", a0};
  try {
    if (anisotropy(minimal_position(k).first) < tol)
      return {dim == 2 ? "ellipse" : "ellipsoid", a0};
  } catch (const Error&) {
    // fall through: not diagonalizable into a round position
  }
  return {"other", a0};
}

template <class BodyT>
RunOutcome run_one(const ExperimentConfig& cfg, double p, const std::string& phi_expr,
                   const fs::path& dir) {
  fs::create_directories(dir);

  const int resolution = cfg.resolution > 0 ? cfg.resolution : (cfg.dim == 2 ? 512 : 642);
  GridPtr grid = make_sphere_grid(cfg.dim, resolution);

  RunConfig rc;
  rc.op.p = p;
  rc.op.phi = phi_from_spec(grid, phi_expr);
  rc.op.closure_tol = cfg.closure_tol;
  rc.op.normalize_tol = cfg.normalize_tol;
  rc.op.unsafe = cfg.unsafe;
  rc.max_iter = cfg.max_iter;
  rc.tol_step = cfg.tol_step;
  rc.tol_residual = cfg.tol_residual;
  rc.minimal_position = cfg.minimal_position;

  BodyT initial = build_body(cfg, grid, static_cast<const BodyT*>(nullptr));

  std::vector<std::pair<int, BodyT>> snaps;
  const auto observe = [&](int iter, const BodyT& body) {
    if (snapshot_step(iter)) snaps.emplace_back(iter, body);
  };

  auto [final_body, trace] = iterate(initial, rc, observe);
  // The loop hands back the last accepted body, so the final snapshot is
  // always available even when its step missed the 1-2-5 ladder.
  const int last_iter = trace.rows.back().iter;
  if (snaps.empty() || snaps.back().first != last_iter)
    snaps.emplace_back(last_iter, final_body);

  write_trace_csv((dir / "trace.csv").string(), trace);
  write_snapshots(dir, snaps);
  write_curves_svg((dir / "curves.svg").string(), trace);

  RunOutcome out;
  out.status = trace.status;
  out.iterations = trace.iterations();
  out.error = trace.error;
  const TraceRow& last = trace.rows.back();
  out.residual = last.residual;
  out.volume = last.volume;
  auto [shape, aniso] = classify_limit(final_body, cfg.dim);
  out.limit_shape = shape;
  out.anisotropy_final = aniso;

  std::string json = "{\n";
  json += "  \"status\": " + jstr(status_name(trace.status)) + ",\n";
  json += "  \"error\": " + jstr(trace.error) + ",\n";
  json += "  \"dim\": " + std::to_string(cfg.dim) + ",\n";
  json += "  \"p\": " + jnum(p) + ",\n";
  json += "  \"phi\": " + jstr(phi_expr) + ",\n";
  json += "  \"init\": " + jstr(cfg.init) + ",\n";
  json += "  \"grid\": " + std::to_string(resolution) + ",\n";
  json += "  \"seed\": " + std::to_string(cfg.seed) + ",\n";
  json += "  \"minimal_position\": " + std::string(cfg.minimal_position ? "true" : "false") + ",\n";
  json += "  \"iterations\": " + std::to_string(out.iterations) + ",\n";
  json += "  \"final\": {\n";
  json += "    \"volume\": " + jnum(last.volume) + ",\n";
  json += "    \"A_p\": " + jnum(last.a_p) + ",\n";
  json += "    \"B_p\": " + jnum(last.b_p) + ",\n";
  json += "    \"Omega_p\": " + jnum(last.omega_p) + ",\n";
  json += "    \"vol_product\": " + jnum(last.vol_product) + ",\n";
  json += "    \"residual\": " + jnum(last.residual) + ",\n";
  json += "    \"hausdorff_step\": " + jnum(last.hausdorff_step) + ",\n";
  json += "    \"h_min\": " + jnum(last.h_min) + ",\n";
  json += "    \"h_max\": " + jnum(last.h_max) + "\n";
  json += "  },\n";
  json += "  \"tail_oscillation\": " + jnum(trace.tail_oscillation) + ",\n";
  json += "  \"limit_shape\": " + jstr(out.limit_shape) + ",\n";
  json += "  \"anisotropy\": " + jnum(out.anisotropy_final) + "\n";
  json += "}\n";
  std::ofstream summary(dir / "summary.json", std::ios::binary);
  if (!summary) throw IoError("cannot open for writing: " + (dir / "summary.json").string());
  summary << json;

  return out;
}

RunOutcome run_dispatch(const ExperimentConfig& cfg, double p,
                        const std::string& phi_expr, const fs::path& dir) {
  if (cfg.dim == 2) return run_one<Body2D>(cfg, p, phi_expr, dir);
  return run_one<Polytope3D>(cfg, p, phi_expr, dir);
}

int status_exit(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return 0;
    case RunStatus::kMaxIter: return 2;
    case RunStatus::kError: return 1;
  }
  return 1;
}

int thread_budget() {
  if (const char* env = std::getenv("CURVIMG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 4;
}

}  // namespace

int cmd_run(ExperimentConfig cfg) {
  if (cfg.p_values.size() != 1)
    throw ConfigError("run needs exactly one p (lists are for sweep)");
  if (cfg.phi_list.size() != 1)
    throw ConfigError("run needs exactly one phi (lists are for sweep)");
  const RunOutcome out =
      run_dispatch(cfg, cfg.p_values[0], cfg.phi_list[0], cfg.out_dir);
  std::printf("status=%s iterations=%d residual=%.6g volume=%.9g shape=%s out=%s\n",
              status_name(out.status), out.iterations, out.residual, out.volume,
              out.limit_shape.c_str(), cfg.out_dir.c_str());
  if (out.status == RunStatus::kError && !out.error.empty())
    std::fprintf(stderr, "error: %s\n", out.error.c_str());
  return status_exit(out.status);
}

int cmd_sweep(ExperimentConfig cfg) {
  if (cfg.p_values.empty()) throw ConfigError("empty sweep: p-list has no entries");
  struct Job {
    int id;
    double p;
    std::string phi;
    RunOutcome out;
  };
  std::vector<Job> jobs;
  for (double p : cfg.p_values)
    for (const std::string& phi : cfg.phi_list)
      jobs.push_back({int(jobs.size()), p, phi, {}});

  fs::create_directories(cfg.out_dir);
  const int workers = std::min<int>(thread_budget(), int(jobs.size()));
  std::atomic<size_t> cursor{0};
  const auto worker = [&] {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      Job& job = jobs[i];
      char sub[32];
      std::snprintf(sub, sizeof(sub), "run_%03d", job.id);
      try {
        job.out = run_dispatch(cfg, job.p, job.phi, fs::path(cfg.out_dir) / sub);
      } catch (const Error& e) {
        job.out.status = RunStatus::kError;
        job.out.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  std::string csv = "run,p,phi,status,iterations,residual,volume,anisotropy,shape\n";
  bool all_converged = true;
  for (const Job& job : jobs) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "run_%03d,%.15g,", job.id, job.p);
    csv += buf;
    csv += "\"" + job.phi + "\",";
    std::snprintf(buf, sizeof(buf), "%s,%d,%.15g,%.15g,%.15g,", status_name(job.out.status),
                  job.out.iterations, job.out.residual, job.out.volume,
                  job.out.anisotropy_final);
    csv += buf;
    csv += job.out.limit_shape + "\n";
    if (job.out.status != RunStatus::kConverged) all_converged = false;
    std::printf("run_%03d p=%.6g phi=\"%s\" -> %s (%d iters)\n", job.id, job.p,
                job.phi.c_str(), status_name(job.out.status), job.out.iterations);
    if (job.out.status == RunStatus::kError && !job.out.error.empty())
      std::fprintf(stderr, "run_%03d error: %s\n", job.id, job.out.error.c_str());
  }
  std::ofstream agg(fs::path(cfg.out_dir) / "sweep.csv", std::ios::binary);
  if (!agg) throw IoError("cannot open for writing: " + cfg.out_dir + "/sweep.csv");
  agg << csv;
  return all_converged ? 0 : 2;
}

}  // namespace curvimg
