#pragma once

// Config-driven experiments: load a TOML config, run one iteration to
// convergence with full artifacts, or sweep the p x phi cross product.

#include <string>
#include <vector>

namespace curvimg {

struct ExperimentConfig {
  int dim = 2;
  std::vector<double> p_values;       // run wants exactly one entry
  std::vector<std::string> phi_list;  // expressions; defaults to {"1"}
  std::string init;                   // body spec, e.g. "disk 1", "random 6 0.2 even"
  int resolution = 0;                 // grid nodes; 0 picks 512 (2d) / 642 (3d)
  int max_iter = 2000;
  double tol_step = 1e-8;
  double tol_residual = 1e-6;
  double closure_tol = 1e-8;
  double normalize_tol = 1e-10;
  bool minimal_position = false;
  unsigned seed = 1;
  std::string out_dir;  // defaults to runs/<config stem>
  bool unsafe = false;  // set by the CLI flag, not by the file
};

// Parses and validates; unknown keys are rejected by name and line.
ExperimentConfig load_experiment(const std::string& path);

// Exit codes: 0 converged, 2 max_iter (sweep: any run not converged),
// 1 config or runtime error.
int cmd_run(ExperimentConfig config);
int cmd_sweep(ExperimentConfig config);

}  // namespace curvimg
