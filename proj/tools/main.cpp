#include <cstdio>
#include <cstdlib>
#include <string>

#include "curvimg/check.hpp"
#include "curvimg/errors.hpp"
#include "curvimg/experiment.hpp"

namespace {

int usage() {
  std::fputs(
      "usage: curvimg run   [--unsafe] CONFIG\n"
      "       curvimg sweep [--unsafe] CONFIG\n"
      "       curvimg check [--seeds N] [--only SUITE]\n"
      "\n"
      "run    one experiment from a TOML config; writes trace.csv,\n"
      "       summary.json, body snapshots, and SVG plots into out_dir\n"
      "sweep  cross product of the config's p and phi lists, run\n"
      "       concurrently (CURVIMG_THREADS caps workers)\n"
      "check  property suites on seeded random bodies\n",
      stderr);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  const std::string cmd = argv[1];
  if (cmd != "run" && cmd != "sweep" && cmd != "check") {
    std::fprintf(stderr, "unknown command '%s'\n", cmd.c_str());
    return usage();
  }

  bool unsafe = false;
  int seeds = 5;
  std::string only, config;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--unsafe") {
      unsafe = true;
    } else if (arg == "--seeds") {
      if (++i == argc) return usage();
      seeds = std::atoi(argv[i]);
    } else if (arg == "--only") {
      if (++i == argc) return usage();
      only = argv[i];
    } else if (!arg.empty() && arg[0] == '-') {
      std::fprintf(stderr, "unknown flag '%s'\n", arg.c_str());
      return usage();
    } else if (config.empty()) {
      config = arg;
    } else {
      std::fprintf(stderr, "unexpected extra argument '%s'\n", arg.c_str());
      return usage();
    }
  }

  try {
    if (cmd == "check") {
      if (!config.empty()) {
        std::fprintf(stderr, "check takes no config file\n");
        return 1;
      }
      return curvimg::cmd_check(seeds, only);
    }
    if (config.empty()) {
      std::fprintf(stderr, "%s: missing CONFIG\n", cmd.c_str());
      return usage();
    }
    curvimg::ExperimentConfig cfg = curvimg::load_experiment(config);
    cfg.unsafe = unsafe;
    return cmd == "run" ? curvimg::cmd_run(std::move(cfg))
                        : curvimg::cmd_sweep(std::move(cfg));
  } catch (const curvimg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
