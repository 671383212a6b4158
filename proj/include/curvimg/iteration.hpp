#pragma once

// Fixed-point iteration of the curvature-image operator, with per-step
// functional tracing, stopping logic, and the volume-preserving minimal
// position renormalization used by the classical (p = -n) scheme.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "curvimg/body2d.hpp"
#include "curvimg/curvature_image.hpp"

namespace curvimg {

struct TraceRow {
  int iter = 0;
  double volume = 0;
  double a_p = 0;
  double b_p = 0;
  double omega_p = 0;
  double vol_product = 0;
  double hausdorff_step = 0;  // distance from the previous body
  double residual = 0;        // fixed-point residual of this body
  double vol_ratio = 1;       // volume relative to the previous body
  double h_min = 0;
  double h_max = 0;
  double ms = 0;              // wall time spent producing this body
};

enum class RunStatus { kConverged, kMaxIter, kError };

struct IterationTrace {
  std::vector<TraceRow> rows;  // rows[0] is the initial body
  RunStatus status = RunStatus::kError;
  std::string error;
  // Per-node oscillation max-min of h over the trailing window (50 steps).
  double tail_oscillation = 0;

  int iterations() const { return static_cast<int>(rows.size()) - 1; }
};

struct RunConfig {
  OperatorConfig op;
  int max_iter = 2000;
  double tol_step = 1e-8;
  double tol_residual = 1e-6;
  bool minimal_position = false;  // classical scheme; needs p = -n, uniform phi
};

// The observer, when set, sees every body the loop records: the normalized
// initial body as (0, k) and each accepted step as (i, k_i).
using Observer2D = std::function<void(int, const Body2D&)>;
using Observer3D = std::function<void(int, const Polytope3D&)>;

std::pair<Body2D, IterationTrace> iterate(const Body2D& initial, const RunConfig& config,
                                          const Observer2D& observe = {});
std::pair<Polytope3D, IterationTrace> iterate(const Polytope3D& initial,
                                              const RunConfig& config,
                                              const Observer3D& observe = {});

// Volume-preserving linear image with minimal perimeter (2D) or surface area
// (3D), parameterized over symmetric-traceless exponentials (SPD, det 1).
// Returns the transformed body and the transform.
std::pair<Body2D, Eigen::Matrix2d> minimal_position(const Body2D& k, double tol = 1e-9);
std::pair<Polytope3D, Eigen::Matrix3d> minimal_position(const Polytope3D& k,
                                                        double tol = 1e-9);

// p = -n, uniform phi: apply, renormalize by minimal position, recenter the
// Santalo point each step.
std::pair<Body2D, IterationTrace> iterate_classical(const Body2D& initial,
                                                    RunConfig config,
                                                    const Observer2D& observe = {});
std::pair<Polytope3D, IterationTrace> iterate_classical(const Polytope3D& initial,
                                                        RunConfig config,
                                                        const Observer3D& observe = {});

// (max h - min h) / mean h over the grid; 0 for balls centered at origin.
double anisotropy(const Body2D& k);
double anisotropy(const Polytope3D& k);

}  // namespace curvimg
