#pragma once

// Run artifacts: trace CSV, body snapshots (CSV, OFF), and SVG plots. All
// writers format through fixed printf patterns so a rerun with identical
// inputs reproduces the files byte for byte.

#include <string>
#include <utility>
#include <vector>

#include "curvimg/body2d.hpp"
#include "curvimg/iteration.hpp"
#include "curvimg/polytope3d.hpp"

namespace curvimg {

const char* status_name(RunStatus s);  // "converged" | "max_iter" | "error"

// Columns: iter,volume,A_p,B_p,Omega_p,vol_product,hausdorff_step,residual,
// vol_ratio,h_min,h_max,ms
void write_trace_csv(const std::string& path, const IterationTrace& trace);

// theta,h,f per grid node.
void write_snapshot_csv(const std::string& path, const Body2D& k);
// ux,uy,uz,h,A per grid node (A = 0 on inactive facets).
void write_snapshot_csv(const std::string& path, const Polytope3D& k);

// Polygonal faces straight from the facet cycles.
void write_off(const std::string& path, const Polytope3D& k);

// Overlay of boundary outlines, one path per snapshot, light-to-dark by step.
void write_outlines_svg(const std::string& path,
                        const std::vector<std::pair<int, Body2D>>& snapshots);

// Two stacked panels: functionals normalized by their first finite value,
// and log10 of residual and step size.
void write_curves_svg(const std::string& path, const IterationTrace& trace);

}  // namespace curvimg
