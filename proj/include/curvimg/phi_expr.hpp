#pragma once

// Weight-density expressions: numeric constants, + - * / ^, cos, sin, exp,
// parentheses, and the angle `theta` on S^1 or the normal components
// `x,y,z` on S^2. Evenness of the sampled density is detected downstream by
// antipodal comparison.

#include <string>

#include "curvimg/grid.hpp"

namespace curvimg {

// Parses and samples the expression at the grid nodes. Throws ConfigError
// with a column pointer on syntax errors, unknown names, variables that do
// not match the grid dimension, or nonpositive sampled values.
Density phi_from_expression(GridPtr grid, const std::string& expr);

}  // namespace curvimg
