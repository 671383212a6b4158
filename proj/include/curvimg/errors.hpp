#pragma once

#include <stdexcept>
#include <string>

namespace curvimg {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Sample/grid length or grid identity mismatch.
struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Body fails a geometric validity requirement (convexity, origin position,
// bounded interior, closure of curvature data).
struct GeometryError : Error {
  explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// An iterative solve ran out of steps or hit a degenerate configuration.
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Bad experiment configuration or expression text.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem trouble while reading inputs or writing run artifacts.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace curvimg
