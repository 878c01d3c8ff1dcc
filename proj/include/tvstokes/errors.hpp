#pragma once

#include <stdexcept>
#include <string>

namespace tvs {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Field dimensions, rectangles or grids do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A stripe removal would leave an empty rectangle.
class DegenerateRectError : public Error {
 public:
  using Error::Error;
};

// A tiling is not a disjoint cover or violates the halo condition.
class TilingError : public Error {
 public:
  using Error::Error;
};

// Requested subdomain layout cannot honour the overlap constraints.
class LayoutError : public Error {
 public:
  using Error::Error;
};

// Invalid solver or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterate became non-finite.
class NumericalDivergenceError : public Error {
 public:
  using Error::Error;
};

// Tangent field is too far from divergence-free to be integrated.
class InconsistentFieldError : public Error {
 public:
  InconsistentFieldError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Unsupported or malformed file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvs
