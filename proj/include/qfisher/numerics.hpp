#pragma once

#include <string>

#include "qfisher/error.hpp"
#include "qfisher/quadrature.hpp"

namespace qfisher {

/// Finite-difference order; boundary points use one-sided stencils of the same order.
struct StencilScheme {
  int order = 2;

  StencilScheme() = default;
  explicit StencilScheme(int o) : order(o) {
    if (o != 2 && o != 4) throw InvalidArgument("stencil order must be 2 or 4 (got " + std::to_string(o) + ")");
  }
  bool operator==(const StencilScheme&) const = default;
};

/// Discretization choices shared by the analysis operations.
struct Numerics {
  StencilScheme scheme{};
  double floor_rel = 1e-12;
  QuadratureRule quadrature = QuadratureRule::trapezoid;
};

}  // namespace qfisher
