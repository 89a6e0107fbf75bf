#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/grid.hpp"

namespace qfisher {

enum class QuadratureRule { trapezoid, simpson };

inline std::string to_string(QuadratureRule r) { return r == QuadratureRule::simpson ? "simpson" : "trapezoid"; }

namespace detail {

/// Pairwise (cascade) summation; the split points depend only on the length, so results are reproducible.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 64;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Dimensionless per-axis coefficients; the physical weight is coefficient * axis_scale.
inline std::vector<double> axis_coefficients(const Axis& a, QuadratureRule rule) {
  const std::size_t n = a.n;
  std::vector<double> c(n, 1.0);
  if (rule == QuadratureRule::trapezoid) {
    c.front() = c.back() = 0.5;
    return c;
  }
  if (n % 2 == 0) throw InvalidArgument("Simpson quadrature needs an odd point count on every axis");
  for (std::size_t i = 0; i < n; ++i) c[i] = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
  return c;
}

inline double axis_scale(const Axis& a, QuadratureRule rule) {
  return rule == QuadratureRule::trapezoid ? a.spacing() : a.spacing() / 3.0;
}

inline std::vector<double> axis_weights(const Axis& a, QuadratureRule rule) {
  auto w = axis_coefficients(a, rule);
  const double s = axis_scale(a, rule);
  for (double& x : w) x *= s;
  return w;
}

/// Product of per-axis coefficients at every grid point, and the overall scale factor.
inline std::pair<std::vector<double>, double> tensor_coefficients(const Grid& grid, QuadratureRule rule) {
  std::vector<std::vector<double>> per_axis;
  double scale = 1.0;
  for (std::size_t d = 0; d < grid.dim(); ++d) {
    per_axis.push_back(axis_coefficients(grid.axis(d), rule));
    scale *= axis_scale(grid.axis(d), rule);
  }
  std::vector<double> c(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto idx = grid.unflatten(i);
    double ci = 1.0;
    for (std::size_t d = 0; d < grid.dim(); ++d) ci *= per_axis[d][idx[d]];
    c[i] = ci;
  }
  return {std::move(c), scale};
}

}  // namespace detail

/// Tensor-product quadrature weights, one per grid point.
inline std::vector<double> quadrature_weights(const Grid& grid, QuadratureRule rule = QuadratureRule::trapezoid) {
  auto [w, scale] = detail::tensor_coefficients(grid, rule);
  for (double& x : w) x *= scale;
  return w;
}

/// Integral of pointwise samples `values` over the grid box.
inline double integrate(const Grid& grid, std::span<const double> values,
                        QuadratureRule rule = QuadratureRule::trapezoid) {
  if (values.size() != grid.size()) throw InvalidArgument("integrate: sample count does not match grid");
  const auto [c, scale] = detail::tensor_coefficients(grid, rule);
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = c[i] * values[i];
  return scale * detail::pairwise_sum(terms);
}

inline double integrate(const ScalarField& f, QuadratureRule rule = QuadratureRule::trapezoid) {
  return integrate(f.grid(), f.values(), rule);
}

}  // namespace qfisher
