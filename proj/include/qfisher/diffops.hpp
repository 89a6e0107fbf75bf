#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qfisher/density.hpp"
#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/numerics.hpp"
#include "qfisher/quadrature.hpp"

namespace qfisher {

namespace detail {

/// Weights of a 1D stencil at one point of a line, as absolute positions along the line.
struct LineStencil {
  std::array<std::size_t, 6> pos{};
  std::array<double, 6> coef{};
  std::size_t len = 0;
};

// Left-boundary rows, indexed by distance from the edge. Right-boundary rows are mirror images
// (negated for the first derivative).
inline constexpr std::array<double, 3> kD1o2Edge{-1.5, 2.0, -0.5};
inline constexpr std::array<double, 5> kD1o4Edge0{-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12};
inline constexpr std::array<double, 5> kD1o4Edge1{-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12};
inline constexpr std::array<double, 4> kD2o2Edge{2.0, -5.0, 4.0, -1.0};
inline constexpr std::array<double, 6> kD2o4Edge0{45.0 / 12, -154.0 / 12, 214.0 / 12, -156.0 / 12, 61.0 / 12, -10.0 / 12};
inline constexpr std::array<double, 6> kD2o4Edge1{10.0 / 12, -15.0 / 12, -4.0 / 12, 14.0 / 12, -6.0 / 12, 1.0 / 12};

template <std::size_t N>
LineStencil edge_row(const std::array<double, N>& row, std::size_t n, bool right, double sign) {
  LineStencil s;
  s.len = N;
  for (std::size_t m = 0; m < N; ++m) {
    s.pos[m] = right ? n - 1 - m : m;
    s.coef[m] = right ? sign * row[m] : row[m];
  }
  return s;
}

/// Stencil for derivative `deriv` (1 or 2) at position i of a line with n points, formal order `order`.
inline LineStencil stencil_at(std::size_t i, std::size_t n, int order, int deriv) {
  const std::size_t edge_width = order == 2 ? 1 : 2;
  const bool left = i < edge_width;
  const bool right = i + edge_width >= n;
  const double flip = deriv == 1 ? -1.0 : 1.0;
  if (left || right) {
    const std::size_t from_edge = left ? i : n - 1 - i;
    if (order == 2) {
      return deriv == 1 ? edge_row(kD1o2Edge, n, right, flip) : edge_row(kD2o2Edge, n, right, flip);
    }
    if (from_edge == 0) {
      return deriv == 1 ? edge_row(kD1o4Edge0, n, right, flip) : edge_row(kD2o4Edge0, n, right, flip);
    }
    return deriv == 1 ? edge_row(kD1o4Edge1, n, right, flip) : edge_row(kD2o4Edge1, n, right, flip);
  }
  LineStencil s;
  if (order == 2) {
    s.len = 3;
    s.pos = {i - 1, i, i + 1};
    if (deriv == 1) {
      s.coef = {-0.5, 0.0, 0.5};
    } else {
      s.coef = {1.0, -2.0, 1.0};
    }
    return s;
  }
  s.len = 5;
  s.pos = {i - 2, i - 1, i, i + 1, i + 2};
  if (deriv == 1) {
    s.coef = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  } else {
    s.coef = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  }
  return s;
}

/// d^deriv f / dx_axis^deriv at flat index `flat`.
inline double derivative_at(const Grid& g, std::span<const double> f, std::size_t axis, int deriv, int order,
                            std::size_t flat) {
  const std::size_t stride = g.stride(axis);
  const std::size_t n = g.n(axis);
  const std::size_t pos = (flat / stride) % n;
  const std::size_t base = flat - pos * stride;
  const LineStencil s = stencil_at(pos, n, order, deriv);
  double acc = 0.0;
  for (std::size_t m = 0; m < s.len; ++m) acc += s.coef[m] * f[base + s.pos[m] * stride];
  const double h = g.spacing(axis);
  return deriv == 1 ? acc / h : acc / (h * h);
}

/// True when every point the stencil reads is strictly positive.
inline bool stencil_positive(const Grid& g, std::span<const double> f, std::size_t axis, int deriv, int order,
                             std::size_t flat) {
  const std::size_t stride = g.stride(axis);
  const std::size_t n = g.n(axis);
  const std::size_t pos = (flat / stride) % n;
  const std::size_t base = flat - pos * stride;
  const LineStencil s = stencil_at(pos, n, order, deriv);
  for (std::size_t m = 0; m < s.len; ++m) {
    if (!(f[base + s.pos[m] * stride] > 0.0)) return false;
  }
  return true;
}

inline void require_floor(double floor_rel) {
  if (!(floor_rel > 0.0 && floor_rel <= 1e-3)) {
    throw InvalidArgument("floor_rel must lie in (0, 1e-3] (got " + std::to_string(floor_rel) + ")");
  }
}

/// Points where f >= floor_rel * max(f).
inline std::vector<std::uint8_t> floor_mask(std::span<const double> f, double floor_rel) {
  double peak = 0.0;
  for (double x : f) peak = std::max(peak, x);
  const double threshold = floor_rel * peak;
  std::vector<std::uint8_t> inside(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) inside[i] = (peak > 0.0 && f[i] >= threshold) ? 1 : 0;
  return inside;
}

/// Logarithmic derivatives of a positive field on its floor mask:
/// grad f / f = grad log f and lap f / f = lap log f + |grad log f|^2.
/// Points whose stencil touches f <= 0 fall back to the direct quotients.
struct LogDerivatives {
  std::vector<std::uint8_t> inside;
  std::vector<std::vector<double>> grad;  // per axis
  std::vector<double> lap_ratio;          // empty unless requested
};

inline LogDerivatives log_derivatives(const Grid& g, std::span<const double> f, std::vector<std::uint8_t> inside,
                                      int order, bool want_laplacian) {
  LogDerivatives out;
  out.inside = std::move(inside);
  std::vector<double> logf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    // Non-positive entries get a finite placeholder; stencils touching them use the quotient fallback.
    logf[i] = f[i] > 0.0 ? std::log(f[i]) : 0.0;
  }
  out.grad.assign(g.dim(), std::vector<double>(f.size(), 0.0));
  if (want_laplacian) out.lap_ratio.assign(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!out.inside[i]) continue;
    double lap = 0.0;
    for (std::size_t d = 0; d < g.dim(); ++d) {
      double s;
      if (stencil_positive(g, f, d, 1, order, i)) {
        s = derivative_at(g, logf, d, 1, order, i);
      } else {
        s = derivative_at(g, f, d, 1, order, i) / f[i];
      }
      out.grad[d][i] = s;
      if (want_laplacian) {
        if (stencil_positive(g, f, d, 2, order, i)) {
          lap += derivative_at(g, logf, d, 2, order, i) + s * s;
        } else {
          lap += derivative_at(g, f, d, 2, order, i) / f[i];
        }
      }
    }
    if (want_laplacian) out.lap_ratio[i] = lap;
  }
  return out;
}

inline double excluded_mass(const Grid& g, std::span<const double> mass, const std::vector<std::uint8_t>& inside,
                            QuadratureRule rule) {
  std::vector<double> outside(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) outside[i] = inside[i] ? 0.0 : mass[i];
  return integrate(g, outside, rule);
}

}  // namespace detail

/// Per-axis first derivatives: central in the interior, one-sided of the same order at the edges.
inline VectorField gradient(const ScalarField& f, StencilScheme scheme = {}) {
  const Grid& g = f.grid();
  std::vector<std::vector<double>> comps(g.dim(), std::vector<double>(g.size()));
  for (std::size_t d = 0; d < g.dim(); ++d) {
    for (std::size_t i = 0; i < g.size(); ++i) comps[d][i] = detail::derivative_at(g, f.values(), d, 1, scheme.order, i);
  }
  return VectorField(g, std::move(comps));
}

/// Sum of per-axis second differences.
inline ScalarField laplacian(const ScalarField& f, StencilScheme scheme = {}) {
  const Grid& g = f.grid();
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < g.dim(); ++d) acc += detail::derivative_at(g, f.values(), d, 2, scheme.order, i);
    out[i] = acc;
  }
  return ScalarField(g, std::move(out));
}

/// grad P / P carried with its support mask.
using ScoreField = OnSupport<VectorField>;

/// Score grad P / P on the points where P >= floor_rel * max(P); zero elsewhere.
/// The score is evaluated as grad log P, which is exact for Gaussian densities at order 2.
inline ScoreField log_density_score(const DensityField& p, double floor_rel = 1e-12, StencilScheme scheme = {}) {
  detail::require_floor(floor_rel);
  auto ld = detail::log_derivatives(p.grid(), p.values(), detail::floor_mask(p.values(), floor_rel), scheme.order,
                                    false);
  const double lost = detail::excluded_mass(p.grid(), p.values(), ld.inside, p.quadrature());
  return ScoreField{VectorField(p.grid(), std::move(ld.grad)), SupportMask{std::move(ld.inside), lost}};
}

/// Central difference (f(t+dt) - f(t-dt)) / 2dt over three snapshots.
inline ScalarField time_derivative(const ScalarField& before, const ScalarField& now, const ScalarField& after,
                                   double dt) {
  require_same_grid(before.grid(), now.grid(), "time_derivative");
  require_same_grid(after.grid(), now.grid(), "time_derivative");
  if (!(dt > 0.0)) throw InvalidArgument("time_derivative: dt must be > 0");
  std::vector<double> out(now.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (after[i] - before[i]) / (2.0 * dt);
  return ScalarField(now.grid(), std::move(out));
}

}  // namespace qfisher
