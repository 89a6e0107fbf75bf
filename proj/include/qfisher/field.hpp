#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qfisher/error.hpp"
#include "qfisher/grid.hpp"

namespace qfisher {

namespace detail {

inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace detail

/// Real value per grid point.
class ScalarField {
 public:
  ScalarField() = default;

  ScalarField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw InvalidArgument("scalar field size " + std::to_string(values_.size()) + " does not match grid size " +
                            std::to_string(grid_.size()));
    }
    detail::require_finite(values_, "scalar field");
  }

  /// Uniform value over the grid.
  static ScalarField constant(const Grid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.size(), value));
  }

  /// Samples f(x) where x is the coordinate array of each point.
  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.coords(i));
    return ScalarField(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const& noexcept { return values_; }
  std::span<const double> values() const&& = delete;
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double max() const noexcept { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
  double min() const noexcept { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// `dim` real components per grid point, stored component-major.
class VectorField {
 public:
  VectorField() = default;

  VectorField(Grid grid, std::vector<std::vector<double>> components)
      : grid_(std::move(grid)), components_(std::move(components)) {
    if (components_.size() != grid_.dim()) throw InvalidArgument("vector field needs one component per dimension");
    for (const auto& c : components_) {
      if (c.size() != grid_.size()) throw InvalidArgument("vector field component size does not match grid");
      detail::require_finite(c, "vector field");
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return components_.size(); }
  std::size_t size() const noexcept { return grid_.size(); }
  std::span<const double> component(std::size_t d) const& noexcept { return components_[d]; }
  std::span<const double> component(std::size_t d) const&& = delete;

  double squared_norm(std::size_t i) const noexcept {
    double s = 0.0;
    for (const auto& c : components_) s += c[i] * c[i];
    return s;
  }
  double norm(std::size_t i) const noexcept { return std::sqrt(squared_norm(i)); }

 private:
  Grid grid_;
  std::vector<std::vector<double>> components_;
};

/// Complex amplitude per grid point.
class WaveFunction {
 public:
  WaveFunction() = default;

  WaveFunction(Grid grid, std::vector<std::complex<double>> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InvalidArgument("wavefunction size does not match grid");
    for (const auto& z : values_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NumericalError("wavefunction contains a non-finite value");
      }
    }
  }

  template <class F>
  static WaveFunction sample(const Grid& grid, F&& f) {
    std::vector<std::complex<double>> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.coords(i));
    return WaveFunction(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> values() const& noexcept { return values_; }
  std::span<const std::complex<double>> values() const&& = delete;
  std::size_t size() const noexcept { return values_.size(); }
  std::complex<double> operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  Grid grid_;
  std::vector<std::complex<double>> values_;
};

/// Points on which density-quotient quantities are defined, plus the probability mass left out.
struct SupportMask {
  std::vector<std::uint8_t> inside;
  double excluded_mass = 0.0;

  bool contains(std::size_t i) const noexcept { return inside[i] != 0; }
  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
  }
  static SupportMask full(std::size_t n) { return SupportMask{std::vector<std::uint8_t>(n, 1), 0.0}; }
};

inline SupportMask intersect(const SupportMask& a, const SupportMask& b) {
  SupportMask out{a.inside, std::max(a.excluded_mass, b.excluded_mass)};
  for (std::size_t i = 0; i < out.inside.size(); ++i) out.inside[i] = a.inside[i] && b.inside[i];
  return out;
}

/// A field that is only meaningful on `support`; values off the support are zero.
template <class Field>
struct OnSupport {
  Field field;
  SupportMask support;
};

}  // namespace qfisher
