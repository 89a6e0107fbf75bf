#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/quadrature.hpp"

namespace qfisher {

/// Nonnegative sampled probability density with unit integral under its quadrature rule.
class DensityField {
 public:
  const ScalarField& field() const noexcept { return field_; }
  const Grid& grid() const noexcept { return field_.grid(); }
  std::span<const double> values() const& noexcept { return field_.values(); }
  std::span<const double> values() const&& = delete;
  double operator[](std::size_t i) const noexcept { return field_[i]; }
  std::size_t size() const noexcept { return field_.size(); }
  QuadratureRule quadrature() const noexcept { return rule_; }
  double max() const noexcept { return field_.max(); }

 private:
  DensityField(ScalarField f, QuadratureRule rule) : field_(std::move(f)), rule_(rule) {}
  friend DensityField normalize_density(const ScalarField& raw, QuadratureRule rule);

  ScalarField field_;
  QuadratureRule rule_ = QuadratureRule::trapezoid;
};

/// Tolerated undershoot below zero, relative to the maximum, before a raw density is rejected.
inline constexpr double kNegativeClampRel = 1e-12;
inline constexpr double kNormalizationTol = 1e-9;

/// Divides `raw` by its integral. Tiny negative round-off is clamped to zero; anything larger is rejected.
inline DensityField normalize_density(const ScalarField& raw, QuadratureRule rule = QuadratureRule::trapezoid) {
  const double peak = raw.max();
  if (!(peak > 0.0)) throw InvalidArgument("density is zero everywhere");
  std::vector<double> v(raw.values().begin(), raw.values().end());
  for (double& x : v) {
    if (x < 0.0) {
      if (-x > kNegativeClampRel * peak) {
        throw InvalidArgument("density has a negative value " + std::to_string(x) + " beyond the clamp threshold");
      }
      x = 0.0;
    }
  }
  const double total = integrate(raw.grid(), v, rule);
  if (!(total > 0.0)) throw InvalidArgument("density integrates to zero");
  for (double& x : v) x /= total;
  ScalarField f(raw.grid(), std::move(v));
  if (std::abs(integrate(f, rule) - 1.0) > kNormalizationTol) {
    throw NumericalError("density normalization failed to reach unit mass");
  }
  return DensityField(std::move(f), rule);
}

/// P = |psi|^2, renormalized on the grid.
inline DensityField density_from_wavefunction(const WaveFunction& psi,
                                              QuadratureRule rule = QuadratureRule::trapezoid) {
  std::vector<double> v(psi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::norm(psi[i]);
  return normalize_density(ScalarField(psi.grid(), std::move(v)), rule);
}

/// R = sqrt(P).
inline ScalarField amplitude_from_density(const DensityField& p) {
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(p[i]);
  return ScalarField(p.grid(), std::move(v));
}

/// psi scaled to unit L2 norm under the given rule.
inline WaveFunction normalize_wavefunction(const WaveFunction& psi, QuadratureRule rule = QuadratureRule::trapezoid) {
  std::vector<double> mod2(psi.size());
  for (std::size_t i = 0; i < mod2.size(); ++i) mod2[i] = std::norm(psi[i]);
  const double total = integrate(psi.grid(), mod2, rule);
  if (!(total > 0.0)) throw InvalidArgument("wavefunction is zero everywhere");
  const double s = 1.0 / std::sqrt(total);
  std::vector<std::complex<double>> v(psi.values().begin(), psi.values().end());
  for (auto& z : v) z *= s;
  return WaveFunction(psi.grid(), std::move(v));
}

inline double wavefunction_norm(const WaveFunction& psi, QuadratureRule rule = QuadratureRule::trapezoid) {
  std::vector<double> mod2(psi.size());
  for (std::size_t i = 0; i < mod2.size(); ++i) mod2[i] = std::norm(psi[i]);
  return integrate(psi.grid(), mod2, rule);
}

/// Largest boundary value of P relative to max(P).
inline double boundary_ratio(const DensityField& p) {
  const double peak = p.max();
  double edge = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.grid().on_boundary(i)) edge = std::max(edge, p[i]);
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

/// Boundary level above which callers should warn that integrals lose their vanishing-flux property.
inline constexpr double kBoundaryWarnRel = 1e-10;

}  // namespace qfisher
