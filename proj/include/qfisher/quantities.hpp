#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qfisher/constants.hpp"
#include "qfisher/density.hpp"
#include "qfisher/diffops.hpp"
#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/numerics.hpp"
#include "qfisher/quadrature.hpp"

namespace qfisher {

/// Convention fixing the additive freedom c(t) of the heat <-> density map.
enum class Gauge {
  zero_c,    ///< c = 0, heat = -(1/alpha) log P
  min_zero,  ///< c = log max P, so the heat is 0 at the density peak and positive elsewhere
  given,     ///< heat supplied directly by the caller with an explicit c
};

inline std::string to_string(Gauge g) {
  switch (g) {
    case Gauge::zero_c: return "zero_c";
    case Gauge::min_zero: return "min_zero";
    case Gauge::given: return "given";
  }
  return "given";
}

/// exp(x) overflows double for x above roughly 709.
inline constexpr double kExpOverflowGuard = 700.0;

/// Heat distribution with its gauge constant c and scale alpha; P = exp(c) exp(-alpha * heat).
class HeatField {
 public:
  HeatField(ScalarField heat, double alpha, double c_gauge = 0.0, Gauge gauge = Gauge::given,
            std::optional<SupportMask> support = std::nullopt)
      : heat_(std::move(heat)),
        alpha_(alpha),
        c_(c_gauge),
        gauge_(gauge),
        support_(support ? std::move(*support) : SupportMask::full(heat_.size())) {
    if (!(std::isfinite(alpha_) && alpha_ > 0.0)) throw InvalidArgument("heat field alpha must be finite and > 0");
    if (!std::isfinite(c_)) throw InvalidArgument("heat field gauge constant must be finite");
    if (support_.inside.size() != heat_.size()) throw InvalidArgument("heat field support does not match grid");
    for (double q : heat_.values()) {
      if (-alpha_ * q + c_ > kExpOverflowGuard) {
        throw NumericalError("heat field reconstructs to an overflowing density exp(-alpha*heat + c)");
      }
    }
  }

  const ScalarField& heat() const noexcept { return heat_; }
  const Grid& grid() const noexcept { return heat_.grid(); }
  double alpha() const noexcept { return alpha_; }
  double c_gauge() const noexcept { return c_; }
  /// exp(c).
  double c_hat() const noexcept { return std::exp(c_); }
  Gauge gauge() const noexcept { return gauge_; }
  const SupportMask& support() const noexcept { return support_; }

  /// Dimensionless heat alpha * heat.
  ScalarField scaled() const {
    std::vector<double> v(heat_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha_ * heat_[i];
    return ScalarField(heat_.grid(), std::move(v));
  }

 private:
  ScalarField heat_;
  double alpha_;
  double c_;
  Gauge gauge_;
  SupportMask support_;
};

struct FisherResult {
  double value = 0.0;
  /// Probability mass on points excluded by the support mask.
  double excluded_mass = 0.0;
};

namespace detail {

inline VectorField scaled(const VectorField& v, double s, const SupportMask& support) {
  std::vector<std::vector<double>> comps(v.dim(), std::vector<double>(v.size(), 0.0));
  for (std::size_t d = 0; d < v.dim(); ++d) {
    const auto c = v.component(d);
    for (std::size_t i = 0; i < v.size(); ++i) comps[d][i] = support.contains(i) ? s * c[i] : 0.0;
  }
  return VectorField(v.grid(), std::move(comps));
}

}  // namespace detail

/// u = -D grad P / P.
inline OnSupport<VectorField> osmotic_velocity(const DensityField& p, const PhysicalConstants& k,
                                               const Numerics& num = {}) {
  auto score = log_density_score(p, num.floor_rel, num.scheme);
  return {detail::scaled(score.field, -k.D(), score.support), std::move(score.support)};
}

/// delta p = -(hbar/2) grad P / P.
inline OnSupport<VectorField> momentum_fluctuation(const DensityField& p, const PhysicalConstants& k,
                                                   const Numerics& num = {}) {
  auto score = log_density_score(p, num.floor_rel, num.scheme);
  return {detail::scaled(score.field, -0.5 * k.hbar(), score.support), std::move(score.support)};
}

/// E_tot = hbar omega + |delta p|^2 / 2m. Off the support delta p is taken as zero.
inline OnSupport<ScalarField> total_energy_density(const DensityField& p, const PhysicalConstants& k,
                                                   const Numerics& num = {}) {
  auto dp = momentum_fluctuation(p, k, num);
  std::vector<double> e(p.size());
  const double rest = k.hbar() * k.omega();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = rest + dp.field.squared_norm(i) / (2.0 * k.mass());
  return {ScalarField(p.grid(), std::move(e)), std::move(dp.support)};
}

/// Quantum potential in the density form with the sign used by the heat picture:
/// Q = -(hbar^2 / 4m) [ (1/2) |grad P / P|^2 - lap P / P ].
inline OnSupport<ScalarField> quantum_potential_reversed(const DensityField& p, const PhysicalConstants& k,
                                                         const Numerics& num = {}) {
  detail::require_floor(num.floor_rel);
  const auto ld = detail::log_derivatives(p.grid(), p.values(), detail::floor_mask(p.values(), num.floor_rel),
                                          num.scheme.order, true);
  const double pref = -k.hbar() * k.hbar() / (4.0 * k.mass());
  std::vector<double> q(p.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!ld.inside[i]) continue;
    double s2 = 0.0;
    for (const auto& c : ld.grad) s2 += c[i] * c[i];
    q[i] = pref * (0.5 * s2 - ld.lap_ratio[i]);
  }
  const double lost = detail::excluded_mass(p.grid(), p.values(), ld.inside, p.quadrature());
  return {ScalarField(p.grid(), std::move(q)), SupportMask{ld.inside, lost}};
}

/// Standard amplitude form Q = -(hbar^2 / 2m) lap R / R, with lap R / R taken in log-amplitude form
/// (lap log R + |grad log R|^2) on the points where R^2 >= floor_rel * max(R^2).
inline OnSupport<ScalarField> quantum_potential_standard(const ScalarField& r, const PhysicalConstants& k,
                                                         const Numerics& num = {}) {
  detail::require_floor(num.floor_rel);
  std::vector<double> r2(r.size());
  for (std::size_t i = 0; i < r2.size(); ++i) r2[i] = r[i] * r[i];
  // The floor is applied to R^2 so the mask matches the density mask point for point.
  auto ld = detail::log_derivatives(r.grid(), r.values(), detail::floor_mask(r2, num.floor_rel), num.scheme.order,
                                    true);
  const auto& inside = ld.inside;
  std::vector<double> q(r.size(), 0.0);
  const double pref = -k.hbar() * k.hbar() / (2.0 * k.mass());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (inside[i] && r[i] > 0.0) q[i] = pref * ld.lap_ratio[i];
  }
  const double total = integrate(r.grid(), r2, num.quadrature);
  const double lost = total > 0.0 ? detail::excluded_mass(r.grid(), r2, inside, num.quadrature) / total : 0.0;
  return {ScalarField(r.grid(), std::move(q)), SupportMask{inside, lost}};
}

/// F = integral of P |grad P / P|^2 over the support mask.
inline FisherResult fisher_information(const DensityField& p, const Numerics& num = {}) {
  const auto score = log_density_score(p, num.floor_rel, num.scheme);
  std::vector<double> integrand(p.size(), 0.0);
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (score.support.contains(i)) integrand[i] = p[i] * score.field.squared_norm(i);
  }
  return {integrate(p.grid(), integrand, p.quadrature()), score.support.excluded_mass};
}

/// Integral of P f.
inline double expectation(const DensityField& p, const ScalarField& f) {
  require_same_grid(p.grid(), f.grid(), "expectation");
  std::vector<double> pf(p.size());
  for (std::size_t i = 0; i < pf.size(); ++i) pf[i] = p[i] * f[i];
  return integrate(p.grid(), pf, p.quadrature());
}

/// Integral of P Q.
inline double mean_quantum_potential(const DensityField& p, const ScalarField& q) {
  require_same_grid(p.grid(), q.grid(), "mean_quantum_potential");
  return expectation(p, q);
}

/// Inverts P = exp(c) exp(-alpha heat) for the heat field in the requested gauge.
inline HeatField heat_from_density(const DensityField& p, const PhysicalConstants& k, Gauge gauge = Gauge::zero_c,
                                   const Numerics& num = {}) {
  if (gauge == Gauge::given) throw InvalidArgument("heat_from_density needs gauge zero_c or min_zero");
  detail::require_floor(num.floor_rel);
  auto inside = detail::floor_mask(p.values(), num.floor_rel);
  const double alpha = k.alpha();
  const double c = gauge == Gauge::zero_c ? 0.0 : std::log(p.max());
  // log of the smallest subnormal stands in for log 0 so the field stays finite.
  const double log_zero = std::log(std::numeric_limits<double>::denorm_min());
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double lp = p[i] > 0.0 ? std::log(p[i]) : log_zero;
    q[i] = -(lp - c) / alpha;
  }
  const double lost = detail::excluded_mass(p.grid(), p.values(), inside, p.quadrature());
  return HeatField(ScalarField(p.grid(), std::move(q)), alpha, c, gauge, SupportMask{std::move(inside), lost});
}

struct HeatDensity {
  DensityField density;
  /// Realized normalization 1 / integral of exp(-alpha heat).
  double c_hat;
};

/// P = exp(-alpha heat) / integral of exp(-alpha heat).
inline HeatDensity density_from_heat(const HeatField& h, QuadratureRule rule = QuadratureRule::trapezoid) {
  std::vector<double> w(h.heat().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = h.alpha() * h.heat()[i];
    if (x < -kExpOverflowGuard) throw NumericalError("density_from_heat: exp(-alpha*heat) overflows");
    w[i] = std::exp(-x);
  }
  const double z = integrate(h.grid(), w, rule);
  if (!(z > 0.0 && std::isfinite(z))) throw NumericalError("density_from_heat: exp(-alpha*heat) is not integrable");
  return {normalize_density(ScalarField(h.grid(), std::move(w)), rule), 1.0 / z};
}

/// F = alpha^2 c_hat * integral of exp(-alpha heat) |grad heat|^2 over the heat support.
inline FisherResult fisher_from_heat(const HeatField& h, const Numerics& num = {}) {
  std::vector<double> w(h.heat().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = h.alpha() * h.heat()[i];
    if (x < -kExpOverflowGuard) throw NumericalError("fisher_from_heat: exp(-alpha*heat) overflows");
    w[i] = std::exp(-x);
  }
  const double z = integrate(h.grid(), w, num.quadrature);
  if (!(z > 0.0 && std::isfinite(z))) throw NumericalError("fisher_from_heat: exp(-alpha*heat) is not integrable");
  const double c_hat = 1.0 / z;
  const auto grad = gradient(h.heat(), num.scheme);
  std::vector<double> integrand(w.size(), 0.0);
  std::vector<double> outside(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (h.support().contains(i)) {
      integrand[i] = w[i] * grad.squared_norm(i);
    } else {
      outside[i] = w[i];
    }
  }
  const double a2 = h.alpha() * h.alpha();
  return {a2 * c_hat * integrate(h.grid(), integrand, num.quadrature),
          c_hat * integrate(h.grid(), outside, num.quadrature)};
}

/// Heat released between two densities: delta heat = -kT log(P_t / P_0) on the joint support.
inline OnSupport<ScalarField> heat_difference_from_ratio(const DensityField& p_t, const DensityField& p_0,
                                                         const PhysicalConstants& k, const Numerics& num = {}) {
  require_same_grid(p_t.grid(), p_0.grid(), "heat_difference_from_ratio");
  detail::require_floor(num.floor_rel);
  const auto mt = detail::floor_mask(p_t.values(), num.floor_rel);
  const auto m0 = detail::floor_mask(p_0.values(), num.floor_rel);
  std::vector<std::uint8_t> inside(p_t.size());
  std::vector<double> dq(p_t.size(), 0.0);
  for (std::size_t i = 0; i < dq.size(); ++i) {
    inside[i] = mt[i] && m0[i];
    if (inside[i]) dq[i] = -k.kT() * (std::log(p_t[i]) - std::log(p_0[i]));
  }
  const double lost = detail::excluded_mass(p_t.grid(), p_t.values(), inside, p_t.quadrature());
  return {ScalarField(p_t.grid(), std::move(dq)), SupportMask{std::move(inside), lost}};
}

}  // namespace qfisher
