#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfisher/constants.hpp"
#include "qfisher/density.hpp"
#include "qfisher/diffops.hpp"
#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/numerics.hpp"
#include "qfisher/quantities.hpp"

namespace qfisher {

/// The relations checked by the suite. Wire names (configs, reports) come from wire_name().
enum class RelationId {
  ThermalizedQuantumPotential,  ///< Q = (hbar^2/4m)[lap Q~ - (1/D) d/dt Q~]            "EQ_1_1"
  OsmoticGradient,              ///< grad P / P = -alpha grad heat                       "EQ_2_1"
  FisherRepresentations,        ///< F from the density == F from the heat field         "EQ_2_3_VS_2_7"
  MeanQuantumPotential,         ///< integral P Q = -(hbar^2/8m) F                       "EQ_2_5"
  ThermalFisher,                ///< F = -2 alpha integral P [lap heat - (2m/hbar) d/dt heat]  "EQ_2_6"
  MomentumVelocity,             ///< delta p = m u                                       "DELTA_P_EQ_M_U"
};

inline constexpr std::array<RelationId, 6> kAllRelations{
    RelationId::ThermalizedQuantumPotential, RelationId::OsmoticGradient, RelationId::FisherRepresentations,
    RelationId::MeanQuantumPotential,        RelationId::ThermalFisher,   RelationId::MomentumVelocity};

inline std::string wire_name(RelationId r) {
  switch (r) {
    case RelationId::ThermalizedQuantumPotential: return "EQ_1_1";
    case RelationId::OsmoticGradient: return "EQ_2_1";
    case RelationId::FisherRepresentations: return "EQ_2_3_VS_2_7";
    case RelationId::MeanQuantumPotential: return "EQ_2_5";
    case RelationId::ThermalFisher: return "EQ_2_6";
    case RelationId::MomentumVelocity: return "DELTA_P_EQ_M_U";
  }
  return "?";
}

inline std::optional<RelationId> parse_relation(std::string_view s) {
  for (RelationId r : kAllRelations) {
    if (wire_name(r) == s) return r;
  }
  return std::nullopt;
}

/// Relations that need a time derivative, hence three frames.
inline bool needs_frames(RelationId r) {
  return r == RelationId::ThermalizedQuantumPotential || r == RelationId::ThermalFisher;
}

enum class Classification { exact, formal };

inline std::string to_string(Classification c) { return c == Classification::exact ? "exact" : "formal"; }

/// Fixed per relation: the two substitution-based relations are formal, the rest are identities.
inline Classification classification_of(RelationId r) {
  return needs_frames(r) ? Classification::formal : Classification::exact;
}

struct ReportContext {
  Grid grid;
  PhysicalConstants constants;
  Numerics numerics;
  std::optional<Gauge> gauge;
  double time = 0.0;
  std::optional<double> dt;
};

/// Both sides of one relation and the size of their disagreement.
///
/// Scalar relations: lhs and rhs are the two numbers, residual_sup == residual_l2 == |lhs - rhs|.
/// Pointwise relations: lhs and rhs are sup norms of each side over the support, residuals are the sup and
/// L2 norms of the pointwise difference (Euclidean length for vector fields), and residual_field holds it.
struct IdentityReport {
  RelationId relation;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;
  /// residual_sup divided by the relation's natural scale (0 scale leaves it absolute).
  double relative_residual = 0.0;
  double excluded_mass = 0.0;
  Classification classification = Classification::exact;
  ReportContext context;
  std::optional<double> fisher;
  /// ThermalFisher only: F_thermal - F, the gap to the relation as literally stated.
  std::optional<double> deviation;
  std::optional<OnSupport<ScalarField>> residual_field;
};

namespace detail {

struct Norms {
  double sup = 0.0;
  double l2 = 0.0;
};

inline Norms masked_norms(const Grid& g, std::span<const double> r, const SupportMask& m, QuadratureRule rule) {
  Norms n;
  std::vector<double> sq(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!m.contains(i)) continue;
    n.sup = std::max(n.sup, std::abs(r[i]));
    sq[i] = r[i] * r[i];
  }
  n.l2 = std::sqrt(integrate(g, sq, rule));
  return n;
}

inline double masked_sup(std::span<const double> v, const SupportMask& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m.contains(i)) s = std::max(s, std::abs(v[i]));
  }
  return s;
}

inline double ratio(double num, double scale) { return scale > 0.0 ? num / scale : num; }

inline IdentityReport scalar_report(RelationId r, double lhs, double rhs, double scale, double excluded,
                                    ReportContext ctx) {
  IdentityReport rep;
  rep.relation = r;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.residual_sup = rep.residual_l2 = std::abs(lhs - rhs);
  rep.relative_residual = ratio(rep.residual_sup, scale);
  rep.excluded_mass = excluded;
  rep.classification = classification_of(r);
  rep.context = std::move(ctx);
  return rep;
}

inline IdentityReport field_report(RelationId r, std::vector<double> residual, double lhs_sup, double rhs_sup,
                                   double scale, SupportMask mask, ReportContext ctx) {
  const Grid& g = ctx.grid;
  const Norms n = masked_norms(g, residual, mask, ctx.numerics.quadrature);
  IdentityReport rep;
  rep.relation = r;
  rep.lhs = lhs_sup;
  rep.rhs = rhs_sup;
  rep.residual_sup = n.sup;
  rep.residual_l2 = n.l2;
  rep.relative_residual = ratio(n.sup, scale);
  rep.excluded_mass = mask.excluded_mass;
  rep.classification = classification_of(r);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (!mask.contains(i)) residual[i] = 0.0;
  }
  rep.residual_field = OnSupport<ScalarField>{ScalarField(g, std::move(residual)), std::move(mask)};
  rep.context = std::move(ctx);
  return rep;
}

inline void require_frames_share_grid(const std::array<DensityField, 3>& p, const char* what) {
  require_same_grid(p[0].grid(), p[1].grid(), what);
  require_same_grid(p[2].grid(), p[1].grid(), what);
}

inline std::array<HeatField, 3> heat_frames(const std::array<DensityField, 3>& p, const PhysicalConstants& k,
                                            Gauge gauge, const Numerics& num) {
  return {heat_from_density(p[0], k, gauge, num), heat_from_density(p[1], k, gauge, num),
          heat_from_density(p[2], k, gauge, num)};
}

inline SupportMask frame_support(const std::array<HeatField, 3>& h) {
  return intersect(intersect(h[0].support(), h[1].support()), h[2].support());
}

}  // namespace detail

/// Right-hand side (hbar^2/4m) [lap Q~ - (1/D) dQ~/dt] with Q~ = alpha * heat, on the joint frame support.
inline OnSupport<ScalarField> thermalized_qp_rhs(const std::array<HeatField, 3>& frames, double dt,
                                                 const PhysicalConstants& k, const Numerics& num = {}) {
  require_same_grid(frames[0].grid(), frames[1].grid(), "thermalized_qp_rhs");
  require_same_grid(frames[2].grid(), frames[1].grid(), "thermalized_qp_rhs");
  for (const auto& f : frames) {
    if (f.gauge() != frames[1].gauge() || f.alpha() != frames[1].alpha()) {
      throw InvalidArgument("thermalized_qp_rhs: frames use different gauges");
    }
  }
  const ScalarField q0 = frames[0].scaled();
  const ScalarField q1 = frames[1].scaled();
  const ScalarField q2 = frames[2].scaled();
  const ScalarField lap = laplacian(q1, num.scheme);
  const ScalarField dqdt = time_derivative(q0, q1, q2, dt);
  SupportMask mask = detail::frame_support(frames);
  const double pref = k.hbar() * k.hbar() / (4.0 * k.mass());
  std::vector<double> out(q1.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.contains(i)) out[i] = pref * (lap[i] - dqdt[i] / k.D());
  }
  return {ScalarField(q1.grid(), std::move(out)), std::move(mask)};
}

/// Quantum potential of the middle frame minus the thermalized right-hand side. Formal relation.
inline IdentityReport residual_eq_1_1(const std::array<DensityField, 3>& p, double dt, const PhysicalConstants& k,
                                      Gauge gauge = Gauge::zero_c, const Numerics& num = {}) {
  detail::require_frames_share_grid(p, "residual_eq_1_1");
  const auto heat = detail::heat_frames(p, k, gauge, num);
  const auto rhs = thermalized_qp_rhs(heat, dt, k, num);
  const auto q = quantum_potential_reversed(p[1], k, num);
  SupportMask mask = intersect(rhs.support, q.support);
  std::vector<double> res(p[1].size(), 0.0);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (mask.contains(i)) res[i] = q.field[i] - rhs.field[i];
  }
  const double lhs_sup = detail::masked_sup(q.field.values(), mask);
  const double rhs_sup = detail::masked_sup(rhs.field.values(), mask);
  return detail::field_report(RelationId::ThermalizedQuantumPotential, std::move(res), lhs_sup, rhs_sup, lhs_sup,
                              std::move(mask), ReportContext{p[1].grid(), k, num, gauge, 0.0, dt});
}

/// grad P / P + alpha grad heat, with alpha taken from `k` (the heat field may have been built with another alpha).
inline IdentityReport residual_gradient_relation(const DensityField& p, const HeatField& h,
                                                 const PhysicalConstants& k, const Numerics& num = {}) {
  require_same_grid(p.grid(), h.grid(), "residual_gradient_relation");
  const auto score = log_density_score(p, num.floor_rel, num.scheme);
  const auto gq = gradient(h.heat(), num.scheme);
  SupportMask mask = intersect(score.support, h.support());
  const double a = k.alpha();
  std::vector<double> res(p.size(), 0.0);
  std::vector<double> lhs_mag(p.size(), 0.0);
  std::vector<double> rhs_mag(p.size(), 0.0);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!mask.contains(i)) continue;
    double r2 = 0.0;
    double q2 = 0.0;
    for (std::size_t d = 0; d < p.grid().dim(); ++d) {
      const double s = score.field.component(d)[i];
      const double rhs = -a * gq.component(d)[i];
      r2 += (s - rhs) * (s - rhs);
      q2 += rhs * rhs;
    }
    res[i] = std::sqrt(r2);
    lhs_mag[i] = score.field.norm(i);
    rhs_mag[i] = std::sqrt(q2);
  }
  const double lhs_sup = detail::masked_sup(lhs_mag, mask);
  const double rhs_sup = detail::masked_sup(rhs_mag, mask);
  std::optional<Gauge> gauge = h.gauge();
  return detail::field_report(RelationId::OsmoticGradient, std::move(res), lhs_sup, rhs_sup, lhs_sup, std::move(mask),
                              ReportContext{p.grid(), k, num, gauge, 0.0, std::nullopt});
}

/// Boundary level of P above which the mean-potential identity is refused.
inline constexpr double kBoundaryErrorRel = 1e-6;

/// integral P Q_rev against -(hbar^2/8m) F.
inline IdentityReport check_mean_qp_fisher(const DensityField& p, const PhysicalConstants& k,
                                           const Numerics& num = {}) {
  const double edge = boundary_ratio(p);
  if (edge > kBoundaryErrorRel) {
    throw NumericalError("check_mean_qp_fisher: density reaches " + std::to_string(edge) +
                         " of its peak on the boundary; the identity needs a vanishing boundary flux");
  }
  const auto q = quantum_potential_reversed(p, k, num);
  const auto f = fisher_information(p, num);
  const double lhs = mean_quantum_potential(p, q.field);
  const double rhs = -k.hbar() * k.hbar() / (8.0 * k.mass()) * f.value;
  auto rep = detail::scalar_report(RelationId::MeanQuantumPotential, lhs, rhs, std::abs(rhs), f.excluded_mass,
                                   ReportContext{p.grid(), k, num, std::nullopt, 0.0, std::nullopt});
  rep.fisher = f.value;
  return rep;
}

/// F from the density against F from its heat field in the given gauge.
inline IdentityReport check_fisher_representations(const DensityField& p, const PhysicalConstants& k,
                                                   Gauge gauge = Gauge::zero_c, const Numerics& num = {}) {
  const auto direct = fisher_information(p, num);
  const auto via_heat = fisher_from_heat(heat_from_density(p, k, gauge, num), num);
  auto rep = detail::scalar_report(RelationId::FisherRepresentations, direct.value, via_heat.value,
                                   std::abs(direct.value), std::max(direct.excluded_mass, via_heat.excluded_mass),
                                   ReportContext{p.grid(), k, num, gauge, 0.0, std::nullopt});
  rep.fisher = direct.value;
  return rep;
}

/// F_thermal = -2 alpha integral P [lap heat - (2m/hbar) d heat/dt] against its decomposition
/// -2F + (4m/hbar) c'(t), which holds whenever the boundary flux vanishes. `deviation` records
/// F_thermal - F, the gap to the formal claim F_thermal = F.
inline IdentityReport thermal_fisher_value(const std::array<DensityField, 3>& p, double dt,
                                           const PhysicalConstants& k, Gauge gauge = Gauge::zero_c,
                                           const Numerics& num = {}) {
  detail::require_frames_share_grid(p, "thermal_fisher_value");
  if (!(dt > 0.0)) throw InvalidArgument("thermal_fisher_value: dt must be > 0");
  const auto heat = detail::heat_frames(p, k, gauge, num);
  const ScalarField lap = laplacian(heat[1].heat(), num.scheme);
  const ScalarField dqdt = time_derivative(heat[0].heat(), heat[1].heat(), heat[2].heat(), dt);
  const SupportMask mask = detail::frame_support(heat);
  const double time_coef = 2.0 * k.mass() / k.hbar();
  std::vector<double> integrand(p[1].size(), 0.0);
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (mask.contains(i)) integrand[i] = p[1][i] * (lap[i] - time_coef * dqdt[i]);
  }
  const double f_thermal = -2.0 * k.alpha() * integrate(p[1].grid(), integrand, p[1].quadrature());
  const auto f = fisher_information(p[1], num);
  const double c_rate = (heat[2].c_gauge() - heat[0].c_gauge()) / (2.0 * dt);
  const double predicted = -2.0 * f.value + 4.0 * k.mass() / k.hbar() * c_rate;
  auto rep = detail::scalar_report(RelationId::ThermalFisher, f_thermal, predicted, std::abs(f.value),
                                   std::max(mask.excluded_mass, f.excluded_mass),
                                   ReportContext{p[1].grid(), k, num, gauge, 0.0, dt});
  rep.fisher = f.value;
  rep.deviation = f_thermal - f.value;
  return rep;
}

/// delta p against m u; equal because D = hbar / 2m.
inline IdentityReport check_dp_mu(const DensityField& p, const PhysicalConstants& k, const Numerics& num = {}) {
  const auto dp = momentum_fluctuation(p, k, num);
  const auto u = osmotic_velocity(p, k, num);
  SupportMask mask = intersect(dp.support, u.support);
  std::vector<double> res(p.size(), 0.0);
  std::vector<double> lhs_mag(p.size(), 0.0);
  std::vector<double> rhs_mag(p.size(), 0.0);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (!mask.contains(i)) continue;
    double r2 = 0.0;
    double m2 = 0.0;
    for (std::size_t d = 0; d < p.grid().dim(); ++d) {
      const double mu = k.mass() * u.field.component(d)[i];
      const double diff = dp.field.component(d)[i] - mu;
      r2 += diff * diff;
      m2 += mu * mu;
    }
    res[i] = std::sqrt(r2);
    lhs_mag[i] = dp.field.norm(i);
    rhs_mag[i] = std::sqrt(m2);
  }
  const double lhs_sup = detail::masked_sup(lhs_mag, mask);
  const double rhs_sup = detail::masked_sup(rhs_mag, mask);
  return detail::field_report(RelationId::MomentumVelocity, std::move(res), lhs_sup, rhs_sup, lhs_sup,
                              std::move(mask), ReportContext{p.grid(), k, num, std::nullopt, 0.0, std::nullopt});
}

/// Runs one relation on frames t - dt, t, t + dt. Single-density relations only read the middle frame;
/// OsmoticGradient compares it against its own heat field in `gauge`.
inline IdentityReport evaluate_relation(RelationId r, const std::array<DensityField, 3>& frames, double dt,
                                        const PhysicalConstants& k, Gauge gauge = Gauge::zero_c,
                                        const Numerics& num = {}) {
  const DensityField& p = frames[1];
  switch (r) {
    case RelationId::ThermalizedQuantumPotential: return residual_eq_1_1(frames, dt, k, gauge, num);
    case RelationId::OsmoticGradient:
      return residual_gradient_relation(p, heat_from_density(p, k, gauge, num), k, num);
    case RelationId::FisherRepresentations: return check_fisher_representations(p, k, gauge, num);
    case RelationId::MeanQuantumPotential: return check_mean_qp_fisher(p, k, num);
    case RelationId::ThermalFisher: return thermal_fisher_value(frames, dt, k, gauge, num);
    case RelationId::MomentumVelocity: return check_dp_mu(p, k, num);
  }
  throw InvalidArgument("unknown relation");
}

}  // namespace qfisher
