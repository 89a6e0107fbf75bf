#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qfisher/constants.hpp"
#include "qfisher/density.hpp"
#include "qfisher/error.hpp"
#include "qfisher/evolution.hpp"
#include "qfisher/field.hpp"

namespace qfisher::catalog {

/// Static Gaussian with standard deviation `sigma`, centred at x0 on the first axis (isotropic in nD).
struct Gaussian {
  double sigma = 1.0;
  double x0 = 0.0;
};

/// Harmonic-oscillator ground state, variance hbar / 2 m omega.
struct HoGround {};

/// Harmonic-oscillator coherent state released from rest at x0: ground-state width, centre x0 cos(omega t).
struct HoCoherent {
  double x0 = 1.0;
};

/// Free Gaussian packet with initial width sigma0, centre x0 and momentum p0.
struct FreePacket {
  double sigma0 = 1.0;
  double x0 = 0.0;
  double p0 = 0.0;
};

/// Equal-weight mixture of two Gaussians at +-separation/2 on the first axis.
/// Its log-density is not quadratic, so order-2 stencils carry genuine O(h^2) truncation on it.
struct Bimodal {
  double sigma = 1.0;
  double separation = 3.0;
};

/// Density samples loaded from a file, in grid order.
struct Sampled {
  std::string path;
  std::vector<double> values;
};

using DensitySpec = std::variant<Gaussian, HoGround, HoCoherent, FreePacket, Bimodal, Sampled>;

inline std::string kind_name(const DensitySpec& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) return "gaussian";
        if constexpr (std::is_same_v<T, HoGround>) return "ho_ground";
        if constexpr (std::is_same_v<T, HoCoherent>) return "ho_coherent";
        if constexpr (std::is_same_v<T, FreePacket>) return "free_packet";
        if constexpr (std::is_same_v<T, Bimodal>) return "bimodal";
        return "from_file";
      },
      s);
}

/// True when the density does not depend on time, so identical frames stand in for a trajectory.
inline bool has_static_frames(const DensitySpec& s) {
  return std::holds_alternative<Gaussian>(s) || std::holds_alternative<HoGround>(s) ||
         std::holds_alternative<Bimodal>(s);
}

inline double ho_variance(const PhysicalConstants& k) { return k.hbar() / (2.0 * k.mass() * k.omega()); }

/// sigma(t)^2 = sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).
inline double free_variance(double sigma0, double t, const PhysicalConstants& k) {
  const double s2 = sigma0 * sigma0;
  const double r = k.hbar() * t / (2.0 * k.mass() * s2);
  return s2 * (1.0 + r * r);
}

namespace detail {

inline double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// Isotropic Gaussian, centre `mean` on axis 0 and 0 on the others.
inline DensityField isotropic_gaussian(const Grid& g, double mean, double var, QuadratureRule rule) {
  const std::size_t dim = g.dim();
  return normalize_density(ScalarField::sample(g,
                                               [&](const auto& x) {
                                                 double p = normal_pdf(x[0], mean, var);
                                                 for (std::size_t d = 1; d < dim; ++d) p *= normal_pdf(x[d], 0.0, var);
                                                 return p;
                                               }),
                           rule);
}

}  // namespace detail

inline DensityField gaussian_density(double sigma, double x0, const Grid& g,
                                     QuadratureRule rule = QuadratureRule::trapezoid) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian: sigma must be > 0");
  return detail::isotropic_gaussian(g, x0, sigma * sigma, rule);
}

/// Exact |psi|^2 of the freely spreading Gaussian packet at time t.
inline DensityField analytic_free_gaussian(double sigma0, double x0, double p0, double t, const PhysicalConstants& k,
                                           const Grid& g, QuadratureRule rule = QuadratureRule::trapezoid) {
  if (!(sigma0 > 0.0)) throw InvalidArgument("free packet: sigma0 must be > 0");
  return detail::isotropic_gaussian(g, x0 + p0 * t / k.mass(), free_variance(sigma0, t, k), rule);
}

struct HoKind {
  bool coherent = false;
  double x0 = 0.0;
  static HoKind ground() { return {}; }
  static HoKind displaced(double x0) { return {true, x0}; }
};

/// Harmonic-oscillator ground or coherent-state density at time t.
inline DensityField analytic_ho_density(HoKind kind, double t, const PhysicalConstants& k, const Grid& g,
                                        QuadratureRule rule = QuadratureRule::trapezoid) {
  const double centre = kind.coherent ? kind.x0 * std::cos(k.omega() * t) : 0.0;
  return detail::isotropic_gaussian(g, centre, ho_variance(k), rule);
}

inline DensityField bimodal_density(double sigma, double separation, const Grid& g,
                                    QuadratureRule rule = QuadratureRule::trapezoid) {
  if (!(sigma > 0.0)) throw InvalidArgument("bimodal: sigma must be > 0");
  const double var = sigma * sigma;
  const double a = 0.5 * separation;
  const std::size_t dim = g.dim();
  return normalize_density(ScalarField::sample(g,
                                               [&](const auto& x) {
                                                 double p = 0.5 * (detail::normal_pdf(x[0], -a, var) +
                                                                   detail::normal_pdf(x[0], a, var));
                                                 for (std::size_t d = 1; d < dim; ++d) {
                                                   p *= detail::normal_pdf(x[d], 0.0, var);
                                                 }
                                                 return p;
                                               }),
                           rule);
}

/// The density described by `spec` at time t; time-independent kinds ignore t.
inline DensityField density_at(const DensitySpec& spec, double t, const PhysicalConstants& k, const Grid& g,
                               QuadratureRule rule = QuadratureRule::trapezoid) {
  return std::visit(
      [&](const auto& v) -> DensityField {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return gaussian_density(v.sigma, v.x0, g, rule);
        } else if constexpr (std::is_same_v<T, HoGround>) {
          return analytic_ho_density(HoKind::ground(), t, k, g, rule);
        } else if constexpr (std::is_same_v<T, HoCoherent>) {
          return analytic_ho_density(HoKind::displaced(v.x0), t, k, g, rule);
        } else if constexpr (std::is_same_v<T, FreePacket>) {
          return analytic_free_gaussian(v.sigma0, v.x0, v.p0, t, k, g, rule);
        } else if constexpr (std::is_same_v<T, Bimodal>) {
          return bimodal_density(v.sigma, v.separation, g, rule);
        } else {
          if (v.values.size() != g.size()) {
            throw InvalidArgument("density file '" + v.path + "' has " + std::to_string(v.values.size()) +
                                  " samples but the grid has " + std::to_string(g.size()) + " points");
          }
          return normalize_density(ScalarField(g, v.values), rule);
        }
      },
      spec);
}

/// Gaussian packet (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 4 sigma^2 + i p0 x / hbar) on a 1D grid.
inline WaveFunction gaussian_wavepacket(double sigma, double x0, double p0, const PhysicalConstants& k,
                                        const Grid& g) {
  if (g.dim() != 1) throw InvalidArgument("wavepackets are 1D only");
  const double amp = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  return normalize_wavefunction(WaveFunction::sample(g, [&](const auto& x) {
    const double d = x[0] - x0;
    return amp * std::exp(std::complex<double>(-d * d / (4.0 * sigma * sigma), p0 * x[0] / k.hbar()));
  }));
}

/// Wavefunction at t = 0 for a density kind. Kinds without a natural phase use R = sqrt(P).
inline WaveFunction initial_wavefunction(const DensitySpec& spec, const PhysicalConstants& k, const Grid& g) {
  if (g.dim() != 1) throw InvalidArgument("wavefunction initial states are 1D only");
  if (const auto* f = std::get_if<FreePacket>(&spec)) return gaussian_wavepacket(f->sigma0, f->x0, f->p0, k, g);
  if (const auto* c = std::get_if<HoCoherent>(&spec)) {
    return gaussian_wavepacket(std::sqrt(ho_variance(k)), c->x0, 0.0, k, g);
  }
  if (std::holds_alternative<HoGround>(spec)) return gaussian_wavepacket(std::sqrt(ho_variance(k)), 0.0, 0.0, k, g);
  const DensityField p = density_at(spec, 0.0, k, g);
  std::vector<std::complex<double>> v(p.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(p[i]);
  return normalize_wavefunction(WaveFunction(g, std::move(v)));
}

/// Harmonic well for the oscillator kinds, free space otherwise.
inline Potential natural_potential(const DensitySpec& spec, const PhysicalConstants& k, const Grid& g) {
  if (std::holds_alternative<HoGround>(spec) || std::holds_alternative<HoCoherent>(spec)) {
    return Potential::harmonic(g, k);
  }
  return Potential::zero(g);
}

/// Closed-form Fisher information dim / sigma(t)^2 where one exists.
inline std::optional<double> analytic_fisher(const DensitySpec& spec, double t, const PhysicalConstants& k,
                                             std::size_t dim = 1) {
  const double d = static_cast<double>(dim);
  if (const auto* g = std::get_if<Gaussian>(&spec)) return d / (g->sigma * g->sigma);
  if (std::holds_alternative<HoGround>(spec) || std::holds_alternative<HoCoherent>(spec)) {
    return d / ho_variance(k);
  }
  if (const auto* f = std::get_if<FreePacket>(&spec)) return d / free_variance(f->sigma0, t, k);
  return std::nullopt;
}

struct OracleValue {
  std::string quantity;
  double value;
  std::string basis;  ///< how the value is known
};

struct CatalogEntry {
  std::string kind;
  std::string description;
  std::vector<OracleValue> oracles;
};

/// Analytic densities and the closed-form values the test suites check them against.
inline std::vector<CatalogEntry> entries(const PhysicalConstants& k) {
  const double h2m = k.hbar() * k.hbar() / k.mass();
  const double s2ho = ho_variance(k);
  const double s2free = free_variance(1.0, 1.0, k);
  std::vector<CatalogEntry> out;
  out.push_back({"gaussian",
                 "static Gaussian(sigma, x0); shown for sigma = 1",
                 {{"F", 1.0, "analytic: F = 1/sigma^2"},
                  {"mean_qp", -h2m / 8.0, "analytic: integral P Q = -(hbar^2/8m) F"},
                  {"Q_rev(x0)", -h2m / 4.0, "closed form: hbar^2 x^2/(8m sigma^4) - hbar^2/(4m sigma^2)"},
                  {"score(x0+1)", -1.0, "analytic: grad log P = -(x-x0)/sigma^2"}}});
  out.push_back({"ho_ground",
                 "harmonic-oscillator ground state, sigma^2 = hbar/(2 m omega)",
                 {{"sigma^2", s2ho, "analytic: hbar/(2 m omega)"},
                  {"F", 1.0 / s2ho, "analytic: F = 2 m omega / hbar"},
                  {"P(0)", 1.0 / std::sqrt(2.0 * std::numbers::pi * s2ho), "analytic: |psi_0(0)|^2"},
                  {"Q_standard(0)", 0.5 * k.hbar() * k.omega(), "closed form: hbar omega/2 - m omega^2 x^2/2"},
                  {"mean_qp", -h2m / (8.0 * s2ho), "analytic: -(hbar^2/8m) F"}}});
  out.push_back({"ho_coherent",
                 "coherent state released from rest at x0, centre x0 cos(omega t); shown for x0 = 1",
                 {{"centre(t=pi/omega)", -1.0, "analytic: x0 cos(pi)"},
                  {"F", 1.0 / s2ho, "analytic: width constant, F = 2 m omega / hbar"}}});
  out.push_back({"free_packet",
                 "free Gaussian packet, sigma(t)^2 = sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2); shown for sigma0 = 1",
                 {{"sigma^2(t=1)", s2free, "analytic: spreading law"},
                  {"F(t=1)", 1.0 / s2free, "analytic: F = 1/sigma(t)^2"},
                  {"delta_heat(0,t=1)/kT", 0.5 * std::log(s2free), "analytic: -log(P_t(0)/P_0(0))"}}});
  out.push_back({"bimodal",
                 "two-Gaussian mixture; non-quadratic log P, used for refinement studies",
                 {}});
  return out;
}

}  // namespace qfisher::catalog

namespace qfisher::catalog {

/// Densities at t - dt, t, t + dt from the closed form (identical frames for time-independent kinds).
inline std::array<DensityField, 3> analytic_frames(const DensitySpec& spec, double t, double dt,
                                                   const PhysicalConstants& k, const Grid& g,
                                                   QuadratureRule rule = QuadratureRule::trapezoid) {
  if (!(dt > 0.0)) throw InvalidArgument("analytic_frames: dt must be > 0");
  if (std::holds_alternative<Sampled>(spec)) {
    throw InvalidArgument("a density loaded from file has no time dependence; evolve it instead");
  }
  return {density_at(spec, t - dt, k, g, rule), density_at(spec, t, k, g, rule), density_at(spec, t + dt, k, g, rule)};
}

}  // namespace qfisher::catalog
