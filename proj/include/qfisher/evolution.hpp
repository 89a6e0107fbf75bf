#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qfisher/banded.hpp"
#include "qfisher/constants.hpp"
#include "qfisher/density.hpp"
#include "qfisher/error.hpp"
#include "qfisher/field.hpp"
#include "qfisher/numerics.hpp"

namespace qfisher {

/// Time-independent external potential V(x).
class Potential {
 public:
  explicit Potential(ScalarField values) : values_(std::move(values)) {}

  static Potential zero(const Grid& g) { return Potential(ScalarField::constant(g, 0.0)); }

  /// V = m omega^2 x^2 / 2 along the first axis.
  static Potential harmonic(const Grid& g, const PhysicalConstants& k) {
    const double c = 0.5 * k.mass() * k.omega() * k.omega();
    return Potential(ScalarField::sample(g, [c](const auto& x) { return c * x[0] * x[0]; }));
  }

  const ScalarField& values() const noexcept { return values_; }
  const Grid& grid() const noexcept { return values_.grid(); }

 private:
  ScalarField values_;
};

/// Crank-Nicolson propagator for i hbar psi_t = -(hbar^2/2m) psi_xx + V psi on a 1D grid with psi = 0 at
/// both edges. The kinetic term uses the interior second-difference stencil of the requested order
/// (order 2: tridiagonal solve, order 4: pentadiagonal). The step matrix is the Cayley transform of a real
/// symmetric operator, so the discrete L2 norm is conserved up to solver round-off.
class CrankNicolson {
 public:
  CrankNicolson(const Potential& v, double dt, const PhysicalConstants& k, StencilScheme scheme = {})
      : grid_(v.grid()), dt_(dt), order_(scheme.order), lu_(interior(v.grid()), scheme.order == 2 ? 1 : 2) {
    if (grid_.dim() != 1) throw InvalidArgument("Crank-Nicolson propagation is 1D only");
    if (!(dt > 0.0)) throw InvalidArgument("Crank-Nicolson: dt must be > 0");
    const std::size_t m = interior(grid_);
    const double h = grid_.spacing(0);
    const double kin = -k.hbar() * k.hbar() / (2.0 * k.mass() * h * h);
    const std::array<double, 3> d2 =
        order_ == 2 ? std::array<double, 3>{-2.0, 1.0, 0.0} : std::array<double, 3>{-30.0 / 12, 16.0 / 12, -1.0 / 12};
    diag_.resize(m);
    for (std::size_t i = 0; i < m; ++i) diag_[i] = kin * d2[0] + v.values()[i + 1];
    off1_ = kin * d2[1];
    off2_ = kin * d2[2];
    beta_ = std::complex<double>(0.0, dt / (2.0 * k.hbar()));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = (i >= lu_.bandwidth() ? i - lu_.bandwidth() : 0); j < std::min(m, i + lu_.bandwidth() + 1);
           ++j) {
        lu_.at(i, j) = (i == j ? 1.0 : 0.0) + beta_ * hamiltonian(i, j);
      }
    }
    lu_.factor();
  }

  const Grid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }

  WaveFunction step(const WaveFunction& psi) const {
    require_same_grid(psi.grid(), grid_, "Crank-Nicolson step");
    const std::size_t m = interior(grid_);
    const auto in = psi.values();
    std::vector<std::complex<double>> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::complex<double> hpsi = diag_[i] * in[i + 1];
      if (i >= 1) hpsi += off1_ * in[i];
      if (i + 1 < m) hpsi += off1_ * in[i + 2];
      if (order_ == 4) {
        if (i >= 2) hpsi += off2_ * in[i - 1];
        if (i + 2 < m) hpsi += off2_ * in[i + 3];
      }
      rhs[i] = in[i + 1] - beta_ * hpsi;
    }
    lu_.solve(rhs);
    std::vector<std::complex<double>> out(grid_.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) out[i + 1] = rhs[i];
    return WaveFunction(grid_, std::move(out));
  }

 private:
  static std::size_t interior(const Grid& g) { return g.n(0) - 2; }

  double hamiltonian(std::size_t i, std::size_t j) const {
    const std::size_t off = i > j ? i - j : j - i;
    if (off == 0) return diag_[i];
    if (off == 1) return off1_;
    if (off == 2) return off2_;
    return 0.0;
  }

  Grid grid_;
  double dt_;
  int order_;
  std::vector<double> diag_;
  double off1_ = 0.0;
  double off2_ = 0.0;
  std::complex<double> beta_;
  BandedLU<std::complex<double>> lu_;
};

/// One Crank-Nicolson step; builds and factors the propagator each call.
inline WaveFunction crank_nicolson_step(const WaveFunction& psi, const Potential& v, double dt,
                                        const PhysicalConstants& k, StencilScheme scheme = {}) {
  return CrankNicolson(v, dt, k, scheme).step(psi);
}

/// Uniformly spaced snapshots t0, t0 + dt_snap, ... of an evolving wavefunction.
struct Trajectory {
  Grid grid;
  double t0 = 0.0;
  double dt_snap = 0.0;
  std::vector<WaveFunction> frames;

  std::size_t count() const noexcept { return frames.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt_snap; }

  DensityField density(std::size_t k, QuadratureRule rule = QuadratureRule::trapezoid) const {
    return density_from_wavefunction(frames.at(k), rule);
  }

  /// Index of the interior frame nearest to t, so that frames k-1, k, k+1 all exist.
  std::size_t centre_index(double t) const {
    if (frames.size() < 3) throw InvalidArgument("trajectory needs at least three frames");
    const double raw = std::round((t - t0) / dt_snap);
    const double clamped = std::clamp(raw, 1.0, static_cast<double>(frames.size() - 2));
    return static_cast<std::size_t>(clamped);
  }

  std::array<DensityField, 3> density_window(std::size_t k, QuadratureRule rule = QuadratureRule::trapezoid) const {
    if (k < 1 || k + 1 >= frames.size()) throw InvalidArgument("density_window: frame has no neighbours");
    return {density(k - 1, rule), density(k, rule), density(k + 1, rule)};
  }
};

/// Frame norms must stay within this distance of 1.
inline constexpr double kTrajectoryNormTol = 1e-8;

/// Runs `steps` Crank-Nicolson steps from psi0 (taken at t0) and keeps every `snap_stride`-th state,
/// starting with psi0 itself. Grid edges are zeroed before the first step.
inline Trajectory evolve(const WaveFunction& psi0, const Potential& v, double dt, std::size_t steps,
                         std::size_t snap_stride, const PhysicalConstants& k, StencilScheme scheme = {},
                         double t0 = 0.0) {
  if (snap_stride == 0) throw InvalidArgument("evolve: snap_stride must be >= 1");
  if (steps < 2 * snap_stride) throw InvalidArgument("evolve: steps must be at least 2 * snap_stride");
  const CrankNicolson cn(v, dt, k, scheme);
  std::vector<std::complex<double>> start(psi0.values().begin(), psi0.values().end());
  start.front() = start.back() = {0.0, 0.0};
  WaveFunction psi(psi0.grid(), std::move(start));

  Trajectory traj{psi0.grid(), t0, dt * static_cast<double>(snap_stride), {}};
  auto keep = [&](const WaveFunction& f) {
    if (std::abs(wavefunction_norm(f) - 1.0) > kTrajectoryNormTol) {
      throw NumericalError("evolve: snapshot norm drifted beyond 1e-8 (is psi0 normalized?)");
    }
    traj.frames.push_back(f);
  };
  keep(psi);
  for (std::size_t s = 1; s <= steps; ++s) {
    psi = cn.step(psi);
    if (s % snap_stride == 0) keep(psi);
  }
  return traj;
}

}  // namespace qfisher
