#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qfisher/banded.hpp"
#include "qfisher/catalog.hpp"
#include "qfisher/evolution.hpp"
#include "qfisher/quantities.hpp"

using namespace qfisher;

namespace {

const PhysicalConstants kDefault{};

double sup_density_diff(const WaveFunction& a, const WaveFunction& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(std::norm(a[i]) - std::norm(b[i])));
  return e;
}

double sup_diff(const WaveFunction& a, const WaveFunction& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST(Banded, SolvesRandomDiagonallyDominant) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t bw : {1u, 2u}) {
    const std::size_t n = 40;
    BandedLU<std::complex<double>> lu(n, bw);
    std::vector<std::vector<std::complex<double>>> dense(n, std::vector<std::complex<double>>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!lu.in_band(i, j)) continue;
        const std::complex<double> v = i == j ? std::complex<double>(6 + u(rng), u(rng)) : std::complex<double>(u(rng), u(rng));
        lu.at(i, j) = v;
        dense[i][j] = v;
      }
    }
    std::vector<std::complex<double>> x(n), b(n);
    for (auto& v : x) v = {u(rng), u(rng)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) b[i] += dense[i][j] * x[j];
    }
    lu.factor();
    lu.solve(b);
    for (std::size_t i = 0; i < n; ++i) EXPECT_LT(std::abs(b[i] - x[i]), 1e-12);
  }
}

TEST(Banded, ZeroPivot) {
  BandedLU<double> lu(4, 1);
  EXPECT_THROW(lu.factor(), NumericalError);
}

TEST(CrankNicolson, Unitarity) {
  const Grid g = make_grid(-20, 20, 1024);
  const auto psi = catalog::gaussian_wavepacket(1.0, 0.5, 1.0, kDefault, g);
  for (int order : {2, 4}) {
    const auto next = crank_nicolson_step(psi, Potential::harmonic(g, kDefault), 1e-2, kDefault, StencilScheme{order});
    EXPECT_NEAR(wavefunction_norm(next), 1.0, 1e-12);
  }
}

TEST(CrankNicolson, UnitarityRandomStates) {
  const Grid g = make_grid(-10, 10, 256);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  const CrankNicolson cn(Potential::harmonic(g, kDefault), 5e-3, kDefault);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::complex<double>> v(g.size());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) v[i] = {nd(rng), nd(rng)};
    auto psi = normalize_wavefunction(WaveFunction(g, v));
    for (int s = 0; s < 20; ++s) psi = cn.step(psi);
    EXPECT_NEAR(wavefunction_norm(psi), 1.0, 1e-12);
  }
}

TEST(CrankNicolson, StationaryGroundState) {
  const Grid g = make_grid(-20, 20, 4096);
  const auto psi = catalog::initial_wavefunction(catalog::HoGround{}, kDefault, g);
  const auto next = crank_nicolson_step(psi, Potential::harmonic(g, kDefault), 1e-3, kDefault);
  EXPECT_LT(sup_density_diff(psi, next), 1e-8);
}

TEST(CrankNicolson, SecondOrderInTime) {
  // Local error of one step against many fine steps; halving dt divides it by about 8.
  const Grid g = make_grid(-20, 20, 1024);
  const auto psi = catalog::gaussian_wavepacket(1.0, 0.0, 1.0, kDefault, g);
  const Potential v = Potential::zero(g);
  auto local_error = [&](double dt) {
    const auto coarse = crank_nicolson_step(psi, v, dt, kDefault);
    const CrankNicolson fine(v, dt / 64, kDefault);
    auto ref = psi;
    for (int s = 0; s < 64; ++s) ref = fine.step(ref);
    return sup_diff(coarse, ref);
  };
  const double ratio = local_error(0.2) / local_error(0.1);
  EXPECT_GT(ratio, 7.0);
  EXPECT_LT(ratio, 9.0);
}

TEST(CrankNicolson, RejectsBadInput) {
  const std::array<std::array<double, 2>, 2> b{{{-1, 1}, {-1, 1}}};
  const std::array<std::size_t, 2> n{16, 16};
  const Grid g2 = make_grid(2, b, n);
  EXPECT_THROW(CrankNicolson(Potential::zero(g2), 1e-3, kDefault), InvalidArgument);
  const Grid g = make_grid(-1, 1, 16);
  EXPECT_THROW(CrankNicolson(Potential::zero(g), 0.0, kDefault), InvalidArgument);
  const CrankNicolson cn(Potential::zero(g), 1e-3, kDefault);
  EXPECT_THROW(cn.step(WaveFunction(make_grid(-1, 1, 17), std::vector<std::complex<double>>(17))), InvalidArgument);
}

TEST(Evolve, FreePacketFisher) {
  const Grid g = make_grid(-20, 20, 4096);
  const auto psi = catalog::gaussian_wavepacket(1.0, 0.0, 0.0, kDefault, g);
  const auto traj = evolve(psi, Potential::zero(g), 1e-3, 1000, 100, kDefault);
  EXPECT_EQ(traj.count(), 11u);
  EXPECT_NEAR(traj.time(10), 1.0, 1e-12);
  const double f = fisher_information(traj.density(10)).value;
  EXPECT_LE(std::abs(f - 0.8) / 0.8, 1e-4);
}

TEST(Evolve, GroundStateFisherStationaryOrder4) {
  const Grid g = make_grid(-20, 20, 4096);
  const auto psi = catalog::initial_wavefunction(catalog::HoGround{}, kDefault, g);
  const auto traj = evolve(psi, Potential::harmonic(g, kDefault), 1e-3, 1000, 100, kDefault, StencilScheme{4});
  for (std::size_t k = 0; k < traj.count(); ++k) {
    EXPECT_NEAR(fisher_information(traj.density(k)).value, 2.0, 1e-6) << "t = " << traj.time(k);
  }
}

TEST(Evolve, GroundStateFisherStationaryOrder2) {
  // The second-order kinetic stencil holds F only to O(h^2).
  const Grid g = make_grid(-20, 20, 4096);
  const auto psi = catalog::initial_wavefunction(catalog::HoGround{}, kDefault, g);
  const auto traj = evolve(psi, Potential::harmonic(g, kDefault), 1e-3, 1000, 500, kDefault);
  EXPECT_NEAR(fisher_information(traj.density(2)).value, 2.0, 1e-4);
}

TEST(Evolve, CoherentStateCentre) {
  const Grid g = make_grid(-15, 15, 2048);
  const auto psi = catalog::initial_wavefunction(catalog::HoCoherent{1.0}, kDefault, g);
  const auto traj = evolve(psi, Potential::harmonic(g, kDefault), 1e-3, 3142, 1571, kDefault, StencilScheme{4});
  const auto p = traj.density(2);
  std::vector<double> xp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) xp[i] = g.coords(i)[0] * p[i];
  EXPECT_NEAR(integrate(g, xp), std::cos(3.142), 1e-4);
}

TEST(Evolve, MinimalTrajectory) {
  const Grid g = make_grid(-10, 10, 128);
  const auto psi = catalog::gaussian_wavepacket(1.0, 0.0, 0.0, kDefault, g);
  const auto traj = evolve(psi, Potential::zero(g), 1e-3, 6, 3, kDefault);
  ASSERT_EQ(traj.count(), 3u);
  EXPECT_NEAR(traj.time(0), 0.0, 0);
  EXPECT_NEAR(traj.time(1), 3e-3, 1e-15);
  EXPECT_NEAR(traj.time(2), 6e-3, 1e-15);
  EXPECT_EQ(traj.centre_index(100.0), 1u);
  EXPECT_NO_THROW(traj.density_window(1));
  EXPECT_THROW(traj.density_window(2), InvalidArgument);
}

TEST(Evolve, Errors) {
  const Grid g = make_grid(-10, 10, 128);
  const auto psi = catalog::gaussian_wavepacket(1.0, 0.0, 0.0, kDefault, g);
  EXPECT_THROW(evolve(psi, Potential::zero(g), 1e-3, 3, 2, kDefault), InvalidArgument);
  EXPECT_THROW(evolve(psi, Potential::zero(g), 1e-3, 3, 0, kDefault), InvalidArgument);
  std::vector<std::complex<double>> v(psi.values().begin(), psi.values().end());
  for (auto& z : v) z *= 2.0;
  EXPECT_THROW(evolve(WaveFunction(g, v), Potential::zero(g), 1e-3, 4, 1, kDefault), NumericalError);
}

TEST(Analytic, FreeGaussian) {
  const Grid g = make_grid(-30, 30, 6001);
  const auto p0 = catalog::analytic_free_gaussian(1, 0.5, 0, 0, kDefault, g);
  const auto ref = catalog::gaussian_density(1, 0.5, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(p0[i], ref[i], 1e-15);
  EXPECT_DOUBLE_EQ(catalog::free_variance(1, 1, kDefault), 1.25);
  const auto p = catalog::analytic_free_gaussian(1, 0, 1, 2, kDefault, g);
  std::vector<double> xp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) xp[i] = g.coords(i)[0] * p[i];
  EXPECT_NEAR(integrate(g, xp), 2.0, 1e-10);
}

TEST(Analytic, HoDensities) {
  const Grid g = make_grid(-20, 20, 4096);
  EXPECT_DOUBLE_EQ(catalog::ho_variance(kDefault), 0.5);
  EXPECT_NEAR(fisher_information(catalog::analytic_ho_density(catalog::HoKind::ground(), 0, kDefault, g)).value, 2.0, 2e-6);
  const auto p = catalog::analytic_ho_density(catalog::HoKind::displaced(1.0), std::numbers::pi, kDefault, g);
  std::vector<double> xp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) xp[i] = g.coords(i)[0] * p[i];
  EXPECT_NEAR(integrate(g, xp), -1.0, 1e-10);
  for (double t : {0.0, 0.3, 1.1, 2.5}) {
    const auto q = catalog::analytic_ho_density(catalog::HoKind::displaced(1.0), t, kDefault, g);
    EXPECT_NEAR(fisher_information(q).value, 2.0, 2e-6);
  }
}
