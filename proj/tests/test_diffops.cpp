#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qfisher/catalog.hpp"
#include "qfisher/diffops.hpp"

using namespace qfisher;

namespace {

double max_interior_error(const Grid& g, std::span<const double> got, auto&& exact, std::size_t skip = 1) {
  double e = 0.0;
  for (std::size_t i = skip; i + skip < g.size(); ++i) e = std::max(e, std::abs(got[i] - exact(g.coords(i)[0])));
  return e;
}

double max_error(const Grid& g, std::span<const double> got, auto&& exact) { return max_interior_error(g, got, exact, 0); }

}  // namespace

TEST(Gradient, QuadraticExactOrder2) {
  const Grid g = make_grid(-2, 3, 41);
  const auto f = ScalarField::sample(g, [](const auto& x) { return x[0] * x[0]; });
  const auto d = gradient(f);
  EXPECT_LT(max_error(g, d.component(0), [](double x) { return 2 * x; }), 1e-12);
}

TEST(Gradient, ConstantIsZero) {
  const Grid g = make_grid(-1, 1, 16);
  for (int order : {2, 4}) {
    const auto d = gradient(ScalarField::constant(g, 4.2), StencilScheme{order});
    for (double v : d.component(0)) EXPECT_NEAR(v, 0.0, 1e-12);
  }
}

TEST(Gradient, SineBound) {
  const Grid g = make_grid(0, 6, 601);
  const double h = g.spacing(0);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(x[0]); });
  const auto d = gradient(f);
  EXPECT_LE(max_interior_error(g, d.component(0), [](double x) { return std::cos(x); }), h * h / 6);
}

TEST(Gradient, PolynomialExactnessRandom) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> c(-2, 2);
  const Grid g = make_grid(-1.3, 2.1, 23);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 5> a{};
    for (auto& x : a) x = c(rng);
    for (int order : {2, 4}) {
      const int deg = order;  // one-sided edge rows are exact up to this degree
      auto poly = [&](double x) {
        double s = 0;
        for (int p = deg; p >= 0; --p) s = s * x + a[p];
        return s;
      };
      auto dpoly = [&](double x) {
        double s = 0;
        for (int p = deg; p >= 1; --p) s = s * x + p * a[p];
        return s;
      };
      auto d2poly = [&](double x) {
        double s = 0;
        for (int p = deg; p >= 2; --p) s = s * x + p * (p - 1) * a[p];
        return s;
      };
      const auto f = ScalarField::sample(g, [&](const auto& x) { return poly(x[0]); });
      const auto d1 = gradient(f, StencilScheme{order});
      const auto d2 = laplacian(f, StencilScheme{order});
      EXPECT_LT(max_error(g, d1.component(0), dpoly), 1e-10) << "order " << order;
      EXPECT_LT(max_error(g, d2.values(), d2poly), 1e-8) << "order " << order;
    }
  }
}

TEST(Gradient, ObservedOrder) {
  // Error ratio under halving h on a smooth non-polynomial function.
  auto err = [](std::size_t n, int order, int deriv, bool edges) {
    const Grid g = make_grid(0, 3, n);
    const auto f = ScalarField::sample(g, [](const auto& x) { return std::exp(std::sin(x[0])); });
    auto d1 = [](double x) { return std::cos(x) * std::exp(std::sin(x)); };
    auto d2 = [](double x) {
      return (std::cos(x) * std::cos(x) - std::sin(x)) * std::exp(std::sin(x));
    };
    const std::size_t skip = edges ? 0 : static_cast<std::size_t>(order / 2);
    if (deriv == 1) {
      const auto d = gradient(f, StencilScheme{order});
      return max_interior_error(g, d.component(0), d1, skip);
    }
    const auto d = laplacian(f, StencilScheme{order});
    return max_interior_error(g, d.values(), d2, skip);
  };
  for (int deriv : {1, 2}) {
    for (bool edges : {false, true}) {
      const double r2 = err(401, 2, deriv, edges) / err(801, 2, deriv, edges);
      EXPECT_GT(r2, 3.5);
      EXPECT_LT(r2, 4.5);
    }
    const double r4 = err(101, 4, deriv, false) / err(201, 4, deriv, false);
    EXPECT_GT(r4, 14.0);
    EXPECT_LT(r4, 18.0);
    // One-sided fourth-order rows approach the asymptotic ratio from above.
    EXPECT_GT(err(101, 4, deriv, true) / err(201, 4, deriv, true), 14.0);
  }
}

TEST(Gradient, Linearity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(-3, 3);
  const Grid g = make_grid(-2, 2, 64);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(3 * x[0]); });
  const auto h = ScalarField::sample(g, [](const auto& x) { return std::exp(-x[0] * x[0]); });
  for (int trial = 0; trial < 10; ++trial) {
    const double a = c(rng), b = c(rng);
    std::vector<double> mix(g.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * f[i] + b * h[i];
    const auto dm = laplacian(ScalarField(g, mix));
    const auto df = laplacian(f);
    const auto dh = laplacian(h);
    for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_NEAR(dm[i], a * df[i] + b * dh[i], 1e-9);
  }
}

TEST(Laplacian, QuadraticExact) {
  const Grid g = make_grid(-2, 3, 41);
  const auto f = ScalarField::sample(g, [](const auto& x) { return x[0] * x[0]; });
  const auto lap = laplacian(f);
  for (double v : lap.values()) EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(Laplacian, GaussianPeak) {
  const Grid g = make_grid(-20, 20, 4097);
  const auto p = catalog::gaussian_density(1.0, 0.0, g);
  EXPECT_NEAR(laplacian(p.field())[2048], -1 / std::sqrt(2 * std::numbers::pi), 1e-4);
}

TEST(Laplacian, TwoDimensionalSumOfAxes) {
  const std::array<std::array<double, 2>, 2> b{{{-1, 1}, {-2, 2}}};
  const std::array<std::size_t, 2> n{17, 33};
  const Grid g = make_grid(2, b, n);
  const auto f = ScalarField::sample(g, [](const auto& x) { return 3 * x[0] * x[0] - x[1] * x[1] + x[0] * x[1]; });
  const auto lap = laplacian(f);
  for (double v : lap.values()) EXPECT_NEAR(v, 4.0, 1e-9);
  const auto d = gradient(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coords(i);
    EXPECT_NEAR(d.component(0)[i], 6 * x[0] + x[1], 1e-9);
    EXPECT_NEAR(d.component(1)[i], -2 * x[1] + x[0], 1e-9);
  }
}

TEST(Score, GaussianValues) {
  const Grid g = make_grid(-20, 20, 4096);
  for (double sigma : {1.0, 2.0}) {
    const auto s = log_density_score(catalog::gaussian_density(sigma, 0.0, g));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!s.support.contains(i)) continue;
      worst = std::max(worst, std::abs(s.field.component(0)[i] + g.coords(i)[0] / (sigma * sigma)));
    }
    EXPECT_LT(worst, 1e-6) << sigma;
  }
  const Grid h = make_grid(-20, 20, 4001);  // x = 1 lies on this grid
  const auto s = log_density_score(catalog::gaussian_density(1.0, 0.0, h));
  EXPECT_NEAR(s.field.component(0)[2100], -1.0, 1e-6);
  const auto s2 = log_density_score(catalog::gaussian_density(2.0, 0.0, h));
  EXPECT_NEAR(s2.field.component(0)[2100], -0.25, 1e-6);
}

TEST(Score, ConstantDensity) {
  const Grid g = make_grid(0, 1, 32);
  const auto s = log_density_score(normalize_density(ScalarField::constant(g, 1.0)));
  EXPECT_EQ(s.support.count(), g.size());
  for (double v : s.field.component(0)) EXPECT_EQ(v, 0.0);
}

TEST(Score, MaskAndExcludedMass) {
  const Grid g = make_grid(-20, 20, 4096);
  const auto p = catalog::gaussian_density(1.0, 0.0, g);
  const auto s = log_density_score(p, 1e-3);
  EXPECT_LT(s.support.count(), g.size());
  EXPECT_GT(s.support.excluded_mass, 0.0);
  EXPECT_LT(s.support.excluded_mass, 1e-2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!s.support.contains(i)) {
      EXPECT_EQ(s.field.component(0)[i], 0.0);
    }
  }
}

TEST(Score, FloorRange) {
  const Grid g = make_grid(-5, 5, 64);
  const auto p = catalog::gaussian_density(1.0, 0.0, g);
  EXPECT_THROW(log_density_score(p, 0.0), InvalidArgument);
  EXPECT_THROW(log_density_score(p, 0.5), InvalidArgument);
  EXPECT_THROW(log_density_score(p, -1e-6), InvalidArgument);
  EXPECT_NO_THROW(log_density_score(p, 1e-3));
}

TEST(Score, CompactSupportFallsBackToQuotient) {
  // P vanishes outside |x| < 1; the score is finite everywhere on the mask.
  const Grid g = make_grid(-2, 2, 201);
  const auto p = normalize_density(ScalarField::sample(g, [](const auto& x) {
    return std::abs(x[0]) < 1 ? (1 - x[0] * x[0]) * (1 - x[0] * x[0]) : 0.0;
  }));
  const auto s = log_density_score(p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_TRUE(std::isfinite(s.field.component(0)[i]));
    if (p[i] == 0.0) {
      EXPECT_FALSE(s.support.contains(i));
    }
  }
  // Interior point away from the edge of the support: d/dx log(1-x^2)^2 = -4x/(1-x^2).
  const std::size_t i = 125;  // x = 0.5
  EXPECT_NEAR(s.field.component(0)[i], -4 * 0.5 / 0.75, 5e-3);
}

TEST(TimeDerivative, LinearExact) {
  const Grid g = make_grid(-1, 1, 16);
  auto frame = [&](double t) { return ScalarField::sample(g, [&](const auto& x) { return t * std::cos(x[0]); }); };
  const auto d = time_derivative(frame(0.9), frame(1.0), frame(1.1), 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(d[i], std::cos(g.coords(i)[0]), 1e-13);
}

TEST(TimeDerivative, ConstantIsZero) {
  const Grid g = make_grid(-1, 1, 16);
  const auto f = ScalarField::constant(g, 2.0);
  const auto d = time_derivative(f, f, f, 1e-3);
  for (double v : d.values()) EXPECT_EQ(v, 0.0);
}

TEST(TimeDerivative, Cosine) {
  const Grid g = make_grid(-1, 1, 16);
  const double dt = 1e-3, t = 0.5;
  auto frame = [&](double s) { return ScalarField::sample(g, [&](const auto& x) { return std::cos(s) * (1 + x[0] * x[0]); }); };
  const auto d = time_derivative(frame(t - dt), frame(t), frame(t + dt), dt);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coords(i)[0];
    EXPECT_NEAR(d[i], -std::sin(t) * (1 + x * x), 1e-7 * 2);
  }
}

TEST(TimeDerivative, Errors) {
  const auto a = ScalarField::constant(make_grid(-1, 1, 16), 1.0);
  const auto b = ScalarField::constant(make_grid(-1, 1, 17), 1.0);
  EXPECT_THROW(time_derivative(a, a, b, 1e-3), InvalidArgument);
  EXPECT_THROW(time_derivative(a, a, a, 0.0), InvalidArgument);
}
