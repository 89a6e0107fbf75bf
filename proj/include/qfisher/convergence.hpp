#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qfisher/catalog.hpp"
#include "qfisher/constants.hpp"
#include "qfisher/error.hpp"
#include "qfisher/grid.hpp"
#include "qfisher/identity.hpp"
#include "qfisher/numerics.hpp"

namespace qfisher {

struct ConvergenceRow {
  std::size_t n = 0;  ///< points per axis (0 for time refinement)
  double step = 0.0;  ///< h, or dt for time refinement
  double residual = 0.0;
};

struct ConvergenceTable {
  RelationId relation;
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(residual) against log(step); NaN when a residual is zero or non-finite.
  double fitted_order = std::numeric_limits<double>::quiet_NaN();

  bool monotone_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].residual < rows[i - 1].residual)) return false;
    }
    return true;
  }
};

inline double fit_order(std::span<const ConvergenceRow> rows) {
  if (rows.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    if (!(r.residual > 0.0 && std::isfinite(r.residual))) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(r.step);
    const double y = std::log(r.residual);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(rows.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Fixed inputs of a refinement study.
struct StudySetup {
  PhysicalConstants constants{};
  Numerics numerics{};
  Gauge gauge = Gauge::zero_c;
  std::size_t dim = 1;
  std::array<double, 2> bounds{-20.0, 20.0};
  double time = 0.0;
  /// Frame spacing for time-derivative relations.
  double dt = 1e-3;
};

inline Grid study_grid(const StudySetup& s, std::size_t n) {
  std::array<std::array<double, 2>, 3> b{s.bounds, s.bounds, s.bounds};
  std::array<std::size_t, 3> ns{n, n, n};
  return make_grid(s.dim, std::span(b.data(), s.dim), std::span(ns.data(), s.dim));
}

/// Residual of `relation` on the analytic density `spec`, one row per point count in `ns`.
inline ConvergenceTable convergence_study(RelationId relation, const catalog::DensitySpec& spec,
                                          std::span<const std::size_t> ns, const StudySetup& setup = {}) {
  if (ns.size() < 3) throw InvalidArgument("convergence_study needs at least 3 resolutions");
  ConvergenceTable t{relation, {}};
  for (std::size_t n : ns) {
    const Grid g = study_grid(setup, n);
    const auto frames =
        catalog::analytic_frames(spec, setup.time, setup.dt, setup.constants, g, setup.numerics.quadrature);
    const auto rep = evaluate_relation(relation, frames, setup.dt, setup.constants, setup.gauge, setup.numerics);
    t.rows.push_back({n, g.spacing(0), rep.residual_sup});
  }
  t.fitted_order = fit_order(t.rows);
  return t;
}

/// Same as convergence_study, refining the frame spacing dt on a fixed grid.
inline ConvergenceTable convergence_study_dt(RelationId relation, const catalog::DensitySpec& spec, std::size_t n,
                                             std::span<const double> dts, const StudySetup& setup = {}) {
  if (dts.size() < 3) throw InvalidArgument("convergence_study needs at least 3 resolutions");
  const Grid g = study_grid(setup, n);
  ConvergenceTable t{relation, {}};
  for (double dt : dts) {
    const auto frames = catalog::analytic_frames(spec, setup.time, dt, setup.constants, g, setup.numerics.quadrature);
    const auto rep = evaluate_relation(relation, frames, dt, setup.constants, setup.gauge, setup.numerics);
    t.rows.push_back({0, dt, rep.residual_sup});
  }
  t.fitted_order = fit_order(t.rows);
  return t;
}

}  // namespace qfisher
