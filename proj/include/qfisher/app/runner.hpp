#pragma once

#include <array>
#include <chrono>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "qfisher/app/config.hpp"
#include "qfisher/catalog.hpp"
#include "qfisher/convergence.hpp"
#include "qfisher/density.hpp"
#include "qfisher/evolution.hpp"
#include "qfisher/identity.hpp"
#include "qfisher/quantities.hpp"

namespace qfisher::app {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { analyze, evolve };

inline std::string to_string(Mode m) { return m == Mode::evolve ? "evolve" : "analyze"; }

/// Scalar summaries of the analysed density.
struct QuantityTable {
  double time = 0.0;
  double fisher = 0.0;
  double fisher_excluded_mass = 0.0;
  std::optional<double> fisher_analytic;
  double mean_quantum_potential = 0.0;
  double mean_total_energy = 0.0;
  double boundary_ratio = 0.0;
};

struct TrajectorySummary {
  double dt_snap = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> fisher;
  std::size_t check_index = 0;
};

struct RunReport {
  ScenarioConfig scenario;
  Mode mode = Mode::analyze;
  std::vector<IdentityReport> checks;
  QuantityTable quantities;
  std::optional<TrajectorySummary> trajectory;
  std::vector<ConvergenceTable> convergence;
  std::vector<std::string> warnings;
  std::string timestamp;
  std::optional<DensityField> density;  ///< the analysed density; not serialized
};

/// Densities the checks run on, plus the frame spacing for time derivatives.
struct Frames {
  std::array<DensityField, 3> densities;
  double dt;
  double time;
};

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class Fn>
auto with_context(const ScenarioConfig& cfg, const std::string& step, Fn&& fn) -> decltype(fn()) {
  const std::string where = "scenario '" + cfg.scenario_id + "', " + step + ": ";
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  } catch (const IoError& e) {
    throw IoError(where + e.what());
  }
}

inline bool wants_frames(const ScenarioConfig& cfg) {
  for (RelationId r : cfg.checks) {
    if (needs_frames(r)) return true;
  }
  return false;
}

inline Frames analytic_frames(const ScenarioConfig& cfg) {
  const auto rule = cfg.numerics.quadrature;
  if (!wants_frames(cfg)) {
    auto p = catalog::density_at(cfg.density, cfg.time, cfg.constants, cfg.grid, rule);
    return {{p, p, p}, kStaticFrameDt, cfg.time};
  }
  if (catalog::has_static_frames(cfg.density)) {
    const double dt = cfg.evolution ? cfg.evolution->snapshot_spacing() : kStaticFrameDt;
    auto p = catalog::density_at(cfg.density, cfg.time, cfg.constants, cfg.grid, rule);
    return {{p, p, p}, dt, cfg.time};
  }
  const double dt = cfg.evolution->snapshot_spacing();
  return {catalog::analytic_frames(cfg.density, cfg.time, dt, cfg.constants, cfg.grid, rule), dt, cfg.time};
}

inline QuantityTable quantities_for(const ScenarioConfig& cfg, const DensityField& p, double t) {
  QuantityTable q;
  q.time = t;
  const auto f = fisher_information(p, cfg.numerics);
  q.fisher = f.value;
  q.fisher_excluded_mass = f.excluded_mass;
  q.fisher_analytic = catalog::analytic_fisher(cfg.density, t, cfg.constants, cfg.grid.dim());
  q.mean_quantum_potential = mean_quantum_potential(p, quantum_potential_reversed(p, cfg.constants, cfg.numerics).field);
  q.mean_total_energy = expectation(p, total_energy_density(p, cfg.constants, cfg.numerics).field);
  q.boundary_ratio = boundary_ratio(p);
  return q;
}

inline void run_checks(const ScenarioConfig& cfg, const Frames& frames, RunReport& out) {
  for (RelationId r : cfg.checks) {
    auto rep = with_context(cfg, "check " + wire_name(r), [&] {
      return evaluate_relation(r, frames.densities, frames.dt, cfg.constants, cfg.gauge, cfg.numerics);
    });
    rep.context.time = frames.time;
    if (!needs_frames(r)) rep.context.dt.reset();
    out.checks.push_back(std::move(rep));
  }
}

inline void boundary_warning(const QuantityTable& q, RunReport& out) {
  if (q.boundary_ratio > kBoundaryWarnRel) {
    out.warnings.push_back("density reaches " + std::to_string(q.boundary_ratio) +
                           " of its peak on the grid boundary (threshold 1e-10); integrals assume it vanishes there");
  }
}

}  // namespace detail

/// Builds the density (or trajectory), runs the requested checks and assembles the report.
inline RunReport run_scenario(const ScenarioConfig& cfg, Mode mode = Mode::analyze) {
  RunReport out;
  out.scenario = cfg;
  out.mode = mode;
  out.timestamp = detail::utc_timestamp();
  Frames frames = [&]() -> Frames {
    if (mode == Mode::analyze) {
      return detail::with_context(cfg, "density", [&] { return detail::analytic_frames(cfg); });
    }
    if (!cfg.evolution) throw ConfigError("scenario '" + cfg.scenario_id + "': evolve needs an 'evolution' block");
    const auto& e = *cfg.evolution;
    const Trajectory traj = detail::with_context(cfg, "evolution", [&] {
      const auto psi0 = catalog::initial_wavefunction(cfg.density, cfg.constants, cfg.grid);
      const Potential v = e.potential ? (*e.potential == "harmonic" ? Potential::harmonic(cfg.grid, cfg.constants)
                                                                    : Potential::zero(cfg.grid))
                                      : catalog::natural_potential(cfg.density, cfg.constants, cfg.grid);
      return evolve(psi0, v, e.dt, e.steps, e.snap_stride, cfg.constants, e.scheme);
    });
    TrajectorySummary s;
    s.dt_snap = traj.dt_snap;
    for (std::size_t k = 0; k < traj.count(); ++k) {
      s.times.push_back(traj.time(k));
      s.norms.push_back(wavefunction_norm(traj.frames[k], cfg.numerics.quadrature));
      s.fisher.push_back(fisher_information(traj.density(k, cfg.numerics.quadrature), cfg.numerics).value);
    }
    s.check_index = e.check_time ? traj.centre_index(*e.check_time) : traj.count() - 2;
    out.trajectory = s;
    return {traj.density_window(s.check_index, cfg.numerics.quadrature), traj.dt_snap, traj.time(s.check_index)};
  }();
  out.density = frames.densities[1];
  out.quantities = detail::with_context(cfg, "quantities",
                                        [&] { return detail::quantities_for(cfg, frames.densities[1], frames.time); });
  detail::boundary_warning(out.quantities, out);
  detail::run_checks(cfg, frames, out);
  return out;
}

/// Point counts n_j = (n_0 - 1) 2^j + 1, j = 0..refinements, so the spacing halves each time.
inline std::vector<std::size_t> refinement_counts(std::size_t n0, std::size_t refinements) {
  std::vector<std::size_t> ns;
  std::size_t n = n0;
  for (std::size_t j = 0; j <= refinements; ++j) {
    ns.push_back(n);
    n = 2 * (n - 1) + 1;
  }
  return ns;
}

/// Runs every configured check at successively halved grid spacings (analyze mode) and fits the order.
inline RunReport run_convergence(const ScenarioConfig& cfg, std::size_t refinements) {
  if (refinements + 1 < 3) throw ConfigError("convergence needs --refinements >= 2 (at least 3 resolutions)");
  if (cfg.checks.empty()) throw ConfigError("convergence needs at least one entry in 'checks'");
  RunReport out;
  out.scenario = cfg;
  out.mode = Mode::analyze;
  out.timestamp = detail::utc_timestamp();
  std::vector<std::vector<std::size_t>> ns(cfg.grid.dim());
  for (std::size_t d = 0; d < cfg.grid.dim(); ++d) ns[d] = refinement_counts(cfg.grid.n(d), refinements);
  for (RelationId r : cfg.checks) out.convergence.push_back(ConvergenceTable{r, {}});
  for (std::size_t j = 0; j <= refinements; ++j) {
    ScenarioConfig level = cfg;
    std::array<Axis, Grid::kMaxDim> axes{};
    for (std::size_t d = 0; d < cfg.grid.dim(); ++d) axes[d] = Axis{cfg.grid.axis(d).lo, cfg.grid.axis(d).hi, ns[d][j]};
    level.grid = Grid(cfg.grid.dim(), axes);
    const RunReport rep = run_scenario(level, Mode::analyze);
    if (j == 0) {
      out.quantities = rep.quantities;
      out.warnings = rep.warnings;
    }
    for (std::size_t c = 0; c < rep.checks.size(); ++c) {
      out.convergence[c].rows.push_back({ns[0][j], level.grid.spacing(0), rep.checks[c].residual_sup});
    }
    if (j == refinements) out.checks = rep.checks;
  }
  for (auto& t : out.convergence) t.fitted_order = fit_order(t.rows);
  return out;
}

}  // namespace qfisher::app
