#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "json.hpp"
#include "qfisher/app/config.hpp"
#include "qfisher/app/runner.hpp"
#include "qfisher/catalog.hpp"
#include "qfisher/diffops.hpp"
#include "qfisher/error.hpp"
#include "qfisher/quantities.hpp"

namespace qfisher::app {

enum class Format { json, csv };

inline constexpr const char* kCsvHeader =
    "scenario_id,relation,lhs,rhs,residual_sup,residual_l2,excluded_mass,classification";

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Json to_json(const IdentityReport& r) {
  Json j;
  j["relation"] = wire_name(r.relation);
  j["classification"] = to_string(r.classification);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["residual_sup"] = r.residual_sup;
  j["residual_l2"] = r.residual_l2;
  j["relative_residual"] = r.relative_residual;
  j["excluded_mass"] = r.excluded_mass;
  if (r.fisher) j["fisher"] = *r.fisher;
  if (r.deviation) j["deviation"] = *r.deviation;
  Json meta;
  meta["grid"] = r.context.grid.describe();
  meta["time"] = r.context.time;
  if (r.context.dt) meta["dt"] = *r.context.dt;
  if (r.context.gauge) meta["gauge"] = to_string(*r.context.gauge);
  meta["stencil_order"] = r.context.numerics.scheme.order;
  meta["floor_rel"] = r.context.numerics.floor_rel;
  meta["quadrature"] = to_string(r.context.numerics.quadrature);
  meta["constants"] = {{"hbar", r.context.constants.hbar()},
                       {"mass", r.context.constants.mass()},
                       {"omega", r.context.constants.omega()},
                       {"kT", r.context.constants.kT()}};
  j["metadata"] = meta;
  return j;
}

inline Json to_json(const ConvergenceTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back({{"n", r.n}, {"h", r.step}, {"residual", r.residual}});
  Json j;
  j["relation"] = wire_name(t.relation);
  j["rows"] = rows;
  if (std::isfinite(t.fitted_order)) {
    j["fitted_order"] = t.fitted_order;
  } else {
    j["fitted_order"] = nullptr;
  }
  j["monotone_decreasing"] = t.monotone_decreasing();
  return j;
}

inline Json to_json(const RunReport& r) {
  Json j;
  j["scenario"] = to_json(r.scenario);
  j["mode"] = to_string(r.mode);
  Json q;
  q["time"] = r.quantities.time;
  q["fisher"] = r.quantities.fisher;
  q["fisher_excluded_mass"] = r.quantities.fisher_excluded_mass;
  if (r.quantities.fisher_analytic) q["fisher_analytic"] = *r.quantities.fisher_analytic;
  q["mean_quantum_potential"] = r.quantities.mean_quantum_potential;
  q["mean_total_energy"] = r.quantities.mean_total_energy;
  q["boundary_ratio"] = r.quantities.boundary_ratio;
  j["quantities"] = q;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  if (r.trajectory) {
    const auto& t = *r.trajectory;
    j["trajectory"] = {{"dt_snap", t.dt_snap},
                       {"check_index", t.check_index},
                       {"times", t.times},
                       {"norms", t.norms},
                       {"fisher", t.fisher}};
  }
  if (!r.convergence.empty()) {
    Json conv = Json::array();
    for (const auto& t : r.convergence) conv.push_back(to_json(t));
    j["convergence"] = conv;
  }
  j["warnings"] = r.warnings;
  j["provenance"] = {{"version", kVersion},
                     {"timestamp", r.timestamp},
                     {"grid", r.scenario.grid.describe()},
                     {"tolerances",
                      {{"normalization", kNormalizationTol},
                       {"negative_clamp_rel", kNegativeClampRel},
                       {"boundary_warn_rel", kBoundaryWarnRel},
                       {"boundary_error_rel", kBoundaryErrorRel},
                       {"trajectory_norm", kTrajectoryNormTol}}}};
  return j;
}

inline std::string render_csv(const RunReport& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& c : r.checks) {
    out += r.scenario.scenario_id + "," + wire_name(c.relation) + "," + format_double(c.lhs) + "," +
           format_double(c.rhs) + "," + format_double(c.residual_sup) + "," + format_double(c.residual_l2) + "," +
           format_double(c.excluded_mass) + "," + to_string(c.classification) + "\n";
  }
  return out;
}

inline std::string render_convergence_csv(const RunReport& r) {
  std::string out = "scenario_id,relation,n,h,residual,fitted_order\n";
  for (const auto& t : r.convergence) {
    for (const auto& row : t.rows) {
      out += r.scenario.scenario_id + "," + wire_name(t.relation) + "," + std::to_string(row.n) + "," +
             format_double(row.step) + "," + format_double(row.residual) + "," + format_double(t.fitted_order) + "\n";
    }
  }
  return out;
}

inline std::string render_report(const RunReport& r, Format f) {
  if (f == Format::json) return to_json(r).dump(2) + "\n";
  return r.convergence.empty() ? render_csv(r) : render_convergence_csv(r);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes the report to `path` (UTF-8, LF line endings).
inline void emit_report(const RunReport& r, Format f, const std::filesystem::path& path) {
  write_text(path, render_report(r, f));
}

/// CSV profile of the analysed density and the fields derived from it, one row per grid point.
inline std::string render_fields(const ScenarioConfig& cfg, const DensityField& p) {
  const auto& k = cfg.constants;
  const auto& num = cfg.numerics;
  const auto score = log_density_score(p, num.floor_rel, num.scheme);
  const auto u = osmotic_velocity(p, k, num);
  const auto dp = momentum_fluctuation(p, k, num);
  const auto qp = quantum_potential_reversed(p, k, num);
  const auto r = amplitude_from_density(p);
  const auto qs = quantum_potential_standard(r, k, num);
  const auto heat = heat_from_density(p, k, cfg.gauge, num);
  const auto e = total_energy_density(p, k, num);
  const Grid& g = p.grid();
  std::string out;
  for (std::size_t d = 0; d < g.dim(); ++d) out += "x" + std::to_string(d) + ",";
  out += "P,R";
  for (std::size_t d = 0; d < g.dim(); ++d) out += ",score" + std::to_string(d);
  for (std::size_t d = 0; d < g.dim(); ++d) out += ",u" + std::to_string(d);
  for (std::size_t d = 0; d < g.dim(); ++d) out += ",dp" + std::to_string(d);
  out += ",Q_rev,Q_standard,heat,E_tot,support\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coords(i);
    for (std::size_t d = 0; d < g.dim(); ++d) out += format_double(x[d]) + ",";
    out += format_double(p[i]) + "," + format_double(r[i]);
    for (std::size_t d = 0; d < g.dim(); ++d) out += "," + format_double(score.field.component(d)[i]);
    for (std::size_t d = 0; d < g.dim(); ++d) out += "," + format_double(u.field.component(d)[i]);
    for (std::size_t d = 0; d < g.dim(); ++d) out += "," + format_double(dp.field.component(d)[i]);
    out += "," + format_double(qp.field[i]) + "," + format_double(qs.field[i]) + "," + format_double(heat.heat()[i]) +
           "," + format_double(e.field[i]) + "," + (score.support.contains(i) ? "1" : "0") + "\n";
  }
  return out;
}

inline Json catalog_json(const PhysicalConstants& k) {
  Json arr = Json::array();
  for (const auto& e : catalog::entries(k)) {
    Json oracles = Json::array();
    for (const auto& o : e.oracles) oracles.push_back({{"quantity", o.quantity}, {"value", o.value}, {"basis", o.basis}});
    arr.push_back({{"kind", e.kind}, {"description", e.description}, {"oracles", oracles}});
  }
  return Json{{"constants", {{"hbar", k.hbar()}, {"mass", k.mass()}, {"omega", k.omega()}, {"kT", k.kT()}}},
              {"densities", arr}};
}

}  // namespace qfisher::app
