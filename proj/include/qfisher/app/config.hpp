#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfisher/catalog.hpp"
#include "qfisher/constants.hpp"
#include "qfisher/error.hpp"
#include "qfisher/grid.hpp"
#include "qfisher/identity.hpp"
#include "qfisher/numerics.hpp"
#include "qfisher/quantities.hpp"

namespace qfisher::app {

using Json = nlohmann::ordered_json;

struct EvolutionConfig {
  double dt = 1e-3;
  std::size_t steps = 0;
  std::size_t snap_stride = 1;
  StencilScheme scheme{};
  std::optional<std::string> potential;  ///< "free" or "harmonic"; default follows the density kind
  std::optional<double> check_time;      ///< default: last interior snapshot

  double snapshot_spacing() const { return dt * static_cast<double>(snap_stride); }
};

struct ScenarioConfig {
  std::string scenario_id = "scenario";
  PhysicalConstants constants{};
  Grid grid{};
  catalog::DensitySpec density = catalog::Gaussian{};
  double time = 0.0;
  std::optional<EvolutionConfig> evolution;
  std::vector<RelationId> checks;
  Numerics numerics{};
  Gauge gauge = Gauge::zero_c;
};

/// Frame spacing used for time-derivative relations when there is no evolution block.
inline constexpr double kStaticFrameDt = 1e-3;

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

inline double number(const Json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

inline std::size_t count(const Json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("'" + what + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

inline std::string text(const Json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

inline Grid parse_grid(const Json& j) {
  reject_unknown(j, "grid", {"dim", "bounds", "n"});
  if (!j.contains("bounds") || !j.contains("n")) throw ConfigError("'grid' needs 'bounds' and 'n'");
  const std::size_t dim = j.contains("dim") ? count(j.at("dim"), "grid.dim") : 1;
  std::vector<std::array<double, 2>> bounds;
  const auto& b = j.at("bounds");
  auto pair = [](const Json& p) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError("'grid.bounds' entries must be [lo, hi] pairs");
    }
    return std::array<double, 2>{p[0].get<double>(), p[1].get<double>()};
  };
  if (b.is_array() && b.size() == 2 && b[0].is_number()) {
    for (std::size_t d = 0; d < dim; ++d) bounds.push_back(pair(b));
  } else if (b.is_array()) {
    for (const auto& p : b) bounds.push_back(pair(p));
  } else {
    throw ConfigError("'grid.bounds' must be [lo, hi] or a list of pairs");
  }
  std::vector<std::size_t> ns;
  const auto& n = j.at("n");
  if (n.is_array()) {
    for (const auto& v : n) ns.push_back(count(v, "grid.n"));
  } else {
    ns.assign(dim, count(n, "grid.n"));
  }
  try {
    return make_grid(dim, bounds, ns);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

inline std::vector<double> read_density_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read density file '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    double v;
    while (ls >> v) values.push_back(v);
    if (!ls.eof()) throw ConfigError("density file '" + path.string() + "' has a non-numeric entry");
  }
  return values;
}

inline std::pair<catalog::DensitySpec, double> parse_density(const Json& j, const std::filesystem::path& base) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("'density' needs a 'kind'");
  const std::string kind = text(j, "kind", "density");
  const double t = number(j, "t", 0.0, "density");
  if (kind == "gaussian") {
    reject_unknown(j, "density", {"kind", "t", "sigma", "x0"});
    return {catalog::Gaussian{number(j, "sigma", 1.0, "density"), number(j, "x0", 0.0, "density")}, t};
  }
  if (kind == "ho_ground") {
    reject_unknown(j, "density", {"kind", "t"});
    return {catalog::HoGround{}, t};
  }
  if (kind == "ho_coherent") {
    reject_unknown(j, "density", {"kind", "t", "x0"});
    return {catalog::HoCoherent{number(j, "x0", 1.0, "density")}, t};
  }
  if (kind == "free_packet") {
    reject_unknown(j, "density", {"kind", "t", "sigma0", "x0", "p0"});
    return {catalog::FreePacket{number(j, "sigma0", 1.0, "density"), number(j, "x0", 0.0, "density"),
                                number(j, "p0", 0.0, "density")},
            t};
  }
  if (kind == "bimodal") {
    reject_unknown(j, "density", {"kind", "t", "sigma", "separation"});
    return {catalog::Bimodal{number(j, "sigma", 1.0, "density"), number(j, "separation", 3.0, "density")}, t};
  }
  if (kind == "from_file") {
    reject_unknown(j, "density", {"kind", "t", "path"});
    if (!j.contains("path")) throw ConfigError("'density.path' is required for kind from_file");
    std::filesystem::path p = text(j, "path", "density");
    if (p.is_relative()) p = base / p;
    return {catalog::Sampled{p.string(), read_density_file(p)}, t};
  }
  throw ConfigError("unknown density kind '" + kind + "'");
}

inline Gauge parse_gauge(const std::string& s) {
  if (s == "zero_c") return Gauge::zero_c;
  if (s == "min_zero") return Gauge::min_zero;
  throw ConfigError("unknown gauge '" + s + "' (expected zero_c or min_zero)");
}

inline StencilScheme parse_order(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError("'" + where + "' must be 2 or 4");
  try {
    return StencilScheme(v.get<int>());
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace detail

/// Parses and validates a scenario. Relative density-file paths resolve against `base_dir`.
inline ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  detail::reject_unknown(j, "", {"scenario_id", "constants", "grid", "density", "evolution", "checks", "numerics"});
  ScenarioConfig cfg;
  if (j.contains("scenario_id")) cfg.scenario_id = detail::text(j, "scenario_id", "");

  if (j.contains("constants")) {
    const auto& c = j.at("constants");
    detail::reject_unknown(c, "constants", {"hbar", "mass", "omega", "kT"});
    std::optional<double> kT;
    if (c.contains("kT")) kT = detail::number(c, "kT", 1.0, "constants");
    try {
      cfg.constants = PhysicalConstants(detail::number(c, "hbar", 1.0, "constants"),
                                        detail::number(c, "mass", 1.0, "constants"),
                                        detail::number(c, "omega", 1.0, "constants"), kT);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  if (!j.contains("grid")) throw ConfigError("config needs a 'grid'");
  cfg.grid = detail::parse_grid(j.at("grid"));
  if (!j.contains("density")) throw ConfigError("config needs a 'density'");
  std::tie(cfg.density, cfg.time) = detail::parse_density(j.at("density"), base_dir);

  if (j.contains("numerics")) {
    const auto& n = j.at("numerics");
    detail::reject_unknown(n, "numerics", {"stencil_order", "floor_rel", "quadrature", "gauge"});
    if (n.contains("stencil_order")) cfg.numerics.scheme = detail::parse_order(n.at("stencil_order"), "numerics.stencil_order");
    cfg.numerics.floor_rel = detail::number(n, "floor_rel", cfg.numerics.floor_rel, "numerics");
    if (!(cfg.numerics.floor_rel > 0.0 && cfg.numerics.floor_rel <= 1e-3)) {
      throw ConfigError("'numerics.floor_rel' must lie in (0, 1e-3]");
    }
    if (n.contains("quadrature")) {
      const std::string q = detail::text(n, "quadrature", "numerics");
      if (q == "trapezoid") {
        cfg.numerics.quadrature = QuadratureRule::trapezoid;
      } else if (q == "simpson") {
        cfg.numerics.quadrature = QuadratureRule::simpson;
        for (std::size_t d = 0; d < cfg.grid.dim(); ++d) {
          if (cfg.grid.n(d) % 2 == 0) throw ConfigError("simpson quadrature needs an odd point count on every axis");
        }
      } else {
        throw ConfigError("unknown quadrature '" + q + "' (expected trapezoid or simpson)");
      }
    }
    if (n.contains("gauge")) cfg.gauge = detail::parse_gauge(detail::text(n, "gauge", "numerics"));
  }

  if (j.contains("evolution")) {
    const auto& e = j.at("evolution");
    detail::reject_unknown(e, "evolution", {"dt", "steps", "snap_stride", "stencil_order", "potential", "check_time"});
    EvolutionConfig evo;
    evo.dt = detail::number(e, "dt", evo.dt, "evolution");
    if (!(evo.dt > 0.0)) throw ConfigError("'evolution.dt' must be > 0");
    if (!e.contains("steps")) throw ConfigError("'evolution.steps' is required");
    evo.steps = detail::count(e.at("steps"), "evolution.steps");
    if (e.contains("snap_stride")) evo.snap_stride = detail::count(e.at("snap_stride"), "evolution.snap_stride");
    if (evo.snap_stride == 0) throw ConfigError("'evolution.snap_stride' must be >= 1");
    if (evo.steps < 2 * evo.snap_stride) throw ConfigError("'evolution.steps' must be at least 2 * snap_stride");
    if (e.contains("stencil_order")) evo.scheme = detail::parse_order(e.at("stencil_order"), "evolution.stencil_order");
    if (e.contains("potential")) {
      evo.potential = detail::text(e, "potential", "evolution");
      if (*evo.potential != "free" && *evo.potential != "harmonic") {
        throw ConfigError("'evolution.potential' must be free or harmonic");
      }
    }
    if (e.contains("check_time")) evo.check_time = detail::number(e, "check_time", 0.0, "evolution");
    if (cfg.grid.dim() != 1) throw ConfigError("evolution is only available on 1D grids");
    cfg.evolution = evo;
  }

  if (j.contains("checks")) {
    const auto& c = j.at("checks");
    if (!c.is_array()) throw ConfigError("'checks' must be a list of relation ids");
    std::set<std::string> seen;
    for (const auto& item : c) {
      if (!item.is_string()) throw ConfigError("'checks' entries must be strings");
      const std::string name = item.get<std::string>();
      const auto id = parse_relation(name);
      if (!id) throw ConfigError("unknown relation id '" + name + "' in 'checks'");
      if (!seen.insert(name).second) throw ConfigError("relation '" + name + "' is listed twice in 'checks'");
      cfg.checks.push_back(*id);
    }
  }
  for (RelationId r : cfg.checks) {
    if (needs_frames(r) && !cfg.evolution && !catalog::has_static_frames(cfg.density)) {
      throw ConfigError(wire_name(r) + " needs a time derivative: density kind '" + catalog::kind_name(cfg.density) +
                        "' is not stationary, so the config must include an 'evolution' block");
    }
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// The validated config with every default filled in.
inline Json to_json(const ScenarioConfig& c) {
  Json j;
  j["scenario_id"] = c.scenario_id;
  j["constants"] = {{"hbar", c.constants.hbar()},
                    {"mass", c.constants.mass()},
                    {"omega", c.constants.omega()},
                    {"kT", c.constants.kT()},
                    {"D", c.constants.D()},
                    {"alpha", c.constants.alpha()}};
  Json bounds = Json::array();
  Json ns = Json::array();
  for (std::size_t d = 0; d < c.grid.dim(); ++d) {
    bounds.push_back({c.grid.axis(d).lo, c.grid.axis(d).hi});
    ns.push_back(c.grid.n(d));
  }
  j["grid"] = {{"dim", c.grid.dim()}, {"bounds", bounds}, {"n", ns}};
  Json dens = std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, catalog::Gaussian>) return {{"sigma", v.sigma}, {"x0", v.x0}};
        if constexpr (std::is_same_v<T, catalog::HoGround>) return Json::object();
        if constexpr (std::is_same_v<T, catalog::HoCoherent>) return {{"x0", v.x0}};
        if constexpr (std::is_same_v<T, catalog::FreePacket>) return {{"sigma0", v.sigma0}, {"x0", v.x0}, {"p0", v.p0}};
        if constexpr (std::is_same_v<T, catalog::Bimodal>) return {{"sigma", v.sigma}, {"separation", v.separation}};
        if constexpr (std::is_same_v<T, catalog::Sampled>) return {{"path", v.path}};
        return Json::object();
      },
      c.density);
  Json density = {{"kind", catalog::kind_name(c.density)}, {"t", c.time}};
  for (auto& [k, v] : dens.items()) density[k] = v;
  j["density"] = density;
  if (c.evolution) {
    const auto& e = *c.evolution;
    j["evolution"] = {{"dt", e.dt}, {"steps", e.steps}, {"snap_stride", e.snap_stride}, {"stencil_order", e.scheme.order}};
    if (e.potential) j["evolution"]["potential"] = *e.potential;
    if (e.check_time) j["evolution"]["check_time"] = *e.check_time;
  }
  Json checks = Json::array();
  for (RelationId r : c.checks) checks.push_back(wire_name(r));
  j["checks"] = checks;
  j["numerics"] = {{"stencil_order", c.numerics.scheme.order},
                   {"floor_rel", c.numerics.floor_rel},
                   {"quadrature", to_string(c.numerics.quadrature)},
                   {"gauge", to_string(c.gauge)}};
  return j;
}

}  // namespace qfisher::app
