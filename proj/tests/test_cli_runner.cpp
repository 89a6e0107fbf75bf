#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qfisher/app/config.hpp"
#include "qfisher/app/report.hpp"
#include "qfisher/app/runner.hpp"

using namespace qfisher;
using namespace qfisher::app;

namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "density": {"kind": "gaussian", "sigma": 1, "x0": 0},
  "grid": {"dim": 1, "bounds": [-20, 20], "n": 4096},
  "checks": ["EQ_2_5"]
})";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("qfisher_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QFISHER_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(ParseConfig, DefaultsFilled) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.constants, PhysicalConstants{});
  EXPECT_EQ(cfg.numerics.scheme.order, 2);
  EXPECT_EQ(cfg.numerics.floor_rel, 1e-12);
  EXPECT_EQ(cfg.numerics.quadrature, QuadratureRule::trapezoid);
  EXPECT_EQ(cfg.gauge, Gauge::zero_c);
  EXPECT_EQ(cfg.grid.n(0), 4096u);
  ASSERT_EQ(cfg.checks.size(), 1u);
  EXPECT_EQ(cfg.checks[0], RelationId::MeanQuantumPotential);
  const auto echo = to_json(cfg);
  EXPECT_EQ(echo["numerics"]["gauge"], "zero_c");
  EXPECT_EQ(echo["constants"]["kT"], 1.0);
}

TEST(ParseConfig, OmegaOverrideEchoesAlpha) {
  const auto cfg = parse_config(R"({"constants": {"omega": 2}, "density": {"kind": "ho_ground"},
    "grid": {"bounds": [-10, 10], "n": 512}})");
  EXPECT_EQ(to_json(cfg)["constants"]["alpha"], 0.5);
  EXPECT_EQ(to_json(cfg)["constants"]["kT"], 2.0);
}

TEST(ParseConfig, UnknownKeysNamed) {
  try {
    parse_config(R"({"density": {"kind": "gaussian", "sigmaa": 1}, "grid": {"bounds": [-5, 5], "n": 64}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("density.sigmaa"), std::string::npos) << e.what();
  }
  try {
    parse_config(R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "extra": 1})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos);
  }
}

TEST(ParseConfig, FormalCheckNeedsEvolution) {
  try {
    parse_config(R"({"density": {"kind": "free_packet"}, "grid": {"bounds": [-20, 20], "n": 1024}, "checks": ["EQ_1_1"]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("evolution"), std::string::npos);
  }
  EXPECT_NO_THROW(parse_config(R"({"density": {"kind": "ho_ground"}, "grid": {"bounds": [-20, 20], "n": 1024}, "checks": ["EQ_1_1"]})"));
}

TEST(ParseConfig, Rejections) {
  const char* bad[] = {
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "checks": ["EQ_7_7"]})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "checks": ["EQ_2_5", "EQ_2_5"]})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [5, -5], "n": 64}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 4}})",
      R"({"density": {"kind": "nope"}, "grid": {"bounds": [-5, 5], "n": 64}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "numerics": {"stencil_order": 3}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "numerics": {"floor_rel": 0.5}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "numerics": {"quadrature": "simpson"}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "numerics": {"gauge": "given"}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "constants": {"hbar": -1}})",
      R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "evolution": {"steps": 1}})",
      R"({"grid": {"bounds": [-5, 5], "n": 64}})",
      R"({"density": {"kind": "gaussian"}})",
      R"(not json)",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(ParseConfig, FromFile) {
  const fs::path dir = temp_dir();
  std::ofstream(dir / "p.txt") << "# density samples\n";
  {
    std::ofstream out(dir / "p.txt", std::ios::app);
    for (int i = 0; i < 64; ++i) {
      const double x = -8 + 16.0 * i / 63;
      out << std::exp(-x * x / 2) << (i % 4 == 3 ? "\n" : ", ");
    }
  }
  const auto cfg = parse_config(R"({"density": {"kind": "from_file", "path": "p.txt"},
    "grid": {"bounds": [-8, 8], "n": 64}, "checks": ["EQ_2_3_VS_2_7"]})", dir);
  const auto rep = run_scenario(cfg);
  EXPECT_NEAR(rep.quantities.fisher, 1.0, 1e-2);
  EXPECT_THROW(parse_config(R"({"density": {"kind": "from_file", "path": "missing.txt"}, "grid": {"bounds": [-8, 8], "n": 64}})", dir),
               IoError);
  // Sample count must match the grid.
  const auto wrong = parse_config(R"({"density": {"kind": "from_file", "path": "p.txt"}, "grid": {"bounds": [-8, 8], "n": 65}})", dir);
  EXPECT_THROW(run_scenario(wrong), InvalidArgument);
}

TEST(RunScenario, GaussianQuantities) {
  auto cfg = parse_config(kMinimal);
  cfg.checks.push_back(RelationId::FisherRepresentations);
  const auto rep = run_scenario(cfg);
  EXPECT_NEAR(rep.quantities.fisher, 1.0, 1e-6);
  EXPECT_NEAR(rep.quantities.mean_quantum_potential, -0.125, 1e-5);
  EXPECT_NEAR(rep.quantities.mean_total_energy, 1.125, 1e-5);
  ASSERT_EQ(rep.checks.size(), 2u);
  EXPECT_EQ(rep.checks[0].relation, RelationId::MeanQuantumPotential);
  EXPECT_EQ(rep.checks[1].relation, RelationId::FisherRepresentations);
  EXPECT_TRUE(rep.warnings.empty());
}

TEST(RunScenario, GroundStateFormalCheck) {
  const auto cfg = parse_config(R"({"density": {"kind": "ho_ground"}, "grid": {"bounds": [-20, 20], "n": 4096}, "checks": ["EQ_1_1"]})");
  const auto rep = run_scenario(cfg);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].classification, Classification::formal);
  EXPECT_GE(rep.checks[0].residual_sup, 1.0 - 1e-4);
}

TEST(RunScenario, EmptyChecks) {
  const auto cfg = parse_config(R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-20, 20], "n": 1024}})");
  const auto rep = run_scenario(cfg);
  EXPECT_TRUE(rep.checks.empty());
  EXPECT_NEAR(rep.quantities.fisher, 1.0, 1e-5);
  EXPECT_EQ(to_json(rep)["checks"].size(), 0u);
}

TEST(RunScenario, BoundaryWarningAndEscalation) {
  const auto cfg = parse_config(R"({"scenario_id": "narrow", "density": {"kind": "gaussian"},
    "grid": {"bounds": [-3, 3], "n": 256}, "checks": ["EQ_2_5"]})");
  try {
    run_scenario(cfg);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario 'narrow'"), std::string::npos);
  }
  auto quiet = cfg;
  quiet.checks.clear();
  EXPECT_EQ(run_scenario(quiet).warnings.size(), 1u);
}

TEST(RunScenario, EvolveMode) {
  const auto cfg = parse_config(R"({"density": {"kind": "free_packet"}, "grid": {"bounds": [-40, 40], "n": 2048},
    "evolution": {"dt": 0.001, "steps": 200, "snap_stride": 10, "check_time": 0.1},
    "checks": ["EQ_2_6", "EQ_2_5"], "numerics": {"gauge": "min_zero"}})");
  const auto rep = run_scenario(cfg, Mode::evolve);
  ASSERT_TRUE(rep.trajectory.has_value());
  EXPECT_EQ(rep.trajectory->times.size(), 21u);
  EXPECT_EQ(rep.trajectory->check_index, 10u);
  EXPECT_NEAR(rep.quantities.time, 0.1, 1e-12);
  for (double n : rep.trajectory->norms) EXPECT_NEAR(n, 1.0, 1e-10);
  EXPECT_NEAR(rep.checks[0].lhs, rep.checks[0].rhs, 1e-3 * *rep.checks[0].fisher);
  auto no_evo = cfg;
  no_evo.evolution.reset();
  EXPECT_THROW(run_scenario(no_evo, Mode::evolve), ConfigError);
}

TEST(RunConvergence, Table) {
  const auto cfg = parse_config(R"({"density": {"kind": "bimodal"}, "grid": {"bounds": [-20, 20], "n": 257}, "checks": ["EQ_2_5"]})");
  EXPECT_EQ(refinement_counts(257, 3), (std::vector<std::size_t>{257, 513, 1025, 2049}));
  const auto rep = run_convergence(cfg, 3);
  ASSERT_EQ(rep.convergence.size(), 1u);
  EXPECT_EQ(rep.convergence[0].rows.size(), 4u);
  EXPECT_GE(rep.convergence[0].fitted_order, 1.8);
  EXPECT_LE(rep.convergence[0].fitted_order, 2.2);
  EXPECT_THROW(run_convergence(cfg, 1), ConfigError);
  const std::string csv = render_report(rep, Format::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scenario_id,relation,n,h,residual,fitted_order");
}

TEST(Report, CsvShapeAndRoundTrip) {
  auto cfg = parse_config(kMinimal);
  cfg.checks.push_back(RelationId::OsmoticGradient);
  const auto rep = run_scenario(cfg);
  const std::string csv = render_csv(rep);
  std::stringstream ss(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(ss, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], kCsvHeader);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  for (std::size_t r = 0; r < 2; ++r) {
    const auto cells = split(lines[r + 1]);
    ASSERT_EQ(cells.size(), 8u);
    const auto& c = rep.checks[r];
    EXPECT_EQ(cells[1], wire_name(c.relation));
    EXPECT_EQ(std::stod(cells[2]), c.lhs);
    EXPECT_EQ(std::stod(cells[3]), c.rhs);
    EXPECT_EQ(std::stod(cells[4]), c.residual_sup);
    EXPECT_EQ(std::stod(cells[5]), c.residual_l2);
    EXPECT_EQ(std::stod(cells[6]), c.excluded_mass);
    EXPECT_EQ(cells[7], "exact");
  }
  // json -> csv agree bit for bit.
  const auto j = Json::parse(render_report(rep, Format::json));
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(j["checks"][r]["residual_sup"].get<double>(), std::stod(split(lines[r + 1])[4]));
  }
}

TEST(Report, FormatDouble) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(Report, JsonDeterministicModuloTimestamp) {
  const auto cfg = parse_config(kMinimal);
  auto a = to_json(run_scenario(cfg));
  auto b = to_json(run_scenario(cfg));
  a["provenance"].erase("timestamp");
  b["provenance"].erase("timestamp");
  EXPECT_EQ(a.dump(2), b.dump(2));
  EXPECT_TRUE(a["provenance"].contains("version"));
  EXPECT_TRUE(a["provenance"].contains("tolerances"));
}

TEST(Report, UnwritablePathNamed) {
  const auto rep = run_scenario(parse_config(kMinimal));
  const fs::path bad = "/nonexistent_dir_qfisher/out.json";
  try {
    emit_report(rep, Format::json, bad);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(Report, FieldDump) {
  const auto cfg = parse_config(R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-10, 10], "n": 64}})");
  const auto rep = run_scenario(cfg);
  const std::string csv = render_fields(cfg, *rep.density);
  std::stringstream ss(csv);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x0,P,R,score0,u0,dp0,Q_rev,Q_standard,heat,E_tot,support");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
}

TEST(Catalog, ListsEveryKind) {
  const auto j = catalog_json(PhysicalConstants{});
  std::set<std::string> kinds;
  for (const auto& d : j["densities"]) {
    kinds.insert(d["kind"].get<std::string>());
    for (const auto& o : d["oracles"]) EXPECT_FALSE(o["basis"].get<std::string>().empty());
  }
  for (const char* k : {"gaussian", "ho_ground", "ho_coherent", "free_packet", "bimodal"}) EXPECT_TRUE(kinds.count(k)) << k;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = temp_dir();
  const std::string cfg = std::string(QFISHER_CONFIG_DIR) + "/gaussian.json";
  EXPECT_EQ(run_cli("analyze --config " + cfg + " --out " + (dir / "a.json").string()), 0);
  EXPECT_EQ(run_cli("analyze --config " + cfg + " --format csv --out " + (dir / "a.csv").string() + " --dump-fields"), 0);
  EXPECT_TRUE(fs::exists(dir / "a_fields.csv"));
  EXPECT_EQ(read_file(dir / "a.csv").substr(0, 14), "scenario_id,re");
  EXPECT_EQ(run_cli("catalog"), 0);

  std::ofstream(dir / "bad.json") << R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-5, 5], "n": 64}, "typo": 1})";
  EXPECT_EQ(run_cli("analyze --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("analyze"), 2);
  EXPECT_EQ(run_cli("analyze --config " + cfg + " --format xml"), 2);

  std::ofstream(dir / "edge.json") << R"({"density": {"kind": "gaussian"}, "grid": {"bounds": [-3, 3], "n": 256}, "checks": ["EQ_2_5"]})";
  EXPECT_EQ(run_cli("analyze --config " + (dir / "edge.json").string()), 3);

  EXPECT_EQ(run_cli("analyze --config " + (dir / "missing.json").string()), 4);
  EXPECT_EQ(run_cli("analyze --config " + cfg + " --out /nonexistent_dir_qfisher/x.json"), 4);
}

TEST(Cli, AnalyzeDeterministic) {
  const fs::path dir = temp_dir();
  const std::string cfg = std::string(QFISHER_CONFIG_DIR) + "/ho_ground_formal.json";
  ASSERT_EQ(run_cli("analyze --config " + cfg + " --out " + (dir / "r1.json").string()), 0);
  ASSERT_EQ(run_cli("analyze --config " + cfg + " --out " + (dir / "r2.json").string()), 0);
  auto a = Json::parse(read_file(dir / "r1.json"));
  auto b = Json::parse(read_file(dir / "r2.json"));
  a["provenance"].erase("timestamp");
  b["provenance"].erase("timestamp");
  EXPECT_EQ(a.dump(), b.dump());
}
