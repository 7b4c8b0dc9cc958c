#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "generators.hpp"
#include "kglab/experiment.hpp"

using namespace kglab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kglab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

ExperimentConfig small_gs_config(double lambda) {
  ExperimentConfig cfg;
  cfg.grid = {24.0, 1536};
  cfg.data.family = DataFamily::ScaledGroundState;
  cfg.data.lambda = lambda;
  return cfg;
}

}  // namespace

TEST_CASE("key = value config") {
  const ExperimentConfig cfg = parse_config(
      "# comment\n"
      "grid.r_max = 30\n"
      "grid.n = 1024   # trailing comment\n"
      "coupling.beta = 0.5\n"
      "\n"
      "data.family = bump\n"
      "data.R = 4\n"
      "sim.dt = 5e-4\n"
      "sim.t_end = 2\n"
      "groundstate.enabled = true\n"
      "groundstate.seeds = gaussian, symmetric\n"
      "output.directory = runs/a\n"
      "output.formats = json\n");
  CHECK(cfg.grid.r_max == 30.0);
  CHECK(cfg.grid.n == 1024);
  CHECK(cfg.beta == 0.5);
  CHECK(cfg.data.family == DataFamily::Bump);
  CHECK(cfg.data.R == 4.0);
  CHECK(cfg.sim.options.dt == 5e-4);
  CHECK(cfg.sim.options.t_end == 2.0);
  CHECK(cfg.groundstate.enabled);
  CHECK(cfg.groundstate.options.seeds == std::vector<SeedProfile>{SeedProfile::Gaussian, SeedProfile::Symmetric});
  CHECK(cfg.output.directory == fs::path("runs/a"));
  CHECK_FALSE(cfg.output.csv);
  CHECK(cfg.output.json);
  CHECK(cfg.needs_groundstate());
}

TEST_CASE("JSON config mirrors key = value") {
  const ExperimentConfig a = parse_config(
      R"({"grid": {"r_max": 30, "n": 1024}, "coupling": {"beta": 2},
          "data": {"family": "scaled_gs", "lambda": 0.9},
          "sim": {"enabled": false}, "groundstate": {"seeds": ["bump", "semitrivial"]},
          "output": {"formats": ["csv"]}})");
  const ExperimentConfig b = parse_config(
      "grid.r_max = 30\ngrid.n = 1024\ncoupling.beta = 2\ndata.family = scaled_gs\ndata.lambda = 0.9\n"
      "sim.enabled = false\ngroundstate.seeds = bump,semitrivial\noutput.formats = csv\n");
  CHECK(a.grid.r_max == b.grid.r_max);
  CHECK(a.grid.n == b.grid.n);
  CHECK(a.beta == b.beta);
  CHECK(a.data.family == b.data.family);
  CHECK(a.data.lambda == b.data.lambda);
  CHECK(a.sim.enabled == b.sim.enabled);
  CHECK(a.groundstate.options.seeds == b.groundstate.options.seeds);
  CHECK(a.output.csv == b.output.csv);
  CHECK(a.output.json == b.output.json);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of("grid.rmax = 3\n") == "grid.rmax");
  CHECK(field_of("grid.r_max = -3\n") == "grid.r_max");
  CHECK(field_of("grid.n = 8\n") == "grid.n");
  CHECK(field_of("grid.n = 2.5\n") == "grid.n");
  CHECK(field_of("coupling.beta = abc\n") == "coupling.beta");
  CHECK(field_of("data.family = plane_wave\n") == "data.family");
  CHECK(field_of("data.family = bump\ndata.R = 0\n") == "data.R");
  CHECK(field_of("data.family = bump\ndata.k1 = 0.5\n") == "data.k1");
  CHECK(field_of("data.family = scaled_gs\ndata.lambda = -1\n") == "data.lambda");
  CHECK(field_of("data.family = custom_csv\n") == "data.path");
  CHECK(field_of("data.family = scaled_gs\ncoupling.beta = -0.5\n") == "coupling.beta");
  CHECK(field_of("sim.dt = 0\n") == "sim.dt");
  CHECK(field_of("sim.enabled = maybe\n") == "sim.enabled");
  CHECK(field_of("groundstate.seeds = random\n") == "groundstate.seeds");
  CHECK(field_of("output.formats = xml\n") == "output.formats");
  CHECK(field_of("grid.n 12\n") == "line 1");
  CHECK(field_of("{\"grid\": {\"n\": 8}}") == "grid.n");
  CHECK(field_of("{\"grid\": ") == "<json>");
  CHECK(field_of("") == "");
}

TEST_CASE("zero data completes with no prediction") {
  ExperimentConfig cfg = parse_config("grid.r_max = 20\ngrid.n = 512\ndata.amplitude = 0\nsim.t_end = 1\n");
  const ExperimentReport rep = run_pipeline(cfg);
  REQUIRE(rep.sim);
  CHECK(rep.sim->outcome.kind == OutcomeKind::Completed);
  CHECK(rep.verdict.prediction == Prediction::Inconclusive);
  CHECK(rep.verdict.applicable == std::vector<FindingTag>{FindingTag::None});
  CHECK_FALSE(rep.prediction_tested());
  CHECK(rep.agreement());
  const auto summary = rep.summary_json(cfg);
  CHECK(summary["outcome"] == "Completed");
  CHECK(summary["t_star"].is_null());

  cfg.sim.enabled = false;
  const ExperimentReport none = run_pipeline(cfg);
  CHECK_FALSE(none.sim);
  CHECK(none.summary_json(cfg)["outcome"] == "NotSimulated");
}

TEST_CASE("end-to-end runs agree with the prediction") {
  SUBCASE("bump") {
    const ExperimentConfig cfg =
        parse_config("grid.r_max = 40\ngrid.n = 4096\ndata.family = bump\ndata.R = 5\nsim.t_end = 10\n");
    const ExperimentReport rep = run_pipeline(cfg);
    CHECK(rep.verdict.has(FindingTag::Thm2Projection));
    CHECK(rep.sim->outcome.kind == OutcomeKind::BlowUpDetected);
    CHECK(rep.agreement());
    CHECK(rep.prediction_tested());
  }
  SUBCASE("scaled ground state in W") {
    ExperimentConfig cfg = small_gs_config(0.5);
    cfg.sim.options.t_end = 20.0;
    const ExperimentReport rep = run_pipeline(cfg);
    CHECK(rep.verdict.has(FindingTag::Thm3SetW));
    CHECK(rep.sim->outcome.kind == OutcomeKind::Completed);
    CHECK(rep.agreement());
    CHECK(rep.summary_json(cfg)["d_level"].get<double>() > 0.0);
  }
}

TEST_CASE("run_experiment writes deterministic files") {
  ExperimentConfig cfg = small_gs_config(1.1);
  cfg.sim.options.t_end = 0.5;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  cfg.output.directory = a;
  run_experiment(cfg);
  cfg.output.directory = b;
  run_experiment(cfg);
  for (const char* f : {"snapshots.csv", "verdict.json", "summary.json", "groundstate.csv", "groundstate.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto verdict = nlohmann::json::parse(slurp(a / "verdict.json"));
  CHECK(verdict["prediction"] == "BlowUp");
  CHECK(verdict["evidence"].contains("d"));
  CHECK(slurp(a / "snapshots.csv").rfind(FunctionalSnapshot::kCsvHeader, 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);

  cfg.output.directory = scratch("json_only");
  cfg.output.csv = false;
  run_experiment(cfg);
  CHECK_FALSE(fs::exists(cfg.output.directory / "snapshots.csv"));
  CHECK(fs::exists(cfg.output.directory / "summary.json"));
  fs::remove_all(cfg.output.directory);
}

TEST_CASE("lambda sweep flips across the ground state") {
  ExperimentConfig cfg = small_gs_config(1.0);
  cfg.sim.enabled = false;
  const std::string out = run_sweep(cfg, "data.lambda", {"0.25", "0.5", "0.9", "1.1", "1.5", "3"}, 2);
  const auto rows = csv_rows(out);
  REQUIRE(rows.size() == 7);
  CHECK(out.rfind(kSweepHeader, 0) == 0);
  const std::vector<std::string> expect = {"Thm3SetW", "Thm3SetW", "Thm3SetW",
                                           "Thm3SetE", "Thm1NegativeEnergy;Thm3SetE",
                                           "Thm1NegativeEnergy;Thm3SetE"};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    REQUIRE(rows[i + 1].size() == 11);
    CHECK(rows[i + 1][6] == expect[i]);
    CHECK(rows[i + 1][8] == "NotSimulated");
  }
  CHECK(run_sweep(cfg, "data.lambda", {"0.25", "0.5", "0.9", "1.1", "1.5", "3"}, 1) == out);
}

TEST_CASE("beta sweep of d is non-increasing") {
  ExperimentConfig cfg = small_gs_config(0.5);
  cfg.sim.enabled = false;
  const auto rows = csv_rows(run_sweep(cfg, "coupling.beta", {"0", "0.5", "1", "2", "4"}));
  REQUIRE(rows.size() == 6);
  double prev = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = std::stod(rows[i][5]);
    CHECK(d <= prev * (1.0 + 1e-9));
    prev = d;
  }
  CHECK(std::stod(rows[5][5]) < std::stod(rows[1][5]));
}

TEST_CASE("sweep edge cases") {
  ExperimentConfig cfg;
  cfg.grid = {20.0, 256};
  cfg.sim.enabled = false;
  CHECK(run_sweep(cfg, "data.amplitude", {}) == std::string(kSweepHeader) + "\n");

  const auto rows = csv_rows(run_sweep(cfg, "data.width", {"1", "-1", "oops"}));
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][8] == "NotSimulated");
  CHECK(rows[2][8] == "Error");
  CHECK(rows[2][10].find("data.width") != std::string::npos);
  CHECK(rows[3][8] == "Error");
  CHECK(rows[3][0] == "oops");

  const auto bad_axis = csv_rows(run_sweep(cfg, "data.nope", {"1"}));
  CHECK(bad_axis[1][8] == "Error");
}

TEST_CASE("state csv round trip") {
  std::mt19937_64 rng(31);
  const GridPtr g = build_grid(10.0, 64);
  const State s = testgen::random_state(g, rng);
  std::stringstream ss;
  write_state_csv(ss, s);
  const State back = read_state_csv(ss, g);
  CHECK((back.u - s.u).sup_norm() == 0.0);
  CHECK((back.vt - s.vt).sup_norm() == 0.0);

  std::istringstream bad_header("r,u,v\n");
  CHECK_THROWS_AS(read_state_csv(bad_header, g), std::runtime_error);
  std::istringstream short_file("r,u,ut,v,vt\n0.078125,1,2,3,4\n");
  CHECK_THROWS(read_state_csv(short_file, g));

  const fs::path dir = scratch("custom");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "state.csv");
    write_state_csv(out, s);
    std::ofstream conf(dir / "run.conf");
    conf << "grid.r_max = 10\ngrid.n = 64\ndata.family = custom_csv\ndata.path = state.csv\nsim.enabled = false\n";
  }
  const ExperimentConfig cfg = load_config(dir / "run.conf");
  const State loaded = build_initial_state(cfg, std::nullopt);
  CHECK((loaded.v - s.v).sup_norm() == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("shipped configs agree with their predictions") {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(KGLAB_CONFIG_DIR)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  REQUIRE(files.size() >= 6);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    const ExperimentReport rep = run_pipeline(load_config(f));
    CHECK(rep.agreement());
    if (f.stem() != "zero") CHECK(rep.prediction_tested());
  }
}
