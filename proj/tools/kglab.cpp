#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "kglab/experiment.hpp"

using namespace kglab;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::string out;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.path, "Config file (key = value or JSON)");
  cmd->add_option("-s,--set", args.overrides, "Override a setting, e.g. --set coupling.beta=0.5");
  cmd->add_option("-o,--out", args.out, "Output directory (overrides output.directory)");
}

ExperimentConfig resolve(const ConfigArgs& args) {
  ExperimentConfig cfg = args.path.empty() ? ExperimentConfig{} : load_config(args.path);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "override must be key=value");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.out.empty()) cfg.output.directory = args.out;
  cfg.validate();
  return cfg;
}

RadialField random_field(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-2.0, 2.0), width(0.5, 4.0), center(0.0, 6.0);
  const double a = amp(rng), w = width(rng), c = center(rng);
  const double b = amp(rng), w2 = width(rng);
  return RadialField::sample(grid, [=](double r) {
    return a * std::exp(-(r - c) * (r - c) / (w * w)) + b * std::exp(-r * r / (w2 * w2));
  });
}

int verify_identities(std::size_t samples, std::size_t n, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> beta_dist(-1.0, 4.0), gamma_dist(0.05, 1.0);
  const GridPtr grid = build_grid(20.0, n);
  double worst[4] = {0, 0, 0, 0};
  for (std::size_t k = 0; k < samples; ++k) {
    const CouplingParams p(beta_dist(rng));
    const State s(random_field(grid, rng), random_field(grid, rng), random_field(grid, rng),
                  random_field(grid, rng));
    const double g = gamma_dist(rng);
    worst[0] = std::max(worst[0], energy_nehari_identity_gap(s, p, g).relative());
    worst[1] = std::max(worst[1], action_split_gap(s.u, s.v, p).relative());
    worst[2] = std::max(worst[2], energy_decomposition_gap(s, p).relative());
    const Residual slack = energy_control_slack(s, p, g);
    worst[3] = std::max(worst[3], -slack.relative());
  }
  const char* names[4] = {"energy/Nehari identity", "J = K/4 + E1", "energy decomposition",
                          "energy control (negative slack)"};
  bool ok = true;
  for (int i = 0; i < 4; ++i) {
    const bool pass = worst[i] <= tol;
    ok = ok && pass;
    std::cout << (pass ? "ok   " : "FAIL ") << names[i] << ": max relative residual " << worst[i] << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kglab: radial coupled cubic Klein-Gordon experiments"};
  app.require_subcommand(1);

  ConfigArgs sim_args, gs_args, cls_args, sweep_args, data_args;

  auto* sim = app.add_subcommand("simulate", "Build data, classify, simulate and write the report files");
  add_config_args(sim, sim_args);

  auto* gs = app.add_subcommand("groundstate", "Compute the ground state and level d");
  add_config_args(gs, gs_args);

  auto* cls = app.add_subcommand("classify", "Classify initial data; exit 0 for a finding, 2 if inconclusive");
  add_config_args(cls, cls_args);

  auto* sweep = app.add_subcommand("sweep", "Run the pipeline over a list of values of one setting");
  add_config_args(sweep, sweep_args);
  std::string axis;
  std::vector<std::string> values;
  unsigned threads = 0;
  sweep->add_option("-a,--axis", axis, "Setting to vary, e.g. data.lambda")->required();
  sweep->add_option("-v,--values", values, "Comma-separated values")->delimiter(',');
  sweep->add_option("-t,--threads", threads, "Worker threads (0: KGLAB_THREADS or hardware)");

  auto* verify = app.add_subcommand("verify-identities", "Check the algebraic identities on random states");
  std::size_t samples = 1000, vn = 256;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  verify->add_option("--samples", samples, "Number of random states")->capture_default_str();
  verify->add_option("--n", vn, "Grid size")->capture_default_str();
  verify->add_option("--seed", seed, "RNG seed")->capture_default_str();
  verify->add_option("--tol", tol, "Relative tolerance")->capture_default_str();

  auto* make = app.add_subcommand("make-data", "Write the configured initial state as r,u,ut,v,vt CSV");
  add_config_args(make, data_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      ExperimentConfig cfg = resolve(sim_args);
      const ExperimentReport rep = run_experiment(cfg);
      std::cout << rep.summary_json(cfg).dump(2) << '\n';
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
      return 0;
    }
    if (gs->parsed()) {
      ExperimentConfig cfg = resolve(gs_args);
      const GroundState g =
          minimize_d(CouplingParams(cfg.beta), build_grid(cfg.grid.r_max, cfg.grid.n), cfg.groundstate.options);
      std::filesystem::create_directories(cfg.output.directory);
      std::ofstream csv(cfg.output.directory / "groundstate.csv");
      write_groundstate_csv(csv, g);
      std::ofstream(cfg.output.directory / "groundstate.json") << groundstate_json(g).dump(2) << '\n';
      std::cout << groundstate_json(g).dump(2) << '\n';
      return 0;
    }
    if (cls->parsed()) {
      ExperimentConfig cfg = resolve(cls_args);
      cfg.sim.enabled = false;
      const ExperimentReport rep = run_pipeline(cfg);
      std::cout << rep.verdict_json().dump(2) << '\n';
      return rep.verdict.has(FindingTag::None) ? 2 : 0;
    }
    if (sweep->parsed()) {
      ExperimentConfig cfg = resolve(sweep_args);
      const std::string csv = run_sweep(cfg, axis, values, threads);
      if (sweep_args.out.empty()) {
        std::cout << csv;
      } else {
        std::filesystem::create_directories(cfg.output.directory);
        std::ofstream(cfg.output.directory / "sweep.csv") << csv;
      }
      return 0;
    }
    if (verify->parsed()) return verify_identities(samples, vn, seed, tol);
    if (make->parsed()) {
      ExperimentConfig cfg = resolve(data_args);
      std::optional<GroundState> g;
      if (cfg.data.family == DataFamily::ScaledGroundState || cfg.data.family == DataFamily::ZeroEnergy) {
        g = minimize_d(CouplingParams(cfg.beta), build_grid(cfg.grid.r_max, cfg.grid.n), cfg.groundstate.options);
      }
      const State s = build_initial_state(cfg, g);
      if (data_args.out.empty()) {
        write_state_csv(std::cout, s);
      } else {
        std::filesystem::create_directories(cfg.output.directory);
        std::ofstream out(cfg.output.directory / "state.csv");
        write_state_csv(out, s);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
