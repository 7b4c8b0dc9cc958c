#include "kglab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace kglab {

std::string to_string(DataFamily family) {
  switch (family) {
    case DataFamily::Bump: return "bump";
    case DataFamily::ScaledGroundState: return "scaled_gs";
    case DataFamily::ZeroEnergy: return "zero_energy";
    case DataFamily::CustomCsv: return "custom_csv";
    case DataFamily::Gaussian: return "gaussian";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  if (pos != value.size() || !std::isfinite(x)) throw ConfigError(key, "expected a number, got '" + value + "'");
  return x;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const double x = to_double(key, value);
  if (x < 0.0 || x != std::floor(x) || x > 1e12) throw ConfigError(key, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    const auto& v = it.value();
    if (v.is_object()) {
      flatten_json(v, key, out);
    } else if (v.is_string()) {
      out.emplace_back(key, v.get<std::string>());
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
      out.emplace_back(key, joined);
    } else {
      out.emplace_back(key, v.dump());
    }
  }
}

}  // namespace

bool ExperimentConfig::needs_groundstate() const {
  return groundstate.enabled || data.family == DataFamily::ScaledGroundState ||
         data.family == DataFamily::ZeroEnergy;
}

void ExperimentConfig::validate() const {
  if (!(grid.r_max > 0.0)) throw ConfigError("grid.r_max", "must be > 0");
  if (grid.n < RadialGrid::kMinNodes) throw ConfigError("grid.n", "must be >= 16");
  if (data.family == DataFamily::Bump) {
    if (!(data.R > 0.0)) throw ConfigError("data.R", "must be > 0");
    if (data.k1.has_value() != data.k2.has_value()) throw ConfigError("data.k1", "set both k1 and k2 or neither");
  }
  if (data.family == DataFamily::ScaledGroundState && !(data.lambda > 0.0)) {
    throw ConfigError("data.lambda", "must be > 0");
  }
  if (data.family == DataFamily::ZeroEnergy && !(data.eps > 0.0)) throw ConfigError("data.eps", "must be > 0");
  if (data.family == DataFamily::Gaussian && !(data.width > 0.0)) throw ConfigError("data.width", "must be > 0");
  if (data.family == DataFamily::CustomCsv && data.path.empty()) throw ConfigError("data.path", "required for custom_csv");
  if (needs_groundstate() && beta < 0.0) {
    throw ConfigError("coupling.beta", "ground-state computation requires beta >= 0");
  }
  if (sim.enabled) {
    try {
      sim.options.validate();
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      const auto colon = msg.find(':');
      throw ConfigError(msg.substr(0, colon), trim(msg.substr(colon + 1)));
    }
  }
  try {
    groundstate.options.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon), trim(msg.substr(colon + 1)));
  }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  auto num = [&] { return to_double(key, value); };
  if (key == "grid.r_max") cfg.grid.r_max = num();
  else if (key == "grid.n") cfg.grid.n = to_count(key, value);
  else if (key == "coupling.beta") cfg.beta = num();
  else if (key == "data.family") {
    if (value == "bump") cfg.data.family = DataFamily::Bump;
    else if (value == "scaled_gs") cfg.data.family = DataFamily::ScaledGroundState;
    else if (value == "zero_energy") cfg.data.family = DataFamily::ZeroEnergy;
    else if (value == "custom_csv") cfg.data.family = DataFamily::CustomCsv;
    else if (value == "gaussian") cfg.data.family = DataFamily::Gaussian;
    else throw ConfigError(key, "unknown family '" + value + "'");
  }
  else if (key == "data.R") cfg.data.R = num();
  else if (key == "data.k1") cfg.data.k1 = num();
  else if (key == "data.k2") cfg.data.k2 = num();
  else if (key == "data.lambda") cfg.data.lambda = num();
  else if (key == "data.eps") cfg.data.eps = num();
  else if (key == "data.amplitude") cfg.data.amplitude = num();
  else if (key == "data.amplitude_v") cfg.data.amplitude_v = num();
  else if (key == "data.width") cfg.data.width = num();
  else if (key == "data.path") cfg.data.path = value;
  else if (key == "sim.enabled") cfg.sim.enabled = to_bool(key, value);
  else if (key == "sim.dt") cfg.sim.options.dt = num();
  else if (key == "sim.t_end") cfg.sim.options.t_end = num();
  else if (key == "sim.snapshot_every") cfg.sim.options.snapshot_every = to_count(key, value);
  else if (key == "sim.sup_threshold") cfg.sim.options.sup_threshold = num();
  else if (key == "sim.dt_min") cfg.sim.options.dt_min = num();
  else if (key == "sim.gamma_levine") cfg.sim.options.gamma_levine = num();
  else if (key == "groundstate.enabled") cfg.groundstate.enabled = to_bool(key, value);
  else if (key == "groundstate.seeds") {
    std::vector<SeedProfile> seeds;
    for (const auto& s : split_list(value)) {
      try {
        seeds.push_back(seed_from_string(s));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    }
    cfg.groundstate.options.seeds = std::move(seeds);
  }
  else if (key == "groundstate.max_iters") cfg.groundstate.options.max_iters = to_count(key, value);
  else if (key == "groundstate.step_size") cfg.groundstate.options.step_size = num();
  else if (key == "groundstate.tol_residual") cfg.groundstate.options.tol_residual = num();
  else if (key == "groundstate.tol_K") cfg.groundstate.options.tol_K = num();
  else if (key == "groundstate.rearrange_iters") cfg.groundstate.options.rearrange_iters = to_count(key, value);
  else if (key == "output.directory") cfg.output.directory = value;
  else if (key == "output.formats") {
    cfg.output.csv = cfg.output.json = false;
    for (const auto& f : split_list(value)) {
      if (f == "csv") cfg.output.csv = true;
      else if (f == "json") cfg.output.json = true;
      else throw ConfigError(key, "unknown format '" + f + "'");
    }
  }
  else throw ConfigError(key, "unknown setting");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::pair<std::string, std::string>> entries;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<json>", e.what());
    }
    flatten_json(j, "", entries);
  } else {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
      entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  for (const auto& [k, v] : entries) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str());
  if (cfg.data.family == DataFamily::CustomCsv && std::filesystem::path(cfg.data.path).is_relative()) {
    cfg.data.path = (path.parent_path() / cfg.data.path).string();
  }
  return cfg;
}

void write_state_csv(std::ostream& os, const State& s) {
  os << "r,u,ut,v,vt\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    os << s.grid().node(i) << ',' << s.u[i] << ',' << s.ut[i] << ',' << s.v[i] << ',' << s.vt[i] << '\n';
  }
}

State read_state_csv(std::istream& is, const GridPtr& grid) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("state csv: missing header");
  if (trim(line) != "r,u,ut,v,vt") throw std::runtime_error("state csv: header must be 'r,u,ut,v,vt'");
  std::vector<double> cols[4];
  std::size_t row = 0;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(to_double("state csv row " + std::to_string(row + 2), trim(cell)));
    if (vals.size() != 5) throw std::runtime_error("state csv: row " + std::to_string(row + 2) + " needs 5 columns");
    if (row >= grid->size() || std::abs(vals[0] - grid->node(row)) > 1e-9 * grid->r_max()) {
      throw std::runtime_error("state csv: node " + std::to_string(row) + " does not match grid");
    }
    for (int c = 0; c < 4; ++c) cols[c].push_back(vals[c + 1]);
    ++row;
  }
  return State(RadialField(grid, cols[0]), RadialField(grid, cols[1]), RadialField(grid, cols[2]),
               RadialField(grid, cols[3]));
}

State build_initial_state(const ExperimentConfig& cfg, const std::optional<GroundState>& gs) {
  const GridPtr grid = build_grid(cfg.grid.r_max, cfg.grid.n);
  const CouplingParams params(cfg.beta);
  switch (cfg.data.family) {
    case DataFamily::Bump:
      return bump_data(BumpSpec{cfg.data.R, cfg.data.k1, cfg.data.k2, grid}, params);
    case DataFamily::ScaledGroundState:
      if (!gs) throw std::logic_error("scaled_gs data needs a ground state");
      return scaled_groundstate_data(*gs, cfg.data.lambda);
    case DataFamily::ZeroEnergy:
      if (!gs) throw std::logic_error("zero_energy data needs a ground state");
      return zero_energy_data(*gs, cfg.data.eps);
    case DataFamily::Gaussian:
      return gaussian_data(grid, cfg.data.amplitude, cfg.data.amplitude_v.value_or(cfg.data.amplitude),
                           cfg.data.width);
    case DataFamily::CustomCsv: {
      std::ifstream in(cfg.data.path);
      if (!in) throw std::runtime_error("data.path: cannot open " + cfg.data.path);
      return read_state_csv(in, grid);
    }
  }
  throw std::logic_error("unhandled data family");
}

bool ExperimentReport::prediction_tested() const {
  return sim.has_value() && verdict.prediction != Prediction::Inconclusive;
}

bool ExperimentReport::agreement() const {
  if (!prediction_tested()) return true;
  switch (verdict.prediction) {
    case Prediction::BlowUp: return sim->outcome.kind == OutcomeKind::BlowUpDetected;
    case Prediction::Global: return sim->outcome.kind == OutcomeKind::Completed;
    case Prediction::Inconclusive: return true;
  }
  return false;
}

nlohmann::json ExperimentReport::verdict_json() const {
  nlohmann::json j;
  j["applicable"] = nlohmann::json::array();
  for (auto tag : verdict.applicable) j["applicable"].push_back(to_string(tag));
  j["prediction"] = to_string(verdict.prediction);
  j["evidence"] = verdict.evidence;
  j["beta_valid"] = verdict.beta_valid;
  j["inclusion_consistent"] = verdict.inclusion_consistent;
  j["beta"] = params.beta;
  return j;
}

nlohmann::json groundstate_json(const GroundState& gs) {
  return {{"beta", gs.beta},         {"d_level", gs.d_level}, {"residual", gs.residual},
          {"lambda0", gs.lambda0},   {"seed", to_string(gs.seed)}, {"iterations", gs.iterations}};
}

nlohmann::json ExperimentReport::summary_json(const ExperimentConfig& cfg) const {
  nlohmann::json j;
  j["family"] = to_string(cfg.data.family);
  j["beta"] = params.beta;
  j["grid"] = {{"r_max", cfg.grid.r_max}, {"n", cfg.grid.n}};
  j["boundary"] = "homogeneous Dirichlet at r_max (truncation of R^3)";
  j["prediction"] = to_string(verdict.prediction);
  j["prediction_tested"] = prediction_tested();
  j["agreement"] = agreement();
  if (groundstate) j["d_level"] = groundstate->d_level;
  if (sim) {
    j["outcome"] = to_string(sim->outcome.kind);
    j["t_star"] = sim->outcome.kind == OutcomeKind::BlowUpDetected ? nlohmann::json(sim->outcome.t) : nlohmann::json();
    j["t_star_extrapolated"] =
        sim->outcome.extrapolated ? nlohmann::json(sim->outcome.t_star_extrapolated) : nlohmann::json();
    j["extrapolated"] = sim->outcome.extrapolated;
    j["t_final"] = sim->outcome.t;
    j["energy_drift"] = sim->energy_drift;
    j["trusted"] = sim->trusted;
    j["steps"] = sim->steps;
    j["dt_final"] = sim->dt_final;
    j["levine_conditions_met"] = levine_met;
    if (!sim->outcome.reason.empty()) j["reason"] = sim->outcome.reason;
  } else {
    j["outcome"] = "NotSimulated";
  }
  j["warnings"] = warnings;
  return j;
}

ExperimentReport run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  const CouplingParams params(cfg.beta);
  std::optional<GroundState> gs;
  if (cfg.needs_groundstate()) {
    gs = minimize_d(params, build_grid(cfg.grid.r_max, cfg.grid.n), cfg.groundstate.options);
  }
  State s0 = build_initial_state(cfg, gs);
  std::optional<double> d;
  if (gs) d = gs->d_level;
  ExperimentReport report{s0, params, classify(s0, params, d), gs, std::nullopt, false, {}};
  if (touches_boundary(s0)) report.warnings.push_back("initial data reaches within 5 cells of r_max");
  if (cfg.sim.enabled) {
    report.sim = simulate(s0, params, cfg.sim.options);
    report.levine_met = levine_conditions_met(report.sim->snapshots, cfg.sim.options.gamma_levine);
    if (!report.sim->trusted) {
      report.warnings.push_back("field support came within 5 cells of r_max; run untrusted");
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report = run_pipeline(cfg);
  const auto& dir = cfg.output.directory;
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  if (cfg.output.csv && report.sim) {
    auto out = open("snapshots.csv");
    out << FunctionalSnapshot::kCsvHeader << '\n';
    for (const auto& s : report.sim->snapshots) s.write_csv_row(out);
  }
  if (cfg.output.json) {
    open("verdict.json") << report.verdict_json().dump(2) << '\n';
    open("summary.json") << report.summary_json(cfg).dump(2) << '\n';
  }
  if (report.groundstate) {
    if (cfg.output.csv) {
      auto out = open("groundstate.csv");
      write_groundstate_csv(out, *report.groundstate);
    }
    if (cfg.output.json) open("groundstate.json") << groundstate_json(*report.groundstate).dump(2) << '\n';
  }
  return report;
}

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KGLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

namespace {

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string sweep_row(const ExperimentConfig& base, const std::string& key, const std::string& value) {
  std::string row = value;
  try {
    ExperimentConfig cfg = base;
    apply_setting(cfg, key, value);
    const ExperimentReport rep = run_pipeline(cfg);
    const auto& ev = rep.verdict.evidence;
    const State& s = rep.initial;
    const CouplingParams& p = rep.params;
    std::string tags;
    for (auto t : rep.verdict.applicable) tags += (tags.empty() ? "" : ";") + to_string(t);
    row += "," + csv_number(energy(s, p)) + "," + csv_number(ev.at("K0")) + "," + csv_number(mass(s)) + "," +
           csv_number(projection(s)) + "," + (rep.groundstate ? csv_number(rep.groundstate->d_level) : "") + "," +
           tags + "," + to_string(rep.verdict.prediction) + "," +
           (rep.sim ? to_string(rep.sim->outcome.kind) : "NotSimulated") + ",";
    if (rep.sim && rep.sim->outcome.kind == OutcomeKind::BlowUpDetected) row += csv_number(rep.sim->outcome.t);
    row += ",";
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    row = value + ",,,,,,,,Error,," + msg;
  }
  return row;
}

}  // namespace

std::string run_sweep(const ExperimentConfig& base, const std::string& axis_key,
                      const std::vector<std::string>& values, unsigned threads) {
  std::vector<std::string> rows(values.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : default_thread_count(),
                                                           static_cast<unsigned>(std::max<std::size_t>(values.size(), 1))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) rows[i] = sweep_row(base, axis_key, values[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

}  // namespace kglab
