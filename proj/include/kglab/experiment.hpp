#pragma once

/// @file experiment.hpp
/// @brief Experiment configuration, the construct -> classify -> simulate
/// pipeline, report files and parameter sweeps.
///
/// Config files are line-oriented `section.key = value` pairs ('#' starts a
/// comment). A JSON object with the same nested sections is accepted too.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kglab/classify.hpp"
#include "kglab/data_factory.hpp"
#include "kglab/dynamics.hpp"
#include "kglab/groundstate.hpp"

namespace kglab {

/// Invalid configuration; what() starts with the dotted field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class DataFamily { Bump, ScaledGroundState, ZeroEnergy, CustomCsv, Gaussian };

std::string to_string(DataFamily family);

struct ExperimentConfig {
  struct Grid {
    double r_max = 40.0;
    std::size_t n = 4096;
  } grid;
  double beta = 1.0;
  struct Data {
    DataFamily family = DataFamily::Gaussian;
    double R = 5.0;
    std::optional<double> k1, k2;
    double lambda = 0.5;
    double eps = 0.1;
    double amplitude = 1e-3;
    std::optional<double> amplitude_v;
    double width = 1.0;
    std::string path;
  } data;
  struct Sim {
    bool enabled = true;
    SimOptions options;
  } sim;
  struct GroundStateSection {
    bool enabled = false;
    MinimizeOptions options;
  } groundstate;
  struct Output {
    std::filesystem::path directory = "out";
    bool csv = true;
    bool json = true;
  } output;

  /// Ground state is required by the family or requested explicitly.
  bool needs_groundstate() const;
  /// Range checks; throws ConfigError.
  void validate() const;
};

/// Sets one dotted key; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses key=value text, or JSON when the first non-blank character is '{'.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentReport {
  State initial;
  CouplingParams params;
  Verdict verdict;
  std::optional<GroundState> groundstate;
  std::optional<SimResult> sim;
  bool levine_met = false;
  std::vector<std::string> warnings;

  bool prediction_tested() const;
  /// Prediction vs. simulated outcome; vacuously true when nothing is predicted.
  bool agreement() const;
  nlohmann::json verdict_json() const;
  nlohmann::json summary_json(const ExperimentConfig& cfg) const;
};

/// Builds the initial state for the configured family.
State build_initial_state(const ExperimentConfig& cfg, const std::optional<GroundState>& gs);

/// Runs the pipeline without touching the filesystem.
ExperimentReport run_pipeline(const ExperimentConfig& cfg);

/// Runs the pipeline and writes snapshots.csv, verdict.json, summary.json and,
/// when a ground state was computed, groundstate.csv / groundstate.json.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json groundstate_json(const GroundState& gs);

/// Header of the aggregated sweep CSV.
inline constexpr const char* kSweepHeader = "param,E0,K0,y0,P0,d,verdict,prediction,outcome,t_star,error";

/// One row per axis value, in axis order. Rows run concurrently on up to
/// `threads` workers (0 reads KGLAB_THREADS, falling back to the hardware).
std::string run_sweep(const ExperimentConfig& base, const std::string& axis_key,
                      const std::vector<std::string>& values, unsigned threads = 0);

/// Thread cap from KGLAB_THREADS, or hardware concurrency.
unsigned default_thread_count();

// State dump with header r,u,ut,v,vt.
void write_state_csv(std::ostream& os, const State& s);
State read_state_csv(std::istream& is, const GridPtr& grid);

}  // namespace kglab
