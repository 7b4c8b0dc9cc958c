#pragma once

/// @file dynamics.hpp
/// @brief Störmer-Verlet integration of the radial Klein-Gordon system with
/// blow-up detection and Levine's concavity monitor.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kglab/functionals.hpp"

namespace kglab {

struct SimOptions {
  double dt = 1e-3;
  double t_end = 10.0;
  std::size_t snapshot_every = 10;
  double sup_threshold = 1e6;
  /// Smallest step the halving may reach; 0 selects dt / 1024.
  double dt_min = 0.0;
  double gamma_levine = 1.5;

  double effective_dt_min() const { return dt_min > 0.0 ? dt_min : dt / 1024.0; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class OutcomeKind { Completed, BlowUpDetected, StepFailure };

std::string to_string(OutcomeKind kind);

struct Outcome {
  OutcomeKind kind = OutcomeKind::Completed;
  /// t_end for Completed, last stable time for BlowUpDetected, failure time otherwise.
  double t = 0.0;
  /// Root of the least-squares line through the last values of 1/sup-norm.
  bool extrapolated = false;
  double t_star_extrapolated = 0.0;
  std::string reason;
};

struct SimResult {
  std::vector<FunctionalSnapshot> snapshots;
  Outcome outcome;
  /// max_t |E(t) - E(0)| / max(1, |E(0)|).
  double energy_drift = 0.0;
  /// False once the field support comes within 5 cells of r_max.
  bool trusted = true;
  double dt_final = 0.0;
  std::size_t steps = 0;
};

struct Acceleration {
  RadialField u, v;
};

/// a_u = Δu - u + u^3 + β v^2 u, a_v = Δv - v + v^3 + β u^2 v.
Acceleration rhs(const State& s, const CouplingParams& params);

/// One velocity-Verlet step (dt may be negative). Returns nullopt when the
/// result is not finite.
std::optional<State> step_leapfrog(const State& s, double dt, const CouplingParams& params);

SimResult simulate(const State& s0, const CouplingParams& params, const SimOptions& opts);

/// y'' y - γ (y')^2 for every snapshot.
std::vector<double> levine_indicator(std::span<const FunctionalSnapshot> series, double gamma);

/// True when the last `segment` snapshots all have a positive indicator and
/// positive y, y'.
bool levine_conditions_met(std::span<const FunctionalSnapshot> series, double gamma,
                           std::size_t segment = 5);

/// A step with dt * sup-norm above this bound is retried at dt / 2, since
/// 1 / sup-norm is the local time scale of u'' = u^3. Below dt_min the run
/// ends as a blow-up.
inline constexpr double kStepAmplitudeBound = 0.05;

/// Field magnitude treated as "support" by the boundary guard.
inline constexpr double kSupportThreshold = 1e-8;
/// Number of outer cells watched by the boundary guard.
inline constexpr std::size_t kBoundaryGuardCells = 5;

/// True when |u| or |v| exceeds kSupportThreshold within the outer guard cells.
bool touches_boundary(const State& s);

}  // namespace kglab
