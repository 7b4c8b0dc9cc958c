#pragma once

/// @file classify.hpp
/// @brief Checks the hypotheses of the three blow-up / global-existence
/// criteria on an initial state and aggregates them into a Verdict.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kglab/functionals.hpp"

namespace kglab {

enum class FindingTag {
  None,
  Thm1NegativeEnergy,   // E(0) < 0
  Thm1ZeroEnergyAngle,  // E(0) = 0 and <(u0,v0),(u1,v1)> > 0
  Thm2Projection,       // y(0) > 0, dy(0) >= 0, y/4 + P/2 >= E > 0
  Thm3SetE,             // E(0) < d, K(0) < 0
  Thm3SetW,             // E(0) < d, K(0) >= 0
};

enum class Prediction { BlowUp, Global, Inconclusive };

std::string to_string(FindingTag tag);
std::string to_string(Prediction p);

bool predicts_blowup(FindingTag tag);

struct Finding {
  FindingTag tag = FindingTag::None;
  /// False when the coupling lies outside the criterion's β range.
  bool beta_valid = true;
  std::map<std::string, double> evidence;
};

/// Relative band around E = 0 in which the zero-energy criterion applies.
inline constexpr double kZeroEnergyTolerance = 1e-8;
/// Relative slack for y/4 + P/2 >= E, whose boundary case is constructed on purpose.
inline constexpr double kProjectionBoundTolerance = 1e-10;

Finding check_thm1(const State& s0, const CouplingParams& params);
Finding check_thm2(const State& s0, const CouplingParams& params);
/// Throws std::invalid_argument when d <= 0.
Finding check_thm3(const State& s0, const CouplingParams& params, double d);

struct Verdict {
  std::vector<FindingTag> applicable;  // {None} when nothing applies
  std::map<std::string, double> evidence;
  Prediction prediction = Prediction::Inconclusive;
  std::map<std::string, bool> beta_valid;
  /// Negative/zero-energy data with β >= 0 must also lie in the blow-up set.
  bool inclusion_consistent = true;
  bool has(FindingTag tag) const;
};

Verdict classify(const State& s0, const CouplingParams& params, std::optional<double> d);

}  // namespace kglab
