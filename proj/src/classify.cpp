#include "kglab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kglab {

std::string to_string(FindingTag tag) {
  switch (tag) {
    case FindingTag::None: return "None";
    case FindingTag::Thm1NegativeEnergy: return "Thm1NegativeEnergy";
    case FindingTag::Thm1ZeroEnergyAngle: return "Thm1ZeroEnergyAngle";
    case FindingTag::Thm2Projection: return "Thm2Projection";
    case FindingTag::Thm3SetE: return "Thm3SetE";
    case FindingTag::Thm3SetW: return "Thm3SetW";
  }
  return "Unknown";
}

std::string to_string(Prediction p) {
  switch (p) {
    case Prediction::BlowUp: return "BlowUp";
    case Prediction::Global: return "Global";
    case Prediction::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

bool predicts_blowup(FindingTag tag) {
  return tag == FindingTag::Thm1NegativeEnergy || tag == FindingTag::Thm1ZeroEnergyAngle ||
         tag == FindingTag::Thm2Projection || tag == FindingTag::Thm3SetE;
}

namespace {

// Energy and the absolute size of its terms.
struct EnergyParts {
  double E, scale;
};

EnergyParts energy_parts(const State& s, const CouplingParams& params) {
  const double quad = 0.5 * (norm_h1_sq(s.u) + norm_h1_sq(s.v) + kinetic(s));
  const double quart = 0.25 * quartic_coupling(s.u, s.v, params);
  return {quad - quart, quad + std::abs(quart)};
}

}  // namespace

Finding check_thm1(const State& s0, const CouplingParams& params) {
  Finding f;
  const auto [E, scale] = energy_parts(s0, params);
  const double dy = mass_derivative(s0);
  f.evidence = {{"E0", E}, {"dy0", dy}, {"zero_energy_tolerance", kZeroEnergyTolerance}};
  f.beta_valid = params.allows_energy_criterion();
  if (!f.beta_valid) return f;
  const bool zero_energy = std::abs(E) <= kZeroEnergyTolerance * scale;
  if (zero_energy) {
    if (dy > 0.0) f.tag = FindingTag::Thm1ZeroEnergyAngle;
  } else if (E < 0.0) {
    f.tag = FindingTag::Thm1NegativeEnergy;
  }
  return f;
}

Finding check_thm2(const State& s0, const CouplingParams& params) {
  Finding f;
  const double y = mass(s0);
  const double dy = mass_derivative(s0);
  const double P = projection(s0);
  const auto [E, scale] = energy_parts(s0, params);
  f.evidence = {{"y0", y}, {"dy0", dy}, {"P0", P}, {"E0", E}};
  if (y > kMassEpsilon) {
    // Two normalizations of the time after which y(0) - y(t) + 2P(0) <= 0.
    f.evidence["t_b"] = 0.5 * dy / y;
    f.evidence["t_b_unnormalized"] = 0.5 * dy;
  }
  const bool nonzero = y > kMassEpsilon;
  const bool angle = dy >= -1e-14 * (y + kinetic(s0));
  const double bound = 0.25 * y + 0.5 * P;
  const bool energy_window = E > 0.0 && bound >= E - kProjectionBoundTolerance * (scale + bound);
  if (nonzero && angle && energy_window) f.tag = FindingTag::Thm2Projection;
  return f;
}

Finding check_thm3(const State& s0, const CouplingParams& params, double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("check_thm3: d must be > 0");
  Finding f;
  const double E = energy(s0, params);
  const double K = nehari(s0.u, s0.v, params);
  f.evidence = {{"E0", E}, {"K0", K}, {"d", d}};
  f.beta_valid = params.allows_potential_well();
  if (!f.beta_valid) return f;
  if (E < d) f.tag = K >= 0.0 ? FindingTag::Thm3SetW : FindingTag::Thm3SetE;
  return f;
}

bool Verdict::has(FindingTag tag) const {
  return std::find(applicable.begin(), applicable.end(), tag) != applicable.end();
}

Verdict classify(const State& s0, const CouplingParams& params, std::optional<double> d) {
  Verdict v;
  auto absorb = [&v](const Finding& f, const std::string& name) {
    v.beta_valid[name] = f.beta_valid;
    for (const auto& [k, x] : f.evidence) v.evidence[k] = x;
    if (f.tag != FindingTag::None) v.applicable.push_back(f.tag);
  };
  const Finding f1 = check_thm1(s0, params);
  const Finding f2 = check_thm2(s0, params);
  absorb(f1, "thm1");
  absorb(f2, "thm2");
  std::optional<Finding> f3;
  if (d) {
    f3 = check_thm3(s0, params, *d);
    absorb(*f3, "thm3");
  } else {
    v.beta_valid["thm3"] = params.allows_potential_well();
  }
  // Always record the basic scalars even when a check was skipped.
  v.evidence["K0"] = nehari(s0.u, s0.v, params);

  if (f1.tag != FindingTag::None && params.allows_potential_well() && f3) {
    v.inclusion_consistent = f3->tag == FindingTag::Thm3SetE;
  }

  const bool blowup = std::any_of(v.applicable.begin(), v.applicable.end(), predicts_blowup);
  if (blowup) {
    v.prediction = Prediction::BlowUp;
  } else if (v.has(FindingTag::Thm3SetW)) {
    v.prediction = Prediction::Global;
  }
  if (v.applicable.empty()) v.applicable.push_back(FindingTag::None);
  return v;
}

}  // namespace kglab
