#pragma once

/// @file data_factory.hpp
/// @brief Initial data families: compactly supported bump data with
/// arbitrarily large energy, dilations of a ground state, and zero-energy
/// data with a positive angle condition.

#include <optional>

#include "kglab/functionals.hpp"
#include "kglab/groundstate.hpp"

namespace kglab {

/// Smooth cutoff on R_+: 1 on |x-3| <= 1, 0 on |x-3| >= 2, exponential
/// smoothstep bridges in between.
double cutoff_chi(double x);

struct BumpSpec {
  double R = 1.0;
  /// Both unset selects equal automatic amplitudes; both must be set otherwise.
  std::optional<double> k1, k2;
  GridPtr grid;
};

/// Profile integrals of Q(r) = chi(r/R) entering the amplitude selection.
struct BumpIntegrals {
  double l2 = 0.0;    // ∫ r^2 Q^2 dr
  double grad = 0.0;  // ∫ r^2 Q'^2 dr (discrete gradient form)
  double l4 = 0.0;    // ∫ r^2 Q^4 dr
  /// (l2/2 + grad) / l4: the value G(β,k1,k2) must reach.
  double ratio() const { return (0.5 * l2 + grad) / l4; }
};

BumpIntegrals bump_integrals(const RadialField& Q);

/// Q(r) = chi(r/R) on the grid; throws std::invalid_argument when the support
/// [R, 5R] does not stay clear of the last 5 cells.
RadialField bump_profile(double R, const GridPtr& grid);

/// Automatic amplitude k with k1 = k2 = k and G(β,k,k) = ratio. Requires β > -1.
double bump_auto_amplitude(const BumpIntegrals& integrals, const CouplingParams& params);

/// Data ((k1 Q, 0), (k2 Q, 0)).
State bump_data(const BumpSpec& spec, const CouplingParams& params);

/// Data ((λφ, 0), (λψ, 0)). Verifies the expected sign of K and E < d at
/// construction and throws std::runtime_error when the ground state does not
/// deliver them; throws std::invalid_argument for λ <= 0.
State scaled_groundstate_data(const GroundState& gs, double lambda);

/// Data (λφ, cφ, λψ, cψ) with c = eps and λ > 1 chosen by bisection so that E = 0.
State zero_energy_data(const GroundState& gs, double eps);

/// Gaussian data (a e^{-r^2/w^2}, 0, b e^{-r^2/w^2}, 0).
State gaussian_data(const GridPtr& grid, double amplitude_u, double amplitude_v, double width);

}  // namespace kglab
