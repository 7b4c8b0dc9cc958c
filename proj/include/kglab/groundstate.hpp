#pragma once

/// @file groundstate.hpp
/// @brief Radial ground states of the stationary system
///
///     -Δφ + φ = φ^3 + β ψ^2 φ,   -Δψ + ψ = ψ^3 + β φ^2 ψ,
///
/// and the mountain-pass level d = min{ J : K = 0 } obtained by an
/// H^1-preconditioned gradient flow projected onto the Nehari manifold.

#include <string>
#include <vector>

#include "kglab/functionals.hpp"

namespace kglab {

enum class SeedProfile { Gaussian, Bump, Semitrivial, Symmetric };

std::string to_string(SeedProfile seed);
SeedProfile seed_from_string(const std::string& name);

struct MinimizeOptions {
  std::size_t max_iters = 4000;
  /// Pseudo-time step of the H^1 gradient flow, in (0, 1].
  double step_size = 1.0;
  double tol_residual = 1e-8;
  double tol_K = 1e-10;
  std::vector<SeedProfile> seeds = {SeedProfile::Semitrivial, SeedProfile::Symmetric,
                                    SeedProfile::Gaussian, SeedProfile::Bump};
  /// Apply schwarz_rearrange to both components for this many initial iterations.
  std::size_t rearrange_iters = 20;

  void validate() const;
};

struct GroundState {
  RadialField phi, psi;
  double d_level = 0.0;
  double residual = 0.0;
  double lambda0 = 1.0;
  double beta = 0.0;
  SeedProfile seed = SeedProfile::Semitrivial;
  std::size_t iterations = 0;
};

/// Outcome of one seeded flow, kept for diagnostics.
struct SeedRun {
  SeedProfile seed;
  bool converged = false;
  double J = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Positive decaying radial solution of -Δw + w = κ w^3 on the grid, by
/// shooting on w(0) followed by Newton polishing of the discrete equation.
/// Throws std::invalid_argument for κ <= 0 and std::runtime_error when the
/// shooting bracket or the polish fails.
RadialField shoot_scalar(const GridPtr& grid, double kappa);

/// sup-norm of the stationary equations' residual.
double stationary_residual(const RadialField& phi, const RadialField& psi, const CouplingParams& params);

/// Dilation λ0 = sqrt(||(u,v)||_{H^1}^2 / Φ[u,v]) with K[λ0 u, λ0 v] = 0.
/// Throws std::domain_error ("no Nehari crossing") when Φ <= 0.
double nehari_scale(const RadialField& u, const RadialField& v, const CouplingParams& params);

/// Dilation sqrt(2||(u,v)||_{H^1}^2 / Φ[u,v]) where J[λu, λv] changes sign.
double action_sign_scale(const RadialField& u, const RadialField& v, const CouplingParams& params);

struct DCandidates {
  double semitrivial = 0.0;
  double symmetric = 0.0;
  double min() const { return semitrivial < symmetric ? semitrivial : symmetric; }
};

/// Levels of the explicit critical points (w, 0) and (w, w)/sqrt(1+β) built
/// from w = shoot_scalar(grid, 1). Requires β > -1.
DCandidates d_candidates(const CouplingParams& params, const RadialField& w);

/// Minimizes J on the Nehari manifold from several seeds; returns the lowest
/// converged critical point. Requires β >= 0. Throws std::runtime_error when
/// no seed converges within max_iters.
GroundState minimize_d(const CouplingParams& params, const GridPtr& grid, const MinimizeOptions& opts,
                       std::vector<SeedRun>* runs = nullptr);

/// Flow from an explicit starting pair (rescaled onto K = 0 first).
GroundState minimize_from(const CouplingParams& params, RadialField u, RadialField v,
                          const MinimizeOptions& opts, SeedProfile label, SeedRun* run = nullptr);

void write_groundstate_csv(std::ostream& os, const GroundState& gs);

}  // namespace kglab
