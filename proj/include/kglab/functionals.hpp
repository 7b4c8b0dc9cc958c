#pragma once

/// @file functionals.hpp
/// @brief Scalar functionals of the coupled cubic Klein-Gordon system
///
///     u_tt - Δu + u = u^3 + β v^2 u,
///     v_tt - Δv + v = v^3 + β u^2 v,
///
/// evaluated on a discrete radial state, plus the algebraic identities between
/// them as computable residuals.

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>

#include "kglab/radial.hpp"

namespace kglab {

struct CouplingParams {
  double beta = 0.0;

  explicit CouplingParams(double b = 0.0);

  /// Negative/zero-energy criterion needs β >= -1.
  bool allows_energy_criterion() const { return beta >= -1.0; }
  /// Potential-well dichotomy and the minimization of d need β >= 0.
  bool allows_potential_well() const { return beta >= 0.0; }
};

/// Phase-space point (u, u_t, v, v_t) at time t.
struct State {
  RadialField u, ut, v, vt;
  double t = 0.0;

  State(RadialField u_, RadialField ut_, RadialField v_, RadialField vt_, double t_ = 0.0);

  static State zeros(const GridPtr& grid, double t = 0.0);

  const RadialGrid& grid() const { return u.grid(); }
  const GridPtr& grid_ptr() const { return u.grid_ptr(); }
  double sup_u() const { return u.sup_norm(); }
  double sup_v() const { return v.sup_norm(); }
};

struct FunctionalSnapshot {
  double t = 0.0;
  double E = 0.0;
  double y = 0.0;
  double dy = 0.0;
  double d2y = 0.0;
  double P = 0.0;
  double K = 0.0;
  double J = 0.0;
  double kinetic = 0.0;
  double quartic = 0.0;
  double sup_u = 0.0;
  double sup_v = 0.0;

  static constexpr std::string_view kCsvHeader = "t,E,y,dy,d2y,P,K,J,kinetic,quartic,sup_u,sup_v";
  std::array<double, 12> as_row() const;
  void write_csv_row(std::ostream& os) const;
};

/// Zero-mass cutoff for the projection functional.
inline constexpr double kMassEpsilon = 1e-30;

/// Φ[u,v] = ∫ (u^4 + v^4 + 2β u^2 v^2) dx.
double quartic_coupling(const RadialField& u, const RadialField& v, const CouplingParams& params);

double kinetic(const State& s);
double energy(const State& s, const CouplingParams& params);
double mass(const State& s);
double mass_derivative(const State& s);
double mass_second_derivative(const State& s, const CouplingParams& params);
double projection(const State& s, double mass_epsilon = kMassEpsilon);

/// K[u,v] = ||u||_{H^1}^2 + ||v||_{H^1}^2 - Φ[u,v].
double nehari(const RadialField& u, const RadialField& v, const CouplingParams& params);
/// J[u,v] = (||u||_{H^1}^2 + ||v||_{H^1}^2)/2 - Φ[u,v]/4.
double action(const RadialField& u, const RadialField& v, const CouplingParams& params);
/// E^1[u,v] = (||u||_{H^1}^2 + ||v||_{H^1}^2)/4.
double e1(const RadialField& u, const RadialField& v);

FunctionalSnapshot snapshot(const State& s, const CouplingParams& params);

/// Residual of an identity together with the sum of absolute values of its
/// terms, so that gap <= tol * scale is a dimensionless check.
struct Residual {
  double gap = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? gap / scale : gap; }
  bool within(double tol) const { return gap <= tol * scale; }
};

/// 2(1+γ)E - K = (1+γ)||(u_t,v_t)||^2 + γ||(u,v)||_{H^1}^2 + ((1-γ)/2)Φ.
Residual energy_nehari_identity_gap(const State& s, const CouplingParams& params, double gamma);

/// J = K/4 + E^1.
Residual action_split_gap(const RadialField& u, const RadialField& v, const CouplingParams& params);

/// E = (P+y)/2 + (||u_t - c u||^2 + ||v_t - c v||^2 + ||∇u||^2 + ||∇v||^2)/2 - Φ/4,
/// c = <(u,v),(u_t,v_t)>/y. Throws std::domain_error when y <= kMassEpsilon.
Residual energy_decomposition_gap(const State& s, const CouplingParams& params);

/// Right-hand side of K/4 written through E, P, y and the projection remainder
/// (the rewrite used at the first vanishing time of K); compare with nehari()/4.
double quarter_nehari_via_energy(const State& s, const CouplingParams& params);

/// G(β,k1,k2) = (k1^2+k2^2)/2 - (1-β) k1^2 k2^2 / (k1^2+k2^2).
double g_threshold(const CouplingParams& params, double k1, double k2);

/// Lemma-3.1 slack: 2(1+γ)E - K - (1+γ)·kinetic - γ·||(u,v)||_{H^1}^2, which
/// equals ((1-γ)/2)Φ and is non-negative for β >= -1 and γ <= 1.
Residual energy_control_slack(const State& s, const CouplingParams& params, double gamma);

}  // namespace kglab
