#include "kglab/data_factory.hpp"

#include <cmath>
#include <stdexcept>

#include "kglab/dynamics.hpp"

namespace kglab {

namespace {

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double cutoff_chi(double x) {
  const double d = std::abs(x - 3.0);
  if (d <= 1.0) return 1.0;
  if (d >= 2.0) return 0.0;
  return smoothstep(2.0 - d);
}

BumpIntegrals bump_integrals(const RadialField& Q) {
  const auto& grid = Q.grid();
  BumpIntegrals b;
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const double q2 = Q[i] * Q[i];
    b.l2 += grid.weight(i) * q2;
    b.l4 += grid.weight(i) * q2 * q2;
  }
  b.grad = gradient_sq(Q) / kOmega3;
  return b;
}

RadialField bump_profile(double R, const GridPtr& grid) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("bump: R must be > 0");
  if (5.0 * R > grid->node(grid->size() - kBoundaryGuardCells)) {
    throw std::invalid_argument("bump: grid too small for support [R, 5R]; need r_max > 5R + 5 cells");
  }
  return RadialField::sample(grid, [R](double r) { return cutoff_chi(r / R); });
}

double bump_auto_amplitude(const BumpIntegrals& integrals, const CouplingParams& params) {
  if (!(params.beta > -1.0)) throw std::invalid_argument("bump: automatic amplitudes need beta > -1");
  if (!(integrals.l4 > 0.0)) throw std::invalid_argument("bump: profile vanishes on the grid");
  // G(β,k,k) = k^2 (1+β)/2.
  return std::sqrt(2.0 * integrals.ratio() / (1.0 + params.beta));
}

State bump_data(const BumpSpec& spec, const CouplingParams& params) {
  if (!spec.grid) throw std::invalid_argument("bump: missing grid");
  const RadialField Q = bump_profile(spec.R, spec.grid);
  double k1 = 0.0, k2 = 0.0;
  if (!spec.k1 && !spec.k2) {
    k1 = k2 = bump_auto_amplitude(bump_integrals(Q), params);
  } else if (spec.k1 && spec.k2) {
    k1 = *spec.k1;
    k2 = *spec.k2;
    if (k1 == 0.0 && k2 == 0.0) throw std::invalid_argument("bump: amplitudes must not both vanish");
  } else {
    throw std::invalid_argument("bump: set both k1 and k2, or neither for automatic amplitudes");
  }
  const RadialField zero = RadialField::zeros(spec.grid);
  return State(k1 * Q, zero, k2 * Q, zero, 0.0);
}

State scaled_groundstate_data(const GroundState& gs, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("scaled data: lambda must be > 0");
  const CouplingParams params(gs.beta);
  const RadialField zero = RadialField::zeros(gs.phi.grid_ptr());
  State s(lambda * gs.phi, zero, lambda * gs.psi, zero, 0.0);
  if (std::abs(lambda - 1.0) < 1e-12) return s;

  const double K = nehari(s.u, s.v, params);
  const double E = energy(s, params);
  const double h1 = norm_h1_sq(s.u) + norm_h1_sq(s.v);
  const double tol = 1e-10 * (h1 + std::abs(gs.d_level));
  const bool sign_ok = lambda < 1.0 ? K > -tol : K < tol;
  if (!sign_ok || !(E < gs.d_level + tol)) {
    throw std::runtime_error("scaled data: ground state does not produce the expected K sign / E < d");
  }
  return s;
}

State zero_energy_data(const GroundState& gs, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("zero-energy data: eps must be > 0");
  const CouplingParams params(gs.beta);
  const double h1 = norm_h1_sq(gs.phi) + norm_h1_sq(gs.psi);
  const double quartic = quartic_coupling(gs.phi, gs.psi, params);
  const double m = inner_l2(gs.phi, gs.phi) + inner_l2(gs.psi, gs.psi);
  if (!(h1 > 0.0) || !(quartic > 0.0)) throw std::runtime_error("zero-energy data: degenerate ground state");

  const double c = eps;
  auto E = [&](double lam) {
    return 0.5 * c * c * m + 0.5 * lam * lam * h1 - 0.25 * lam * lam * lam * lam * quartic;
  };
  double lo = 1.0, hi = 2.0;
  if (!(E(lo) > 0.0)) throw std::runtime_error("zero-energy data: E(1) is not positive");
  for (int i = 0; i < 200 && E(hi) >= 0.0; ++i) hi *= 2.0;
  if (!(E(hi) < 0.0)) throw std::runtime_error("zero-energy data: bisection bracket failure");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (E(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lam = std::abs(E(lo)) < std::abs(E(hi)) ? lo : hi;

  State s(lam * gs.phi, c * gs.phi, lam * gs.psi, c * gs.psi, 0.0);
  const double scale = 0.5 * (lam * lam * h1 + c * c * m) + 0.25 * lam * lam * lam * lam * quartic;
  if (!(std::abs(energy(s, params)) <= 1e-10 * scale)) {
    throw std::runtime_error("zero-energy data: energy residual above tolerance");
  }
  return s;
}

State gaussian_data(const GridPtr& grid, double amplitude_u, double amplitude_v, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian data: width must be > 0");
  const auto g = RadialField::sample(grid, [width](double r) { return std::exp(-r * r / (width * width)); });
  const RadialField zero = RadialField::zeros(grid);
  return State(amplitude_u * g, zero, amplitude_v * g, zero, 0.0);
}

}  // namespace kglab
