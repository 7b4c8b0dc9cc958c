#include "kglab/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "kglab/data_factory.hpp"

namespace kglab {

std::string to_string(SeedProfile seed) {
  switch (seed) {
    case SeedProfile::Gaussian: return "gaussian";
    case SeedProfile::Bump: return "bump";
    case SeedProfile::Semitrivial: return "semitrivial";
    case SeedProfile::Symmetric: return "symmetric";
  }
  return "unknown";
}

SeedProfile seed_from_string(const std::string& name) {
  if (name == "gaussian") return SeedProfile::Gaussian;
  if (name == "bump") return SeedProfile::Bump;
  if (name == "semitrivial") return SeedProfile::Semitrivial;
  if (name == "symmetric") return SeedProfile::Symmetric;
  throw std::invalid_argument("unknown seed profile '" + name + "'");
}

void MinimizeOptions::validate() const {
  if (max_iters == 0) throw std::invalid_argument("groundstate.max_iters: must be >= 1");
  if (!(step_size > 0.0 && step_size <= 1.0)) throw std::invalid_argument("groundstate.step_size: must be in (0, 1]");
  if (!(tol_residual > 0.0)) throw std::invalid_argument("groundstate.tol_residual: must be > 0");
  if (!(tol_K > 0.0)) throw std::invalid_argument("groundstate.tol_K: must be > 0");
  if (seeds.empty()) throw std::invalid_argument("groundstate.seeds: need at least one seed");
}

namespace {

// Bands of the matrix of -laplacian3d.
struct Bands {
  std::vector<double> lower, diag, upper;
};

Bands neg_laplacian_bands(const RadialGrid& grid) {
  const std::size_t n = grid.size();
  Bands b{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.weight(i);
    const double c_out = grid.face_coefficient(i);
    const double c_in = i == 0 ? 0.0 : grid.face_coefficient(i - 1);
    b.diag[i] = ((i + 1 < n ? 1.0 : 2.0) * c_out + c_in) / w;
    if (i + 1 < n) b.upper[i] = -c_out / w;
    if (i > 0) b.lower[i] = -c_in / w;
  }
  return b;
}

enum class Shot { Undershoot, Overshoot, Undecided };

// Marches the discrete radial equation outward from w(0) = w0. Returns the
// classification and, in `profile`, the values up to the first departure.
Shot march(const RadialGrid& grid, double kappa, double w0, std::vector<double>& profile) {
  const std::size_t n = grid.size();
  const double h = grid.dr();
  profile.assign(n, 0.0);
  profile[0] = w0;
  double prev = w0;  // even ghost
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r = grid.node(i);
    const double w = profile[i];
    const double next = ((2.0 + h * h * (1.0 - kappa * w * w)) * w - (1.0 - h / r) * prev) / (1.0 + h / r);
    if (next < 0.0) return Shot::Overshoot;
    if (next > w) return Shot::Undershoot;
    profile[i + 1] = next;
    prev = w;
  }
  return Shot::Undecided;
}

std::vector<double> scalar_residual(const RadialGrid& grid, double kappa, const std::vector<double>& w) {
  std::vector<double> res(w.size());
  laplacian3d_into(grid, w, res);
  for (std::size_t i = 0; i < w.size(); ++i) res[i] = -res[i] + w[i] - kappa * w[i] * w[i] * w[i];
  return res;
}

double sup_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double a : x) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

RadialField shoot_scalar(const GridPtr& grid, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("shoot_scalar: kappa must be > 0");
  const double scale = 1.0 / std::sqrt(kappa);
  double lo = scale;  // w(0) <= 1/sqrt(kappa) never turns down
  double hi = 16.0 * scale;
  std::vector<double> profile;
  if (march(*grid, kappa, hi, profile) != Shot::Overshoot) {
    throw std::runtime_error("shoot_scalar: could not bracket w(0); grid too coarse?");
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Shot s = march(*grid, kappa, mid, profile);
    if (s == Shot::Undecided) {
      lo = hi = mid;
      break;
    }
    (s == Shot::Overshoot ? hi : lo) = mid;
  }
  march(*grid, kappa, lo, profile);

  // Newton polish of -Δw + w - κw^3 = 0 with the truncated shot as initial guess.
  std::vector<double> w = std::move(profile);
  const Bands base = neg_laplacian_bands(*grid);
  double res = sup_abs(scalar_residual(*grid, kappa, w));
  for (int it = 0; it < 50 && res > 1e-13 * scale; ++it) {
    std::vector<double> rhs = scalar_residual(*grid, kappa, w);
    for (double& x : rhs) x = -x;
    Bands jac = base;
    for (std::size_t i = 0; i < w.size(); ++i) jac.diag[i] += 1.0 - 3.0 * kappa * w[i] * w[i];
    const auto delta = solve_tridiagonal(jac.lower, jac.diag, jac.upper, rhs);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += delta[i];
    res = sup_abs(scalar_residual(*grid, kappa, w));
  }
  if (!(res <= 1e-9 * scale)) throw std::runtime_error("shoot_scalar: Newton polish did not converge");
  if (!(w.back() <= 1e-6 * w.front())) {
    throw std::runtime_error("shoot_scalar: r_max too small for a decaying ground state");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || (i > 0 && w[i] > w[i - 1])) {
      throw std::runtime_error("shoot_scalar: polished profile is not positive and decreasing");
    }
  }
  return RadialField(grid, std::move(w));
}

double stationary_residual(const RadialField& phi, const RadialField& psi, const CouplingParams& params) {
  require_same_grid(phi, psi);
  const auto lp = laplacian3d(phi);
  const auto ls = laplacian3d(psi);
  double m = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = phi[i], b = psi[i];
    m = std::max(m, std::abs(-lp[i] + a - a * a * a - params.beta * b * b * a));
    m = std::max(m, std::abs(-ls[i] + b - b * b * b - params.beta * a * a * b));
  }
  return m;
}

double nehari_scale(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  const double h1 = norm_h1_sq(u) + norm_h1_sq(v);
  const double phi = quartic_coupling(u, v, params);
  if (!(h1 > 0.0)) throw std::domain_error("nehari_scale: zero input");
  if (!(phi > 0.0)) throw std::domain_error("nehari_scale: no Nehari crossing (quartic term <= 0)");
  return std::sqrt(h1 / phi);
}

double action_sign_scale(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  return std::sqrt(2.0) * nehari_scale(u, v, params);
}

DCandidates d_candidates(const CouplingParams& params, const RadialField& w) {
  if (!(params.beta > -1.0)) throw std::invalid_argument("d_candidates: requires beta > -1");
  const double w4 = integrate(map(w, [](double x) { return x * x * x * x; }));
  return {0.25 * w4, w4 / (2.0 * (1.0 + params.beta))};
}

GroundState minimize_from(const CouplingParams& params, RadialField u0, RadialField v0,
                          const MinimizeOptions& opts, SeedProfile label, SeedRun* run) {
  opts.validate();
  require_same_grid(u0, v0);
  const GridPtr grid = u0.grid_ptr();
  const double beta = params.beta;
  const double tau = opts.step_size;

  double lam = nehari_scale(u0, v0, params);
  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> v(v0.values().begin(), v0.values().end());
  for (auto& x : u) x *= lam;
  for (auto& x : v) x *= lam;

  const std::size_t n = u.size();
  std::vector<double> nu(n), nv(n);
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t it = 0;
  for (;; ++it) {
    const RadialField fu(grid, u), fv(grid, v);
    residual = stationary_residual(fu, fv, params);
    const double K = nehari(fu, fv, params);
    const double scale = norm_h1_sq(fu) + norm_h1_sq(fv);
    if (it >= opts.rearrange_iters && residual <= opts.tol_residual && std::abs(K) <= opts.tol_K * scale) {
      converged = true;
      break;
    }
    if (it >= opts.max_iters) break;

    for (std::size_t i = 0; i < n; ++i) {
      nu[i] = u[i] * u[i] * u[i] + beta * v[i] * v[i] * u[i];
      nv[i] = v[i] * v[i] * v[i] + beta * u[i] * u[i] * v[i];
    }
    // H^1 gradient of J is (u - L^{-1} N_u, v - L^{-1} N_v) with L = -Δ + 1.
    const auto gu = solve_shifted_laplacian(*grid, 1.0, nu);
    const auto gv = solve_shifted_laplacian(*grid, 1.0, nv);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = (1.0 - tau) * u[i] + tau * gu[i];
      v[i] = (1.0 - tau) * v[i] + tau * gv[i];
    }
    RadialField nu_f(grid, u), nv_f(grid, v);
    if (it < opts.rearrange_iters) {
      nu_f = schwarz_rearrange(nu_f);
      nv_f = schwarz_rearrange(nv_f);
    }
    lam = nehari_scale(nu_f, nv_f, params);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = lam * nu_f[i];
      v[i] = lam * nv_f[i];
    }
  }

  GroundState gs{RadialField(grid, u), RadialField(grid, v), 0.0, residual, 1.0, beta, label, it};
  gs.d_level = action(gs.phi, gs.psi, params);
  gs.lambda0 = nehari_scale(gs.phi, gs.psi, params);
  if (run) *run = SeedRun{label, converged, gs.d_level, residual, it};
  if (!converged) {
    throw std::runtime_error("minimize_d: seed '" + to_string(label) + "' did not converge (residual " +
                             std::to_string(residual) + ")");
  }
  return gs;
}

GroundState minimize_d(const CouplingParams& params, const GridPtr& grid, const MinimizeOptions& opts,
                       std::vector<SeedRun>* runs) {
  if (!params.allows_potential_well()) {
    throw std::invalid_argument("minimize_d: requires beta >= 0");
  }
  opts.validate();
  const RadialField w = shoot_scalar(grid, 1.0);
  const RadialField zero = RadialField::zeros(grid);

  std::optional<GroundState> best;
  std::string failures;
  for (SeedProfile seed : opts.seeds) {
    RadialField u = zero, v = zero;
    switch (seed) {
      case SeedProfile::Semitrivial:
        u = w;
        break;
      case SeedProfile::Symmetric:
        u = (1.0 / std::sqrt(1.0 + params.beta)) * w;
        v = u;
        break;
      case SeedProfile::Gaussian:
        u = RadialField::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
        v = RadialField::sample(grid, [](double r) { return 0.6 * std::exp(-r * r / 3.0); });
        break;
      case SeedProfile::Bump:
        u = RadialField::sample(grid, [](double r) { return cutoff_chi(r); });
        v = RadialField::sample(grid, [](double r) { return 0.8 * cutoff_chi(0.8 * r); });
        break;
    }
    SeedRun run{seed};
    try {
      GroundState gs = minimize_from(params, std::move(u), std::move(v), opts, seed, &run);
      if (!best || gs.d_level < best->d_level) best = std::move(gs);
    } catch (const std::exception& e) {
      failures += std::string(failures.empty() ? "" : "; ") + e.what();
    }
    if (runs) runs->push_back(run);
  }
  if (!best) throw std::runtime_error("minimize_d: no seed converged: " + failures);
  return std::move(*best);
}

void write_groundstate_csv(std::ostream& os, const GroundState& gs) {
  os << "r,phi,psi\n" << std::setprecision(17);
  for (std::size_t i = 0; i < gs.phi.size(); ++i) {
    os << gs.phi.grid().node(i) << ',' << gs.phi[i] << ',' << gs.psi[i] << '\n';
  }
}

}  // namespace kglab
