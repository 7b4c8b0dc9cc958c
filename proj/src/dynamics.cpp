#include "kglab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace kglab {

void SimOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sim.dt: must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("sim.t_end: must be > 0");
  if (snapshot_every == 0) throw std::invalid_argument("sim.snapshot_every: must be >= 1");
  if (!(sup_threshold > 1.0)) throw std::invalid_argument("sim.sup_threshold: must be > 1");
  if (dt_min < 0.0 || effective_dt_min() > dt) {
    throw std::invalid_argument("sim.dt_min: must satisfy 0 < dt_min <= dt");
  }
  if (!std::isfinite(gamma_levine)) throw std::invalid_argument("sim.gamma_levine: must be finite");
}

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Completed: return "Completed";
    case OutcomeKind::BlowUpDetected: return "BlowUpDetected";
    case OutcomeKind::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

namespace {

// Flat working copy of a state plus its cached acceleration.
struct Phase {
  std::vector<double> u, ut, v, vt, au, av;
  double t = 0.0;
};

void accelerate(const RadialGrid& grid, double beta, Phase& p) {
  laplacian3d_into(grid, p.u, p.au);
  laplacian3d_into(grid, p.v, p.av);
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    const double u = p.u[i];
    const double v = p.v[i];
    p.au[i] += -u + u * u * u + beta * v * v * u;
    p.av[i] += -v + v * v * v + beta * u * u * v;
  }
}

Phase to_phase(const State& s, double beta) {
  auto copy = [](const RadialField& f) { return std::vector<double>(f.values().begin(), f.values().end()); };
  Phase p{copy(s.u), copy(s.ut), copy(s.v), copy(s.vt), {}, {}, s.t};
  p.au.resize(p.u.size());
  p.av.resize(p.u.size());
  accelerate(s.grid(), beta, p);
  return p;
}

State to_state(const Phase& p, const GridPtr& grid) {
  return State(RadialField(grid, p.u), RadialField(grid, p.ut), RadialField(grid, p.v),
               RadialField(grid, p.vt), p.t);
}

void verlet(const RadialGrid& grid, double beta, Phase& p, double dt) {
  const double half = 0.5 * dt;
  const std::size_t n = p.u.size();
  for (std::size_t i = 0; i < n; ++i) {
    p.ut[i] += half * p.au[i];
    p.vt[i] += half * p.av[i];
    p.u[i] += dt * p.ut[i];
    p.v[i] += dt * p.vt[i];
  }
  accelerate(grid, beta, p);
  for (std::size_t i = 0; i < n; ++i) {
    p.ut[i] += half * p.au[i];
    p.vt[i] += half * p.av[i];
  }
  p.t += dt;
}

// Returns the largest |u|, |v| or NaN when any component is not finite.
double sup_or_nan(const Phase& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    const double a = std::max(std::abs(p.u[i]), std::abs(p.v[i]));
    const double b = std::max(std::abs(p.ut[i]), std::abs(p.vt[i]));
    if (!std::isfinite(a) || !std::isfinite(b)) return std::nan("");
    m = std::max(m, a);
  }
  return m;
}

bool growing(const std::vector<FunctionalSnapshot>& snaps) {
  if (snaps.size() < 3) return false;
  auto sup = [](const FunctionalSnapshot& s) { return std::max(s.sup_u, s.sup_v); };
  const auto n = snaps.size();
  return sup(snaps[n - 1]) > sup(snaps[n - 2]) && sup(snaps[n - 2]) > sup(snaps[n - 3]);
}

// Least-squares line through (t, 1/sup); returns its root when the slope is negative.
std::optional<double> extrapolate_blowup(const std::deque<std::pair<double, double>>& history) {
  if (history.size() < 3) return std::nullopt;
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(history.size());
  const double t0 = history.back().first;
  for (const auto& [t, sup] : history) {
    if (!(sup > 0.0)) return std::nullopt;
    const double x = t - t0;
    const double y = 1.0 / sup;
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
  }
  const double den = n * stt - st * st;
  if (den <= 0.0) return std::nullopt;
  const double slope = (n * sty - st * sy) / den;
  const double intercept = (sy - slope * st) / n;
  if (!(slope < 0.0)) return std::nullopt;
  const double root = t0 - intercept / slope;
  if (!std::isfinite(root)) return std::nullopt;
  return root;
}

}  // namespace

Acceleration rhs(const State& s, const CouplingParams& params) {
  Phase p = to_phase(s, params.beta);
  return {RadialField(s.grid_ptr(), std::move(p.au)), RadialField(s.grid_ptr(), std::move(p.av))};
}

std::optional<State> step_leapfrog(const State& s, double dt, const CouplingParams& params) {
  if (!std::isfinite(dt) || dt == 0.0) throw std::invalid_argument("step_leapfrog: dt must be finite and nonzero");
  Phase p = to_phase(s, params.beta);
  verlet(s.grid(), params.beta, p, dt);
  if (std::isnan(sup_or_nan(p))) return std::nullopt;
  return to_state(p, s.grid_ptr());
}

bool touches_boundary(const State& s) {
  const std::size_t n = s.grid().size();
  for (std::size_t i = n - kBoundaryGuardCells; i < n; ++i) {
    if (std::abs(s.u[i]) > kSupportThreshold || std::abs(s.v[i]) > kSupportThreshold) return true;
  }
  return false;
}

namespace {

bool phase_touches_boundary(const Phase& p) {
  const std::size_t n = p.u.size();
  for (std::size_t i = n - kBoundaryGuardCells; i < n; ++i) {
    if (std::abs(p.u[i]) > kSupportThreshold || std::abs(p.v[i]) > kSupportThreshold) return true;
  }
  return false;
}

}  // namespace

SimResult simulate(const State& s0, const CouplingParams& params, const SimOptions& opts) {
  opts.validate();
  const GridPtr& grid = s0.grid_ptr();
  const double beta = params.beta;
  const double dt_min = opts.effective_dt_min();
  const double t_end = s0.t + opts.t_end;

  SimResult result;
  Phase cur = to_phase(s0, beta);
  Phase next = cur;
  result.snapshots.push_back(snapshot(s0, params));
  result.trusted = !phase_touches_boundary(cur);
  const double e0 = result.snapshots.front().E;

  auto record = [&](const Phase& p) {
    const State st = to_state(p, grid);
    result.snapshots.push_back(snapshot(st, params));
    const double e = result.snapshots.back().E;
    const double drift = std::abs(e - e0) / std::max(1.0, std::abs(e0));
    result.energy_drift = std::max(result.energy_drift, drift);
    if (phase_touches_boundary(p)) result.trusted = false;
  };

  constexpr std::size_t kFitPoints = 10;
  std::deque<std::pair<double, double>> history;
  history.emplace_back(cur.t, sup_or_nan(cur));

  double dt = opts.dt;
  std::size_t since_snapshot = 0;
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));

  auto finish_blowup = [&](std::string reason) {
    if (result.snapshots.back().t < cur.t) record(cur);
    result.outcome.kind = OutcomeKind::BlowUpDetected;
    result.outcome.t = cur.t;
    result.outcome.reason = std::move(reason);
    if (auto root = extrapolate_blowup(history); root && *root >= cur.t - t_eps) {
      result.outcome.extrapolated = true;
      result.outcome.t_star_extrapolated = *root;
    }
  };

  while (cur.t < t_end - t_eps) {
    const double h = std::min(dt, t_end - cur.t);
    next = cur;
    verlet(*grid, beta, next, h);
    const double sup = sup_or_nan(next);
    const bool finite = !std::isnan(sup);

    const bool resolved = !(h * sup > kStepAmplitudeBound);
    if (finite && sup <= opts.sup_threshold && resolved) {
      std::swap(cur, next);
      ++result.steps;
      history.emplace_back(cur.t, sup);
      if (history.size() > kFitPoints) history.pop_front();
      if (++since_snapshot >= opts.snapshot_every) {
        record(cur);
        since_snapshot = 0;
      }
      continue;
    }
    if (dt * 0.5 >= dt_min) {
      dt *= 0.5;
      continue;
    }
    const bool grows = growing(result.snapshots);
    if (finite && sup > opts.sup_threshold) {
      finish_blowup("sup-norm above threshold at dt_min");
    } else if (grows) {
      finish_blowup(finite ? "step unresolved at dt_min while growing" : "non-finite state at dt_min after growth");
    } else {
      if (result.snapshots.back().t < cur.t) record(cur);
      result.outcome.kind = OutcomeKind::StepFailure;
      result.outcome.t = cur.t;
      result.outcome.reason = finite ? "step unresolved at dt_min" : "non-finite state persists at dt_min";
    }
    break;
  }

  if (result.outcome.kind == OutcomeKind::Completed && result.outcome.reason.empty()) {
    if (result.snapshots.back().t < cur.t) record(cur);
    result.outcome.t = cur.t;
  }
  result.dt_final = dt;
  return result;
}

std::vector<double> levine_indicator(std::span<const FunctionalSnapshot> series, double gamma) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(s.d2y * s.y - gamma * s.dy * s.dy);
  return out;
}

bool levine_conditions_met(std::span<const FunctionalSnapshot> series, double gamma, std::size_t segment) {
  if (segment == 0 || series.size() < segment) return false;
  const auto tail = series.subspan(series.size() - segment);
  const auto ind = levine_indicator(tail, gamma);
  for (std::size_t i = 0; i < tail.size(); ++i) {
    if (!(ind[i] > 0.0 && tail[i].y > 0.0 && tail[i].dy > 0.0)) return false;
  }
  return true;
}

}  // namespace kglab
