#include "kglab/functionals.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace kglab {

CouplingParams::CouplingParams(double b) : beta(b) {
  if (!std::isfinite(b)) throw std::invalid_argument("coupling: beta must be finite");
}

State::State(RadialField u_, RadialField ut_, RadialField v_, RadialField vt_, double t_)
    : u(std::move(u_)), ut(std::move(ut_)), v(std::move(v_)), vt(std::move(vt_)), t(t_) {
  require_same_grid(u, ut);
  require_same_grid(u, v);
  require_same_grid(u, vt);
  if (!std::isfinite(t)) throw std::invalid_argument("state: time must be finite");
}

State State::zeros(const GridPtr& grid, double t) {
  return State(RadialField::zeros(grid), RadialField::zeros(grid), RadialField::zeros(grid),
               RadialField::zeros(grid), t);
}

std::array<double, 12> FunctionalSnapshot::as_row() const {
  return {t, E, y, dy, d2y, P, K, J, kinetic, quartic, sup_u, sup_v};
}

void FunctionalSnapshot::write_csv_row(std::ostream& os) const {
  const auto row = as_row();
  os << std::setprecision(17);
  for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
  os << '\n';
}

double quartic_coupling(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  require_same_grid(u, v);
  const auto& grid = u.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i] * u[i];
    const double b = v[i] * v[i];
    s += grid.weight(i) * (a * a + b * b + 2.0 * params.beta * a * b);
  }
  return kOmega3 * s;
}

double kinetic(const State& s) { return inner_l2(s.ut, s.ut) + inner_l2(s.vt, s.vt); }

double energy(const State& s, const CouplingParams& params) {
  return 0.5 * (norm_h1_sq(s.u) + norm_h1_sq(s.v) + kinetic(s)) -
         0.25 * quartic_coupling(s.u, s.v, params);
}

double mass(const State& s) { return inner_l2(s.u, s.u) + inner_l2(s.v, s.v); }

double mass_derivative(const State& s) { return 2.0 * (inner_l2(s.u, s.ut) + inner_l2(s.v, s.vt)); }

double mass_second_derivative(const State& s, const CouplingParams& params) {
  return 2.0 * kinetic(s) - 2.0 * nehari(s.u, s.v, params);
}

double projection(const State& s, double mass_epsilon) {
  const double y = mass(s);
  if (y <= mass_epsilon) return 0.0;
  const double c = inner_l2(s.u, s.ut) + inner_l2(s.v, s.vt);
  return c * c / y;
}

double nehari(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  return norm_h1_sq(u) + norm_h1_sq(v) - quartic_coupling(u, v, params);
}

double action(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  return 0.5 * (norm_h1_sq(u) + norm_h1_sq(v)) - 0.25 * quartic_coupling(u, v, params);
}

double e1(const RadialField& u, const RadialField& v) { return 0.25 * (norm_h1_sq(u) + norm_h1_sq(v)); }

FunctionalSnapshot snapshot(const State& s, const CouplingParams& params) {
  FunctionalSnapshot f;
  const double h1 = norm_h1_sq(s.u) + norm_h1_sq(s.v);
  const double phi = quartic_coupling(s.u, s.v, params);
  const double kin = kinetic(s);
  const double y = mass(s);
  const double c = inner_l2(s.u, s.ut) + inner_l2(s.v, s.vt);
  f.t = s.t;
  f.kinetic = kin;
  f.quartic = phi;
  f.E = 0.5 * (h1 + kin) - 0.25 * phi;
  f.y = y;
  f.dy = 2.0 * c;
  f.K = h1 - phi;
  f.J = 0.5 * h1 - 0.25 * phi;
  f.d2y = 2.0 * kin - 2.0 * f.K;
  f.P = y <= kMassEpsilon ? 0.0 : c * c / y;
  f.sup_u = s.sup_u();
  f.sup_v = s.sup_v();
  return f;
}

Residual energy_nehari_identity_gap(const State& s, const CouplingParams& params, double gamma) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("identity gap: gamma must be finite");
  const double E = energy(s, params);
  const double K = nehari(s.u, s.v, params);
  const double kin = kinetic(s);
  const double h1 = norm_h1_sq(s.u) + norm_h1_sq(s.v);
  const double phi = quartic_coupling(s.u, s.v, params);
  const double lhs1 = 2.0 * (1.0 + gamma) * E;
  const double rhs1 = (1.0 + gamma) * kin;
  const double rhs2 = gamma * h1;
  const double rhs3 = 0.5 * (1.0 - gamma) * phi;
  Residual r;
  r.gap = std::abs(lhs1 - K - (rhs1 + rhs2 + rhs3));
  r.scale = std::abs(lhs1) + std::abs(K) + std::abs(rhs1) + std::abs(rhs2) + std::abs(rhs3);
  return r;
}

Residual energy_control_slack(const State& s, const CouplingParams& params, double gamma) {
  const double E = energy(s, params);
  const double K = nehari(s.u, s.v, params);
  const double kin = (1.0 + gamma) * kinetic(s);
  const double h1 = gamma * (norm_h1_sq(s.u) + norm_h1_sq(s.v));
  Residual r;
  // Signed: gap carries the slack, negative means the inequality fails.
  r.gap = 2.0 * (1.0 + gamma) * E - K - kin - h1;
  r.scale = std::abs(2.0 * (1.0 + gamma) * E) + std::abs(K) + std::abs(kin) + std::abs(h1);
  return r;
}

Residual action_split_gap(const RadialField& u, const RadialField& v, const CouplingParams& params) {
  const double J = action(u, v, params);
  const double K = nehari(u, v, params);
  const double E1 = e1(u, v);
  Residual r;
  r.gap = std::abs(J - 0.25 * K - E1);
  r.scale = std::abs(J) + 0.25 * std::abs(K) + std::abs(E1);
  return r;
}

namespace {

struct ProjectionParts {
  double y, c, P, remainder, grad;
};

ProjectionParts projection_parts(const State& s) {
  const double y = mass(s);
  if (y <= kMassEpsilon) throw std::domain_error("energy decomposition: zero mass");
  const double c = inner_l2(s.u, s.ut) + inner_l2(s.v, s.vt);
  const double ratio = c / y;
  const RadialField ru = s.ut - ratio * s.u;
  const RadialField rv = s.vt - ratio * s.v;
  return {y, c, c * c / y, inner_l2(ru, ru) + inner_l2(rv, rv), gradient_sq(s.u) + gradient_sq(s.v)};
}

}  // namespace

Residual energy_decomposition_gap(const State& s, const CouplingParams& params) {
  const auto parts = projection_parts(s);
  const double E = energy(s, params);
  const double phi = quartic_coupling(s.u, s.v, params);
  const double t1 = 0.5 * (parts.P + parts.y);
  const double t2 = 0.5 * (parts.remainder + parts.grad);
  const double t3 = 0.25 * phi;
  Residual r;
  r.gap = std::abs(E - t1 - t2 + t3);
  r.scale = std::abs(E) + std::abs(t1) + std::abs(t2) + std::abs(t3);
  return r;
}

double quarter_nehari_via_energy(const State& s, const CouplingParams& params) {
  const auto parts = projection_parts(s);
  const double E = energy(s, params);
  return E - 0.5 * parts.P - 0.25 * (parts.y + parts.grad) - 0.5 * parts.remainder;
}

double g_threshold(const CouplingParams& params, double k1, double k2) {
  const double a = k1 * k1;
  const double b = k2 * k2;
  if (a + b == 0.0) throw std::invalid_argument("g_threshold: amplitudes must not both vanish");
  return 0.5 * (a + b) - (1.0 - params.beta) * a * b / (a + b);
}

}  // namespace kglab
