#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "kglab/data_factory.hpp"
#include "kglab/dynamics.hpp"

using namespace kglab;

namespace {

double outer_max(const State& s) {
  double m = 0.0;
  const std::size_t n = s.u.size();
  for (std::size_t i = n - kBoundaryGuardCells; i < n; ++i) {
    m = std::max({m, std::abs(s.u[i]), std::abs(s.ut[i]), std::abs(s.v[i]), std::abs(s.vt[i])});
  }
  return m;
}

}  // namespace

TEST_CASE("cutoff_chi") {
  CHECK(cutoff_chi(3.0) == 1.0);
  CHECK(cutoff_chi(2.0) == 1.0);
  CHECK(cutoff_chi(4.0) == 1.0);
  CHECK(cutoff_chi(5.5) == 0.0);
  CHECK(cutoff_chi(0.5) == 0.0);
  CHECK(cutoff_chi(1.0) == 0.0);
  CHECK(cutoff_chi(5.0) == 0.0);
  CHECK(cutoff_chi(1.5) > 0.0);
  CHECK(cutoff_chi(1.5) < 1.0);
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double x = 1.0 + 0.01 * k;
    CHECK(cutoff_chi(x) >= prev);
    prev = cutoff_chi(x);
  }
}

TEST_CASE("bump data") {
  const GridPtr g = build_grid(40.0, 4096);
  const CouplingParams p(1.0);
  const State s = bump_data(BumpSpec{5.0, std::nullopt, std::nullopt, g}, p);
  CHECK(mass_derivative(s) == 0.0);
  CHECK(projection(s) == 0.0);
  CHECK(mass(s) > 0.0);
  CHECK(outer_max(s) <= 1e-14);

  const double E0 = energy(s, p);
  CHECK(E0 > 2.0 / 3.0 * kOmega3 * 125.0);
  // Automatic amplitudes sit exactly on y/4 + P/2 = E.
  CHECK(E0 == doctest::Approx(0.25 * mass(s) + 0.5 * projection(s)).epsilon(1e-12));

  const RadialField Q = bump_profile(5.0, g);
  const BumpIntegrals bi = bump_integrals(Q);
  const std::size_t mid = static_cast<std::size_t>(15.0 / g->dr());  // r = 3R, inside the plateau
  const double k = s.u[mid] / Q[mid];
  CHECK(g_threshold(p, k, k) == doctest::Approx(bi.ratio()).epsilon(1e-12));
}

TEST_CASE("bump energy is cubic plus linear in R") {
  // With automatic amplitudes E(0) = y/4 = omega l2 (l2/2 + grad) / ((1+beta) l4), where l2, l4 scale
  // like R^3 and grad like R, so E(R) = a R^3 + c R with a, c > 0.
  const GridPtr g = build_grid(60.0, 6144);
  const CouplingParams p(0.5);
  auto E = [&](double R) { return energy(bump_data(BumpSpec{R, std::nullopt, std::nullopt, g}, p), p); };
  const double e1 = E(2.5), e2 = E(5.0), e3 = E(10.0);
  // Solve for a, c from R = 2.5 and 5, predict R = 10.
  const double a = (e2 / 5.0 - e1 / 2.5) / (25.0 - 6.25);
  const double c = e1 / 2.5 - a * 6.25;
  CHECK(a > 0.0);
  CHECK(c > 0.0);
  CHECK(e3 == doctest::Approx(a * 1000.0 + c * 10.0).epsilon(1e-3));
  for (auto [R, e] : {std::pair{2.5, e1}, {5.0, e2}, {10.0, e3}}) CHECK(e > 2.0 / 3.0 * kOmega3 * R * R * R);
  CHECK(e2 / e1 < e3 / e2);
  CHECK(e3 / e2 < 8.0);
}

TEST_CASE("bump data errors and manual amplitudes") {
  const GridPtr g = build_grid(40.0, 2048);
  const CouplingParams p(1.0);
  CHECK_THROWS_AS(bump_data(BumpSpec{8.0, std::nullopt, std::nullopt, g}, p), std::invalid_argument);
  CHECK_THROWS_AS(bump_data(BumpSpec{0.0, std::nullopt, std::nullopt, g}, p), std::invalid_argument);
  CHECK_THROWS_AS(bump_data(BumpSpec{5.0, 1.0, std::nullopt, g}, p), std::invalid_argument);
  CHECK_THROWS_AS(bump_data(BumpSpec{5.0, 0.0, 0.0, g}, p), std::invalid_argument);
  CHECK_THROWS_AS(bump_data(BumpSpec{5.0, std::nullopt, std::nullopt, g}, CouplingParams(-1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(bump_data(BumpSpec{5.0, std::nullopt, std::nullopt, nullptr}, p), std::invalid_argument);

  const State s = bump_data(BumpSpec{5.0, 0.3, 0.0, g}, p);
  CHECK(s.v.sup_norm() == 0.0);
  CHECK(s.u.sup_norm() == doctest::Approx(0.3));
}

TEST_CASE("scaled ground-state data") {
  const GroundState& gs = testgen::cached_ground_state(1.0);
  const CouplingParams p(1.0);
  const double d = gs.d_level;

  const State w = scaled_groundstate_data(gs, 0.5);
  CHECK(nehari(w.u, w.v, p) > 0.0);
  CHECK(energy(w, p) > 0.0);
  CHECK(energy(w, p) < d);

  const State e = scaled_groundstate_data(gs, 1.1);
  CHECK(nehari(e.u, e.v, p) < 0.0);
  CHECK(energy(e, p) < d);

  const State neg = scaled_groundstate_data(gs, 3.0);
  CHECK(energy(neg, p) < 0.0);
  CHECK(outer_max(neg) <= 1e-14);

  CHECK_THROWS_AS(scaled_groundstate_data(gs, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scaled_groundstate_data(gs, -1.0), std::invalid_argument);

  // A pair off the Nehari manifold is not a usable ground state.
  GroundState fake = gs;
  fake.phi = 2.0 * gs.phi;
  fake.psi = 2.0 * gs.psi;
  CHECK_THROWS_AS(scaled_groundstate_data(fake, 0.9), std::runtime_error);
}

TEST_CASE("zero-energy data") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> eps(1e-3, 3.0);
  for (double b : {0.0, 1.0, 2.0}) {
    const GroundState& gs = testgen::cached_ground_state(b);
    const CouplingParams p(b);
    for (int k = 0; k < 5; ++k) {
      const State s = zero_energy_data(gs, eps(rng));
      const double scale = norm_h1_sq(s.u) + norm_h1_sq(s.v) + kinetic(s) + quartic_coupling(s.u, s.v, p);
      CHECK(std::abs(energy(s, p)) <= 1e-10 * scale);
      CHECK(mass_derivative(s) > 0.0);
      CHECK(nehari(s.u, s.v, p) < 0.0);
      CHECK(outer_max(s) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(zero_energy_data(testgen::cached_ground_state(1.0), 0.0), std::invalid_argument);
}

TEST_CASE("negative and zero-energy factory outputs have K < 0") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lam(std::sqrt(2.0) * 1.001, 5.0), eps(1e-4, 4.0);
  const double betas[] = {0.0, 1.0, 2.0};
  for (int k = 0; k < 30; ++k) {
    const double b = betas[k % 3];
    const GroundState& gs = testgen::cached_ground_state(b);
    const CouplingParams p(b);
    const State neg = scaled_groundstate_data(gs, lam(rng));
    CHECK(energy(neg, p) < 0.0);
    CHECK(nehari(neg.u, neg.v, p) < 0.0);
    const State zero = zero_energy_data(gs, eps(rng));
    CHECK(nehari(zero.u, zero.v, p) < 0.0);
  }
}

TEST_CASE("gaussian data") {
  const GridPtr g = build_grid(10.0, 128);
  const State s = gaussian_data(g, 2.0, -1.0, 1.5);
  CHECK(s.u[0] == doctest::Approx(2.0 * std::exp(-g->node(0) * g->node(0) / 2.25)));
  CHECK(s.v[0] == doctest::Approx(-std::exp(-g->node(0) * g->node(0) / 2.25)));
  CHECK(s.ut.sup_norm() == 0.0);
  CHECK_THROWS_AS(gaussian_data(g, 1.0, 1.0, 0.0), std::invalid_argument);
}
