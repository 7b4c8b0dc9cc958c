#pragma once

// Ground states shared across test files; computed once per process.

#include <map>

#include "kglab/groundstate.hpp"

namespace kglab::testgen {

inline GridPtr gs_grid() {
  static const GridPtr g = build_grid(36.0, 2304);
  return g;
}

inline const GroundState& cached_ground_state(double beta) {
  static std::map<double, GroundState> cache;
  auto it = cache.find(beta);
  if (it == cache.end()) it = cache.emplace(beta, minimize_d(CouplingParams(beta), gs_grid(), {})).first;
  return it->second;
}

}  // namespace kglab::testgen
