#pragma once

#include <cstddef>

namespace ialm {

// Numerical thresholds shared by the library, the tests and the CLI.
struct Tolerances {
  static constexpr double symmetry_rel = 1e-12;
  static constexpr double solve_residual_rel = 1e-10;
  static constexpr std::size_t eigen_max_iterations = 10000;
  static constexpr double singular_ratio = 1e-14;
  static constexpr double negative_quadratic_form = 1e-12;
  static constexpr double sqrt_clamp = 1e-12;
  static constexpr double rank_condition_max = 1e12;
  static constexpr double divergence_threshold = 1e12;
  static constexpr std::size_t cg_recompute_every = 50;
  static constexpr std::size_t inner_max_iterations = 100000;
  static constexpr std::size_t max_enumeration_order = 8;
};

}  // namespace ialm
