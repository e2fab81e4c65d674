#pragma once

#include <string>
#include <vector>

#include "qtcap/capacity.hpp"

namespace qtcap {

enum class Objective { q1, q2 };

struct SearchAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int n_points = 21;
};

struct SearchSpace {
  std::vector<SearchAxis> axes;
};

struct SearchSample {
  std::vector<double> point;
  double value = 0.0;  // NaN when the quadrature failed at this point
  bool ok = false;
};

struct RefinementStep {
  double max_spacing = 0.0;  // widest axis spacing of the round
  double best_value = 0.0;   // incumbent after the round
};

struct SearchResult {
  std::vector<std::string> axis_names;
  std::vector<double> best_point;
  double best_value = 0.0;
  double best_abs_error = 0.0;  // from the tightened re-evaluation of the incumbent
  std::vector<SearchSample> grid_samples;  // all rounds, evaluation order
  std::vector<RefinementStep> refinement_history;
  int failed_points = 0;
};

// Exhaustive grid search with one or more refinement rounds: each round
// shrinks every axis range five-fold around the incumbent, clamped to the
// original bounds. Grid points are evaluated at a relaxed tolerance
// (rel 1e-5 floor); the final incumbent is re-integrated at the configured
// tolerance. Results are deterministic and independent of thread count;
// exact ties keep the lexicographically first grid point. Points where the
// quadrature fails are recorded, not fatal; if every point fails the search
// throws convergence_error.

// axes: kappa_a, kappa_b, delta (detuning of the first mode, second held at
// zero); the single coupling is fixed at 1
SearchResult grid_search_0stage(Objective obj, const SearchSpace& space,
                                const QuadratureConfig& cfg = {},
                                int refine_rounds = 1);

// axes: kappa_a, kappa_b, g_b; resonant, first coupling fixed at 1
SearchResult grid_search_1stage(Objective obj, const SearchSpace& space,
                                const QuadratureConfig& cfg = {},
                                int refine_rounds = 1);

// Symmetric resonant N-stage chain: kappa_a = kappa_b = kappa and mirrored
// couplings g_j = g_(N+2-j). axes: kappa, g_1 .. g_ceil((N+1)/2).
SearchResult symmetric_resonant_search(int n_stages, Objective obj,
                                       const SearchSpace& space,
                                       const QuadratureConfig& cfg = {},
                                       int refine_rounds = 1);

struct FamilyComparison {
  int n_stages = 0;
  double q_flat = 0.0;
  double q_uniform = 0.0;
};

// numeric capacities of the maximally flat and uniform families, N = 0..n_max
std::vector<FamilyComparison> uniform_capacity_sweep(int n_max, Objective obj,
                                                     const QuadratureConfig& cfg = {});

// thread count honoring the QCAP_THREADS environment variable
int worker_count();

}  // namespace qtcap
