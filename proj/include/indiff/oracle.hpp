#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "indiff/solver.hpp"

namespace indiff {

/// Moment-matched quantization of a standard normal on an equispaced
/// lattice: q points (b - (q-1)/2) h with binomial weights, h = 2/sqrt(q-1).
/// Mean 0 and variance 1 are exact.
struct GaussianQuantizer {
  std::vector<double> points;
  std::vector<double> weights;

  static GaussianQuantizer binomial(int q);
};

struct DPSettings {
  int steps = 8;       // N_small <= 16
  int quantizer = 7;   // q in [2, 9]
  int strategies = 81; // G in [1, 401]; G = 1 is the grid {0}
  /// Maximum number of tree nodes for claims that depend on the stock.
  std::size_t node_budget = 4'000'000;
};

struct DPResult {
  double J0;
  std::size_t nodes;  // nodes visited in the backward pass
  bool collapsed;     // claim independent of S: one node per (step, state)
};

/// Exhaustive backward recursion on the discrete-time problem
///   inf over pi in {G-point grid of [-k, k]} of E[exp(-gamma (X_T + xi))]
/// with the strategy held constant over each of the `steps` periods.
/// Every node tries every grid holding against every branch
/// (q Gaussian increments x {default, no default}). Claims that do not
/// depend on S have identical subtrees for every node sharing (step, state),
/// so the tree collapses to those states. Throws ValidationError when the
/// full tree exceeds the node budget.
DPResult brute_force_dp(const MarketModel& model, const Claim& claim, double k,
                        const DPSettings& settings = {});

namespace reference {
DPResult brute_force_dp_serial(const MarketModel& model, const Claim& claim, double k,
                               const DPSettings& settings = {});
}  // namespace reference

/// Increments of V_t = exp(-gamma X_t) Y(t, S_t, N_t) along simulated paths.
struct DriftReport {
  int n_paths = 0;
  std::vector<double> t;          // left end of each step
  std::vector<double> mean;       // per-step mean increment
  std::vector<double> stderr_;    // per-step standard error
  double aggregate_mean = 0.0;    // mean of V_T - V_0
  double aggregate_se = 0.0;

  /// |aggregate_mean| <= z * aggregate_se
  bool is_martingale(double z = 3.0) const;
  /// aggregate_mean >= -z * aggregate_se
  bool is_submartingale(double z = 3.0) const;
};

/// Simulates `n_paths` (>= 1000) paths of the surface's model under
/// `strategy` and measures the drift of exp(-gamma X) Y. Y is read from the
/// solver's own surface, so this checks the solver's consistency with the
/// dynamic programming principle rather than ground truth. Reductions run in
/// a fixed block order, so results do not depend on the thread count.
DriftReport martingale_check(const ValueSurface& surface, const Strategy& strategy, int n_paths,
                             std::uint64_t seed);

namespace reference {
DriftReport martingale_check_serial(const ValueSurface& surface, const Strategy& strategy,
                                    int n_paths, std::uint64_t seed);
}  // namespace reference

}  // namespace indiff
