#pragma once

#include <optional>
#include <vector>

#include "indiff/solver.hpp"

namespace indiff {

/// Value at the origin for an increasing sequence of bounds k, with C = [-k, k].
struct KSweepResult {
  std::vector<double> ks;
  std::vector<double> J0s;
  std::vector<double> runtime_ms;
  std::vector<ValueSurface> surfaces;  // only when retained

  /// Indices i with J0s[i+1] > J0s[i] + kMonotoneTolerance, with the excess.
  struct Violation {
    std::size_t index;
    double excess;
  };
  std::vector<Violation> monotonicity_violations;

  bool converged = false;
  std::optional<double> k_star;

  static constexpr double kMonotoneTolerance = 1e-9;
};

struct SweepOptions {
  SolverOptions solver;
  bool retain_surfaces = false;
};

/// One solve per k; reports (does not throw on) monotonicity violations.
/// Solver failures are rethrown with the offending k in the message.
KSweepResult k_sweep(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                     const Quadrature& quad, const std::vector<double>& ks,
                     const SweepOptions& options = {});

struct ConvergeResult {
  double J0;
  KSweepResult sweep;
};

/// Doubles k from k0 until |J0(2k) - J0(k)| <= tol_rel J0(k); at most
/// kMaxDoublings doublings, then NonConvergence carrying the sequence.
ConvergeResult converge(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                        const Quadrature& quad, double k0, double tol_rel,
                        const SweepOptions& options = {});

inline constexpr int kMaxDoublings = 20;

}  // namespace indiff
