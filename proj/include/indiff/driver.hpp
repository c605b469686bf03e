#pragma once

#include "indiff/model.hpp"

namespace indiff {

/// Compact interval C = [lo, hi] of admissible stock holdings.
struct StrategySet {
  double lo = -1.0;
  double hi = 1.0;

  static StrategySet symmetric(double k) { return {-k, k}; }
  bool contains(double pi) const noexcept { return lo <= pi && pi <= hi; }
};

struct DriverMin {
  double f_min;
  double pi_star;
};

/// Linear driver of the value process of a fixed holding pi:
///   (g^2/2) pi^2 s^2 y - g pi (mu y + s z) - lambda (1 - e^{-g pi beta}) (y + u)
/// with g = gamma, s = sigma.
double f_pi(const CoeffSnapshot& c, double pi, double y, double z, double u);

/// d f_pi / d pi and d^2 f_pi / d pi^2.
double f_pi_slope(const CoeffSnapshot& c, double pi, double y, double z, double u);
double f_pi_curvature(const CoeffSnapshot& c, double pi, double y, double z, double u);

/// Minimum of f_pi over the strategy set and its minimizer.
///
/// Requires y > 0 and y + u >= 0, which makes pi -> f_pi strictly convex.
/// Uses the clipped quadratic vertex when the jump term vanishes and a
/// bracketed Newton iteration on the slope otherwise, falling back to a
/// ternary search on the value if Newton stalls. The minimizer is accurate
/// to 1e-10 (1 + hi - lo); among equal values the holding closest to zero is
/// returned. Throws NumericalError outside the domain.
DriverMin minimize_driver(const CoeffSnapshot& c, const StrategySet& set, double y, double z,
                          double u);

/// Driver of the log-transformed value y = log(Y)/gamma:
///   inf_pi { (g/2)|pi s - (z + a/g)|^2 + |u - pi beta|_g } - a z - a^2/(2g)
/// with a = (mu + lambda beta)/sigma the market price of risk and
/// |v|_g = lambda (e^{g v} - 1 - g v)/g.
double g_quadratic(const CoeffSnapshot& c, const StrategySet& set, double z, double u);

/// Minimizer of the bracket in g_quadratic.
double g_quadratic_argmin(const CoeffSnapshot& c, const StrategySet& set, double z, double u);

/// f_min expressed through g after the change of variables
/// z_log = Z/(gamma Y), u_log = log(1 + U/Y)/gamma:
///   f_min = gamma Y (g + lambda u_log - gamma z_log^2/2 - lambda (e^{gamma u_log} - 1)/gamma).
double f_min_via_quadratic(const CoeffSnapshot& c, const StrategySet& set, double y, double z,
                           double u);

/// Lipschitz constant of f_min in (y, z, u) for the l1 norm:
/// max over pi in C of max(g^2 pi^2 s^2/2 + g|pi||mu| + lambda|1 - e^{-g pi beta}|,
///                        g|pi| s, lambda|1 - e^{-g pi beta}|).
double lipschitz_constant(const CoeffSnapshot& c, const StrategySet& set);

/// Range [c1, c2] of e^{-gamma pi beta} - 1 over C. The comparison theorem for
/// jump BSDEs needs c1 > -1.
struct JumpComparisonBounds {
  double c1;
  double c2;
};
JumpComparisonBounds jump_comparison_bounds(const CoeffSnapshot& c, const StrategySet& set);

}  // namespace indiff
