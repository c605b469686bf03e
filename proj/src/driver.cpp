#include "indiff/driver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "indiff/errors.hpp"

namespace indiff {

namespace {

constexpr int kNewtonIterations = 200;
constexpr int kTernaryIterations = 300;

// Minimizes a strictly convex function on [lo, hi] given its slope and
// curvature. `guess` seeds the Newton iteration.
template <class Slope, class Curvature, class Value>
double minimize_convex(const Slope& slope, const Curvature& curvature, const Value& value,
                       double lo, double hi, double guess) {
  if (!(hi > lo)) return lo;
  if (slope(lo) >= 0.0) return lo;
  if (slope(hi) <= 0.0) return hi;

  const double tol = 1e-12 * (1.0 + (hi - lo));
  double a = lo;
  double b = hi;
  double x = std::isfinite(guess) ? std::clamp(guess, lo, hi) : 0.5 * (lo + hi);
  for (int it = 0; it < kNewtonIterations; ++it) {
    const double d = slope(x);
    if (d == 0.0) return x;
    if (d > 0.0) {
      b = x;
    } else {
      a = x;
    }
    if (b - a <= tol) return 0.5 * (a + b);
    double next = x - d / curvature(x);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
    x = next;
  }

  // Newton did not settle; the function is convex, so a ternary search on
  // the value still brackets the minimizer.
  a = lo;
  b = hi;
  for (int it = 0; it < kTernaryIterations && b - a > tol; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (value(m1) <= value(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return 0.5 * (a + b);
}

bool jump_term_vanishes(const CoeffSnapshot& c, double y_plus_u) {
  return c.lambda == 0.0 || c.beta == 0.0 || y_plus_u == 0.0;
}

double market_price_of_risk(const CoeffSnapshot& c) {
  return (c.mu + c.lambda * c.beta) / c.sigma;
}

// e^x - 1 - x without cancellation for small x.
double expm1_minus_x(double x) {
  if (std::abs(x) < 0.1) {
    double term = x * x / 2.0;
    double sum = 0.0;
    for (int n = 3; n <= 12; ++n) {
      sum += term;
      term *= x / n;
    }
    return sum;
  }
  return std::expm1(x) - x;
}

}  // namespace

// Written as pi * slope(0) + O(pi^2) pieces so that values near a small
// minimizer do not come from cancelling first-order terms.
double f_pi(const CoeffSnapshot& c, double pi, double y, double z, double u) {
  const double g = c.gamma;
  double s0 = -g * (c.mu * y + c.sigma * z);
  double rest = 0.5 * g * g * pi * pi * c.sigma * c.sigma * y;
  if (!jump_term_vanishes(c, y + u)) {
    s0 -= c.lambda * g * c.beta * (y + u);
    rest += c.lambda * (y + u) * expm1_minus_x(-g * pi * c.beta);
  }
  return pi * s0 + rest;
}

double f_pi_slope(const CoeffSnapshot& c, double pi, double y, double z, double u) {
  const double g = c.gamma;
  double d = g * g * c.sigma * c.sigma * y * pi - g * (c.mu * y + c.sigma * z);
  if (!jump_term_vanishes(c, y + u)) d -= c.lambda * g * c.beta * std::exp(-g * pi * c.beta) * (y + u);
  return d;
}

double f_pi_curvature(const CoeffSnapshot& c, double pi, double y, double /*z*/, double u) {
  const double g = c.gamma;
  double h = g * g * c.sigma * c.sigma * y;
  if (!jump_term_vanishes(c, y + u)) {
    h += c.lambda * g * g * c.beta * c.beta * std::exp(-g * pi * c.beta) * (y + u);
  }
  return h;
}

DriverMin minimize_driver(const CoeffSnapshot& c, const StrategySet& set, double y, double z,
                          double u) {
  if (!(y > 0.0)) {
    throw NumericalError("driver: minimize_driver needs y > 0, got y = " + std::to_string(y));
  }
  if (!(y + u >= 0.0)) {
    throw NumericalError("driver: minimize_driver needs y + u >= 0, got y + u = " +
                         std::to_string(y + u));
  }

  const double vertex = (c.mu * y + c.sigma * z) / (c.gamma * c.sigma * c.sigma * y);
  double pi;
  if (jump_term_vanishes(c, y + u)) {
    pi = std::clamp(vertex, set.lo, set.hi);
  } else {
    pi = minimize_convex([&](double p) { return f_pi_slope(c, p, y, z, u); },
                         [&](double p) { return f_pi_curvature(c, p, y, z, u); },
                         [&](double p) { return f_pi(c, p, y, z, u); }, set.lo, set.hi, vertex);
  }
  double f = f_pi(c, pi, y, z, u);
  if (pi != 0.0 && set.contains(0.0) && 0.0 <= f) {
    pi = 0.0;
    f = 0.0;
  }
  return {f, pi};
}

namespace {

struct QuadraticBracket {
  const CoeffSnapshot& c;
  double z;
  double u;
  double target;  // z + alpha/gamma

  double value(double pi) const {
    const double g = c.gamma;
    const double d = pi * c.sigma - target;
    double h = 0.5 * g * d * d;
    if (c.lambda != 0.0) {
      const double v = u - pi * c.beta;
      h += c.lambda * (std::expm1(g * v) - g * v) / g;
    }
    return h;
  }
  double slope(double pi) const {
    const double g = c.gamma;
    double d = g * c.sigma * (pi * c.sigma - target);
    if (c.lambda != 0.0) d -= c.lambda * c.beta * std::expm1(g * (u - pi * c.beta));
    return d;
  }
  double curvature(double pi) const {
    const double g = c.gamma;
    double h = g * c.sigma * c.sigma;
    if (c.lambda != 0.0) h += c.lambda * g * c.beta * c.beta * std::exp(g * (u - pi * c.beta));
    return h;
  }
};

}  // namespace

double g_quadratic_argmin(const CoeffSnapshot& c, const StrategySet& set, double z, double u) {
  const double alpha = market_price_of_risk(c);
  const QuadraticBracket q{c, z, u, z + alpha / c.gamma};
  const double vertex = q.target / c.sigma;
  if (c.lambda == 0.0 || c.beta == 0.0) return std::clamp(vertex, set.lo, set.hi);
  return minimize_convex([&](double p) { return q.slope(p); },
                         [&](double p) { return q.curvature(p); },
                         [&](double p) { return q.value(p); }, set.lo, set.hi, vertex);
}

double g_quadratic(const CoeffSnapshot& c, const StrategySet& set, double z, double u) {
  const double alpha = market_price_of_risk(c);
  const QuadraticBracket q{c, z, u, z + alpha / c.gamma};
  const double pi = g_quadratic_argmin(c, set, z, u);
  double h = q.value(pi);
  if (pi != 0.0 && set.contains(0.0)) h = std::min(h, q.value(0.0));
  return h - alpha * z - alpha * alpha / (2.0 * c.gamma);
}

double f_min_via_quadratic(const CoeffSnapshot& c, const StrategySet& set, double y, double z,
                           double u) {
  if (!(y > 0.0) || !(y + u > 0.0)) {
    throw NumericalError("driver: change of variables needs y > 0 and y + u > 0");
  }
  const double g = c.gamma;
  const double zl = z / (g * y);
  const double ul = std::log1p(u / y) / g;
  const double gq = g_quadratic(c, set, zl, ul);
  return g * y * (gq + c.lambda * ul - 0.5 * g * zl * zl - c.lambda * std::expm1(g * ul) / g);
}

double lipschitz_constant(const CoeffSnapshot& c, const StrategySet& set) {
  // Every term is nondecreasing in |pi| on either side of zero, so the
  // maximum over the interval sits at an endpoint.
  auto at = [&](double pi) {
    const double g = c.gamma;
    const double jump = c.lambda * std::abs(std::expm1(-g * pi * c.beta));
    const double dy = 0.5 * g * g * pi * pi * c.sigma * c.sigma + g * std::abs(pi) * std::abs(c.mu) + jump;
    const double dz = g * std::abs(pi) * c.sigma;
    return std::max({dy, dz, jump});
  };
  return std::max(at(set.lo), at(set.hi));
}

JumpComparisonBounds jump_comparison_bounds(const CoeffSnapshot& c, const StrategySet& set) {
  const double a = std::expm1(-c.gamma * set.lo * c.beta);
  const double b = std::expm1(-c.gamma * set.hi * c.beta);
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace indiff
