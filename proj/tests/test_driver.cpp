#include <doctest.h>

#include <cmath>
#include <random>

#include "indiff/driver.hpp"
#include "indiff/errors.hpp"

using namespace indiff;

namespace {

CoeffSnapshot snap(double mu, double sigma, double lambda, double beta, double gamma) {
  return {mu, sigma, lambda, beta, gamma};
}

// Exhaustive scan over n equispaced holdings; independent of the minimizer.
DriverMin dense_scan(const CoeffSnapshot& c, StrategySet set, double y, double z, double u,
                     int n) {
  DriverMin best{INFINITY, 0.0};
  for (int i = 0; i < n; ++i) {
    const double pi = set.lo + (set.hi - set.lo) * i / (n - 1);
    const double f = f_pi(c, pi, y, z, u);
    if (f < best.f_min) best = {f, pi};
  }
  return best;
}

struct RandomPoint {
  CoeffSnapshot c;
  StrategySet set;
  double y, z, u;
};

RandomPoint draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  auto in = [&](double a, double b) { return a + (b - a) * U01(rng); };
  RandomPoint p;
  p.c = snap(in(-0.5, 0.5), in(0.05, 1.0), in(0.0, 2.0), in(-0.9, 2.0), in(0.2, 3.0));
  const double k = in(0.1, 5.0);
  p.set = {-k * in(0.2, 1.0), k};
  p.y = in(0.01, 2.0);
  p.z = in(-1.0, 1.0);
  p.u = in(-p.y, 2.0);
  return p;
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("f_pi vanishes at zero holding") {
    const auto c = snap(0.3, 0.4, 0.7, -0.2, 1.5);
    CHECK(f_pi(c, 0.0, 1.3, -0.4, 0.2) == 0.0);
  }

  TEST_CASE("f_pi direct substitution") {
    CHECK(f_pi(snap(0, 1, 0, 0, 1), 1.0, 2.0, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(f_pi(snap(0, 1, 1, 1, 1), 1.0, 1.0, 0.0, 0.0) ==
          doctest::Approx(0.5 - (1.0 - std::exp(-1.0))).epsilon(1e-14));
    CHECK(f_pi(snap(0, 1, 1, 1, 1), 1.0, 1.0, 0.0, 0.0) == doctest::Approx(-0.13212).epsilon(1e-5));
  }

  TEST_CASE("slope and curvature match finite differences") {
    const auto c = snap(0.1, 0.3, 0.8, -0.4, 2.0);
    const double y = 0.7, z = 0.2, u = -0.3, pi = 0.6, h = 1e-5;
    const double fd1 = (f_pi(c, pi + h, y, z, u) - f_pi(c, pi - h, y, z, u)) / (2 * h);
    const double fd2 =
        (f_pi(c, pi + h, y, z, u) - 2 * f_pi(c, pi, y, z, u) + f_pi(c, pi - h, y, z, u)) / (h * h);
    CHECK(f_pi_slope(c, pi, y, z, u) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(f_pi_curvature(c, pi, y, z, u) == doctest::Approx(fd2).epsilon(1e-4));
  }

  TEST_CASE("no jump: clipped quadratic vertex") {
    const auto c = snap(0.0, 1.0, 0.0, 0.0, 1.0);
    auto a = minimize_driver(c, {-2, 2}, 1.0, 1.0, 0.0);
    CHECK(a.pi_star == 1.0);
    CHECK(a.f_min == -0.5);
    auto b = minimize_driver(c, {-2, 0.5}, 1.0, 1.0, 0.0);
    CHECK(b.pi_star == 0.5);
    CHECK(b.f_min == doctest::Approx(-0.375).epsilon(1e-15));
  }

  TEST_CASE("jump case matches a dense scan of 10^6 holdings") {
    const auto c = snap(0.05, 1.0, 0.3, -0.4, 1.0);
    const StrategySet set{-3, 3};
    const auto got = minimize_driver(c, set, 1.0, 0.2, -0.1);
    const auto scan = dense_scan(c, set, 1.0, 0.2, -0.1, 1'000'000);
    CHECK(std::abs(got.f_min - scan.f_min) <= 1e-6);
    CHECK(got.f_min <= scan.f_min);
    CHECK(std::abs(got.pi_star - scan.pi_star) <= 6.0 / 999'999);
  }

  TEST_CASE("minimizer is a root of the slope to 1e-10") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 2000; ++n) {
      const auto p = draw(rng);
      const auto m = minimize_driver(p.c, p.set, p.y, p.z, p.u);
      REQUIRE(p.set.contains(m.pi_star));
      const double tol = 1e-10 * (1.0 + p.set.hi - p.set.lo);
      const double lo = std::max(p.set.lo, m.pi_star - tol);
      const double hi = std::min(p.set.hi, m.pi_star + tol);
      // the true minimizer lies in [lo, hi]: slope changes sign there or it's a clipped end
      const bool left_ok = lo == p.set.lo || f_pi_slope(p.c, lo, p.y, p.z, p.u) <= 0.0;
      const bool right_ok = hi == p.set.hi || f_pi_slope(p.c, hi, p.y, p.z, p.u) >= 0.0;
      CHECK((left_ok && right_ok));
    }
  }

  TEST_CASE("domain errors") {
    const auto c = snap(0.1, 0.2, 0.5, -0.3, 1.0);
    CHECK_THROWS_AS(minimize_driver(c, {-1, 1}, 0.0, 0.0, 0.0), NumericalError);
    CHECK_THROWS_AS(minimize_driver(c, {-1, 1}, 1.0, 0.0, -1.5), NumericalError);
    CHECK_NOTHROW(minimize_driver(c, {-1, 1}, 1.0, 0.0, -1.0));
  }

  TEST_CASE("zero drift and zero z give the zero holding exactly") {
    const auto c = snap(0.0, 0.3, 0.4, 0.0, 2.0);
    const auto m = minimize_driver(c, {-4, 4}, 0.8, 0.0, 0.1);
    CHECK(m.pi_star == 0.0);
    CHECK(m.f_min == 0.0);
  }

  TEST_CASE("large bounds do not overflow") {
    const auto c = snap(0.1, 0.2, 0.5, -0.5, 1.0);
    const auto m = minimize_driver(c, StrategySet::symmetric(1e6), 1.0, 0.1, -0.2);
    const auto ref = minimize_driver(c, StrategySet::symmetric(50.0), 1.0, 0.1, -0.2);
    CHECK(std::isfinite(m.f_min));
    CHECK(m.pi_star == doctest::Approx(ref.pi_star).epsilon(1e-9));
  }

  TEST_CASE("quadratic driver closed forms") {
    // mu + lambda beta = 0 and z = u = 0: both penalties vanish at pi = 0
    CHECK(g_quadratic(snap(0.2, 0.5, 0.4, -0.5, 1.0), {-3, 3}, 0.0, 0.0) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // lambda = 0, gamma = mu = sigma = 1, z = 0: complete the square
    CHECK(g_quadratic(snap(1, 1, 0, 0, 1), {-5, 5}, 0.0, 0.0) == doctest::Approx(-0.5));
    CHECK(g_quadratic_argmin(snap(1, 1, 0, 0, 1), {-5, 5}, 0.0, 0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("power-of-two scaling is exact") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 2000; ++n) {
      const auto p = draw(rng);
      const auto m = minimize_driver(p.c, p.set, p.y, p.z, p.u);
      for (int e : {-5, -1, 3, 6}) {
        const double t = std::ldexp(1.0, e);
        const auto mt = minimize_driver(p.c, p.set, t * p.y, t * p.z, t * p.u);
        CHECK(mt.f_min == t * m.f_min);
        CHECK(mt.pi_star == m.pi_star);
      }
    }
  }

  TEST_CASE("f_pi keeps relative accuracy near a small minimizer") {
    // slope at zero is -1e-6 against O(1) cancelling terms
    const auto c = snap(0.5, 1.0, 0.0, 0.0, 1.0);
    const double z = -0.5 + 1e-6;
    const double pi = 1e-6;
    // exact: 0.5 pi^2 - pi * 1e-6 = -5e-13
    CHECK(f_pi(c, pi, 1.0, z, 0.0) == doctest::Approx(-5e-13).epsilon(1e-9));
  }

  TEST_CASE("properties on random snapshots") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
      const auto p = draw(rng);
      const auto m = minimize_driver(p.c, p.set, p.y, p.z, p.u);

      // dominance
      const double pi = p.set.lo + (p.set.hi - p.set.lo) * U01(rng);
      const double f = f_pi(p.c, pi, p.y, p.z, p.u);
      CHECK(m.f_min <= f + 1e-12 * (1.0 + std::abs(f)));

      // homogeneity
      const double t = std::exp(4.0 * (U01(rng) - 0.5));
      const auto mt = minimize_driver(p.c, p.set, t * p.y, t * p.z, t * p.u);
      CHECK(std::abs(mt.f_min - t * m.f_min) <= 1e-12 * std::abs(t * m.f_min));
      CHECK(mt.pi_star == doctest::Approx(m.pi_star).epsilon(1e-9));

      // Lipschitz
      const double L = lipschitz_constant(p.c, p.set);
      const double y2 = p.y * (0.5 + U01(rng)), z2 = p.z + (U01(rng) - 0.5);
      const double u2 = -y2 + (p.y + p.u) * U01(rng) * 2.0;
      const auto m2 = minimize_driver(p.c, p.set, y2, z2, u2);
      const double dist = std::abs(p.y - y2) + std::abs(p.z - z2) + std::abs(p.u - u2);
      CHECK(std::abs(m.f_min - m2.f_min) <= L * dist * (1.0 + 1e-12) + 1e-15);

      // comparison coefficient
      const auto jb = jump_comparison_bounds(p.c, p.set);
      CHECK(jb.c1 > -1.0);
      CHECK(jb.c1 <= jb.c2);

      // change of variables
      if (p.y + p.u > 0.0) {
        const double via_g = f_min_via_quadratic(p.c, p.set, p.y, p.z, p.u);
        CHECK(std::abs(via_g - m.f_min) <= 1e-8 * std::max(std::abs(m.f_min), p.y));
      }
    }
  }
}
