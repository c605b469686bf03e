#include <doctest.h>

#include <cmath>
#include <random>

#include "indiff/approx.hpp"
#include "indiff/errors.hpp"

using namespace indiff;

namespace {

MarketModel make_model(double mu, double sigma, double beta, double lambda, int N,
                       double gamma = 1.0) {
  MarketModel m;
  m.grid = {1.0, N};
  m.coeffs = RegimeCoefficients::constant(mu, sigma, beta, lambda);
  m.gamma = gamma;
  m.s0 = 1.0;
  return m;
}

const Quadrature& gh7() {
  static const Quadrature q = Quadrature::gauss_hermite(7);
  return q;
}

}  // namespace

TEST_SUITE("approx") {
  TEST_CASE("Merton sweep is monotone and flat once the constraint is inactive") {
    const auto m = make_model(1.0, 1.0, 0.0, 0.0, 100);
    const auto grid = SpaceGrid::for_model(m, 100);
    const auto r = k_sweep(m, Claim::constant(0.0), grid, gh7(), {0.5, 1, 2, 4});
    REQUIRE(r.J0s.size() == 4);
    CHECK(r.monotonicity_violations.empty());
    CHECK(r.J0s[0] > r.J0s[1]);
    CHECK(r.J0s[2] == r.J0s[1]);
    CHECK(r.J0s[3] == r.J0s[1]);
    CHECK(r.runtime_ms.size() == 4);
    CHECK(r.surfaces.empty());
  }

  TEST_CASE("constant claim scales every J0 by exp(-gamma c)") {
    const auto m = make_model(0.1, 0.3, -0.2, 0.4, 40, 1.7);
    const auto grid = SpaceGrid::for_model(m, 80);
    const std::vector<double> ks = {0.25, 1, 3};
    const auto zero = k_sweep(m, Claim::constant(0.0), grid, gh7(), ks);
    const auto cash = k_sweep(m, Claim::constant(0.6), grid, gh7(), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(cash.J0s[i] == doctest::Approx(std::exp(-1.7 * 0.6) * zero.J0s[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("bond sweep is flat in k") {
    const auto m = make_model(0.0, 0.2, 0.0, 0.1, 100);
    const auto grid = SpaceGrid::for_model(m, 100);
    const auto r = k_sweep(m, Claim::default_indicator(1.0, 0.0), grid, gh7(), {0.25, 2, 16},
                           {{}, true});
    CHECK(r.J0s[1] == r.J0s[0]);
    CHECK(r.J0s[2] == r.J0s[0]);
    CHECK(r.surfaces.size() == 3);
  }

  TEST_CASE("random models are nonincreasing in k") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 6; ++t) {
      const auto m = make_model(-0.3 + 0.6 * U(rng), 0.1 + 0.4 * U(rng), -0.5 + U(rng), U(rng), 40,
                                0.5 + 1.5 * U(rng));
      const auto grid = SpaceGrid::for_model(m, 80);
      std::vector<double> s;
      for (double x : grid.nodes()) s.push_back(std::exp(x));
      const auto claim = Claim::tabulate(s, [](double sv, int n) { return n == 0 ? std::min(sv, 2.0) : 0.3; });
      const auto r = k_sweep(m, claim, grid, gh7(), {0.25, 0.5, 1, 2, 4, 8});
      CHECK(r.monotonicity_violations.empty());
      for (std::size_t i = 0; i + 1 < r.J0s.size(); ++i) CHECK(r.J0s[i + 1] <= r.J0s[i] + 1e-9);
    }
  }

  TEST_CASE("converge on Merton") {
    const auto m = make_model(1.0, 1.0, 0.0, 0.0, 200);
    const auto grid = SpaceGrid::for_model(m, 200);
    const auto r = converge(m, Claim::constant(0.0), grid, gh7(), 0.25, 1e-6);
    CHECK(std::abs(r.J0 - std::exp(-0.5)) <= 1e-3);
    REQUIRE(r.sweep.k_star.has_value());
    CHECK(*r.sweep.k_star <= 2.0);
    CHECK(r.sweep.converged);
    // halving k0 lands on the same value
    const auto h = converge(m, Claim::constant(0.0), grid, gh7(), 0.125, 1e-6);
    CHECK(std::abs(h.J0 - r.J0) <= 1e-6 * r.J0);
  }

  TEST_CASE("converge without premium or default stops at the first doubling") {
    const auto m = make_model(0.0, 0.3, 0.0, 0.0, 20);
    const auto grid = SpaceGrid::for_model(m, 40);
    const auto r = converge(m, Claim::constant(0.5), grid, gh7(), 1.0, 1e-6);
    CHECK(r.sweep.ks.size() == 2);
    CHECK(*r.sweep.k_star == 2.0);
    CHECK(r.J0 == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  }

  TEST_CASE("converge on the bond") {
    const auto m = make_model(0.0, 0.2, 0.0, 0.1, 100);
    const auto grid = SpaceGrid::for_model(m, 100);
    const auto r = converge(m, Claim::default_indicator(1.0, 0.0), grid, gh7(), 0.25, 1e-6);
    const double q = std::exp(-0.1);
    CHECK(std::abs(r.J0 - (q * std::exp(-1.0) + 1.0 - q)) <= 5e-3);
  }

  TEST_CASE("schedules are validated") {
    const auto m = make_model(0.1, 0.2, 0.0, 0.0, 10);
    const auto grid = SpaceGrid::for_model(m, 20);
    const auto c = Claim::constant(0.0);
    CHECK_THROWS_AS(k_sweep(m, c, grid, gh7(), {}), ValidationError);
    CHECK_THROWS_AS(k_sweep(m, c, grid, gh7(), {1, 1}), ValidationError);
    CHECK_THROWS_AS(k_sweep(m, c, grid, gh7(), {-1, 1}), ValidationError);
    CHECK_THROWS_AS(converge(m, c, grid, gh7(), 0.0, 1e-6), ValidationError);
    CHECK_THROWS_AS(converge(m, c, grid, gh7(), 1.0, 0.0), ValidationError);
  }

  TEST_CASE("solver failures carry the offending k") {
    const auto m = make_model(3.0, 0.2, 0.0, 0.0, 1, 5.0);
    const auto grid = SpaceGrid::for_model(m, 20);
    try {
      k_sweep(m, Claim::constant(0.0), grid, gh7(), {0.01, 50});
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("k = 50") != std::string::npos);
    }
  }
}
