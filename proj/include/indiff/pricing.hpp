#pragma once

#include <string>
#include <vector>

#include "indiff/approx.hpp"

namespace indiff {

struct KPrice {
  double k;
  double p;
};

struct PriceReport {
  double gamma = 0.0;
  double J0_zero = 0.0;
  double J0_claim = 0.0;
  double buy_price = 0.0;
  double sell_price = 0.0;
  std::vector<KPrice> per_k;
  std::string claim_description;

  struct Settings {
    int N = 0;
    int M = 0;
    int quad_nodes = 0;
    double tol_rel = 0.0;
    double k0 = 0.0;
  } settings;

  struct Diagnostics {
    double k_final = 0.0;
    int doublings = 0;
    bool converged = false;
    double J0_negated_claim = 0.0;  // J(0, -xi), used for the selling price
  } diagnostics;
};

/// (1/gamma) ln(J0_zero / J0_claim)
double price_from_values(double gamma, double J0_zero, double J0_claim);

/// e^{-gamma x} V0: value at initial wealth x from the value at zero wealth.
double wealth_scaling(double x, double V0, double gamma);

/// Buying and selling indifference prices. The legs xi = 0, xi and -xi
/// share one k-doubling schedule starting at k0; doubling stops once every
/// leg meets the relative Cauchy rule. Per-k buying prices are reported for
/// the whole schedule. NonConvergence names the legs that failed.
PriceReport indifference_price(const MarketModel& model, const Claim& claim,
                               const SpaceGrid& space, const Quadrature& quad, double k0,
                               double tol_rel, const SolverOptions& options = {});

/// p* = -(buying price of -xi). Rejects claims not bounded above.
double selling_price(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                     const Quadrature& quad, double k0, double tol_rel,
                     const SolverOptions& options = {});

}  // namespace indiff
