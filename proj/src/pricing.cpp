#include "indiff/pricing.hpp"

#include <cmath>
#include <omp.h>

#include <future>
#include <sstream>

#include "indiff/errors.hpp"

namespace indiff {

double price_from_values(double gamma, double J0_zero, double J0_claim) {
  return std::log(J0_zero / J0_claim) / gamma;
}

double wealth_scaling(double x, double V0, double gamma) { return std::exp(-gamma * x) * V0; }

namespace {

struct Leg {
  std::string name;
  Claim claim;
  std::vector<double> J0s;
};

struct JointSchedule {
  std::vector<double> ks;
  std::vector<Leg> legs;
  int doublings = 0;
};

double solve_leg(const MarketModel& model, const Leg& leg, const SpaceGrid& space,
                 const Quadrature& quad, double k, const SolverOptions& options) {
  try {
    return surface_at_origin(
        solve_bsde(model, leg.claim, StrategySet::symmetric(k), space, quad, options));
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os.precision(12);
    os << "pricing: leg '" << leg.name << "' failed for k = " << k << ": " << e.what();
    throw NumericalError(os.str());
  }
}

void solve_all(const MarketModel& model, JointSchedule& js, const SpaceGrid& space,
               const Quadrature& quad, double k, const SolverOptions& options) {
  // worker threads start with default OpenMP settings; pass the caller's cap on
  const int threads = omp_get_max_threads();
  std::vector<std::future<double>> pending;
  pending.reserve(js.legs.size());
  for (const Leg& leg : js.legs) {
    pending.push_back(std::async(std::launch::async, [&, k, threads] {
      omp_set_num_threads(threads);
      return solve_leg(model, leg, space, quad, k, options);
    }));
  }
  std::vector<double> values;
  for (auto& f : pending) values.push_back(f.get());
  js.ks.push_back(k);
  for (std::size_t l = 0; l < js.legs.size(); ++l) js.legs[l].J0s.push_back(values[l]);
}

bool leg_settled(const Leg& leg, double tol_rel) {
  const std::size_t n = leg.J0s.size();
  return std::abs(leg.J0s[n - 1] - leg.J0s[n - 2]) <= tol_rel * leg.J0s[n - 2];
}

JointSchedule run_legs(const MarketModel& model, std::vector<Leg> legs, const SpaceGrid& space,
                       const Quadrature& quad, double k0, double tol_rel,
                       const SolverOptions& options) {
  require_valid(model);
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw ValidationError("pricing: k0 must be positive");
  if (!(tol_rel > 0.0)) throw ValidationError("pricing: tol_rel must be positive");

  JointSchedule js;
  js.legs = std::move(legs);
  double k = k0;
  solve_all(model, js, space, quad, k, options);
  for (int d = 1; d <= kMaxDoublings; ++d) {
    k *= 2.0;
    solve_all(model, js, space, quad, k, options);
    js.doublings = d;
    bool all = true;
    for (const Leg& leg : js.legs) all = all && leg_settled(leg, tol_rel);
    if (all) return js;
  }
  std::ostringstream os;
  os << "pricing: k-doubling did not converge after " << kMaxDoublings << " doublings for leg(s):";
  for (const Leg& leg : js.legs) {
    if (!leg_settled(leg, tol_rel)) os << " '" << leg.name << "'";
  }
  // the sequence of the first unsettled leg travels with the exception
  for (const Leg& leg : js.legs) {
    if (!leg_settled(leg, tol_rel)) throw NonConvergence(os.str(), js.ks, leg.J0s);
  }
  throw NonConvergence(os.str(), js.ks, {});
}

void require_bounded_above(const Claim& claim) {
  if (!std::isfinite(claim.upper_bound())) {
    throw ValidationError("pricing: selling price needs a claim bounded above");
  }
}

}  // namespace

PriceReport indifference_price(const MarketModel& model, const Claim& claim,
                               const SpaceGrid& space, const Quadrature& quad, double k0,
                               double tol_rel, const SolverOptions& options) {
  require_bounded_above(claim);
  std::vector<Leg> legs;
  legs.push_back({"zero", Claim::constant(0.0), {}});
  legs.push_back({"claim", claim, {}});
  legs.push_back({"negated claim", claim.negated(), {}});
  const JointSchedule js = run_legs(model, std::move(legs), space, quad, k0, tol_rel, options);

  const auto& zero = js.legs[0].J0s;
  const auto& with = js.legs[1].J0s;
  const auto& neg = js.legs[2].J0s;

  PriceReport r;
  r.gamma = model.gamma;
  r.J0_zero = zero.back();
  r.J0_claim = with.back();
  r.buy_price = price_from_values(model.gamma, r.J0_zero, r.J0_claim);
  r.sell_price = 0.0 - price_from_values(model.gamma, r.J0_zero, neg.back());  // no -0.0
  for (std::size_t i = 0; i < js.ks.size(); ++i) {
    r.per_k.push_back({js.ks[i], price_from_values(model.gamma, zero[i], with[i])});
  }
  r.claim_description = claim.describe();
  r.settings = {model.grid.steps, space.intervals(), quad.size(), tol_rel, k0};
  r.diagnostics = {js.ks.back(), js.doublings, true, neg.back()};
  return r;
}

double selling_price(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                     const Quadrature& quad, double k0, double tol_rel,
                     const SolverOptions& options) {
  require_bounded_above(claim);
  std::vector<Leg> legs;
  legs.push_back({"zero", Claim::constant(0.0), {}});
  legs.push_back({"negated claim", claim.negated(), {}});
  const JointSchedule js = run_legs(model, std::move(legs), space, quad, k0, tol_rel, options);
  return 0.0 - price_from_values(model.gamma, js.legs[0].J0s.back(), js.legs[1].J0s.back());
}

}  // namespace indiff
