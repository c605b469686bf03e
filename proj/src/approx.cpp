#include "indiff/approx.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "indiff/errors.hpp"

namespace indiff {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

// Solves for C = [-k, k] and appends to the sweep.
void solve_one(KSweepResult& out, const MarketModel& model, const Claim& claim,
               const SpaceGrid& space, const Quadrature& quad, double k,
               const SweepOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  try {
    ValueSurface s = solve_bsde(model, claim, StrategySet::symmetric(k), space, quad, options.solver);
    out.ks.push_back(k);
    out.J0s.push_back(surface_at_origin(s));
    out.runtime_ms.push_back(elapsed_ms(start));
    if (options.retain_surfaces) out.surfaces.push_back(std::move(s));
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os.precision(12);
    os << "approx: solve failed for k = " << k << ": " << e.what();
    throw NumericalError(os.str());
  }
  const std::size_t n = out.J0s.size();
  if (n >= 2) {
    const double excess = out.J0s[n - 1] - out.J0s[n - 2];
    if (excess > KSweepResult::kMonotoneTolerance) {
      out.monotonicity_violations.push_back({n - 2, excess});
    }
  }
}

}  // namespace

KSweepResult k_sweep(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                     const Quadrature& quad, const std::vector<double>& ks,
                     const SweepOptions& options) {
  if (ks.empty()) throw ValidationError("approx: k schedule is empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || !std::isfinite(ks[i])) {
      throw ValidationError("approx: every k must be positive and finite");
    }
    if (i > 0 && !(ks[i] > ks[i - 1])) {
      throw ValidationError("approx: k schedule must be strictly increasing");
    }
  }
  KSweepResult out;
  for (double k : ks) solve_one(out, model, claim, space, quad, k, options);
  return out;
}

ConvergeResult converge(const MarketModel& model, const Claim& claim, const SpaceGrid& space,
                        const Quadrature& quad, double k0, double tol_rel,
                        const SweepOptions& options) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw ValidationError("approx: k0 must be positive");
  if (!(tol_rel > 0.0)) throw ValidationError("approx: tol_rel must be positive");

  KSweepResult out;
  double k = k0;
  solve_one(out, model, claim, space, quad, k, options);
  for (int d = 0; d < kMaxDoublings; ++d) {
    k *= 2.0;
    solve_one(out, model, claim, space, quad, k, options);
    const std::size_t n = out.J0s.size();
    if (std::abs(out.J0s[n - 1] - out.J0s[n - 2]) <= tol_rel * out.J0s[n - 2]) {
      out.converged = true;
      out.k_star = k;
      return {out.J0s.back(), std::move(out)};
    }
  }
  std::ostringstream os;
  os.precision(12);
  os << "approx: k-doubling did not converge after " << kMaxDoublings << " doublings; J0(k):";
  for (std::size_t i = 0; i < out.ks.size(); ++i) os << " [" << out.ks[i] << ": " << out.J0s[i] << "]";
  throw NonConvergence(os.str(), out.ks, out.J0s);
}

}  // namespace indiff
