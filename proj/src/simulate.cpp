#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "indiff/errors.hpp"
#include "indiff/model.hpp"
#include "indiff/rng.hpp"

namespace indiff {

namespace {

constexpr double kTruncation = 6.0;  // |dW| <= 6 sqrt(dt)

}  // namespace

PathStepper::PathStepper(const MarketModel& model, std::uint64_t seed, std::uint64_t path)
    : model_(model), seed_(seed), path_(path) {
  st_.S = model.s0;
}

void PathStepper::advance(double pi) {
  const CounterRng rng(seed_, path_);
  const double dt = model_.grid.dt();
  const double sqdt = std::sqrt(dt);
  const Regime r = st_.N == 0 ? Regime::pre_default : Regime::post_default;
  const CoeffSnapshot c = model_.snapshot(st_.t, r);

  const double z = std::clamp(rng.normal(i_, 0), -kTruncation, kTruncation);
  double dW = sqdt * z;
  // keep the diffusive growth factor positive
  const double base = 1.0 + c.mu * dt;
  if (base > 0.0) dW = std::max(dW, -base / c.sigma * (1.0 - 1e-12));

  int dN = 0;
  if (st_.N == 0 && c.lambda > 0.0) {
    const double p = -std::expm1(-c.lambda * dt);
    if (rng.uniform(i_, 2) < p) dN = 1;
  }

  st_.X += pi * (c.mu * dt + c.sigma * dW + c.beta * dN);
  st_.S *= (base + c.sigma * dW) * (1.0 + c.beta * dN);
  st_.W += dW;
  st_.N += dN;
  ++i_;
  st_.t = model_.grid.time(i_);
}

namespace {

void simulate_one(const MarketModel& model, const Strategy& strategy, PathEnsemble& ens,
                  int path) {
  PathStepper stepper(model, ens.seed, static_cast<std::uint64_t>(path));
  auto record = [&](int step) {
    const auto& s = stepper.state();
    const auto k = ens.index(path, step);
    ens.W[k] = s.W;
    ens.N[k] = s.N;
    ens.S[k] = s.S;
    ens.X[k] = s.X;
  };
  record(0);
  ens.default_time[path] = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < ens.steps; ++i) {
    const auto& s = stepper.state();
    const int n_before = s.N;
    stepper.advance(strategy(s.t, s.S, s.N));
    if (n_before == 0 && stepper.state().N == 1) ens.default_time[path] = stepper.state().t;
    record(i + 1);
  }
}

// Simulation tolerates sigma = 0 (deterministic paths); the solver does not.
void require_simulable(const MarketModel& model) {
  const auto rep = validate_model(model);
  std::string msg;
  for (const auto& v : rep.violations) {
    if (v.find("sigma must be positive") != std::string::npos) continue;
    if (v.find("market price of risk") != std::string::npos) continue;
    msg += "\n  - " + v;
  }
  if (!msg.empty()) throw ValidationError("model: cannot simulate:" + msg);
}

PathEnsemble allocate(const MarketModel& model, int n_paths, std::uint64_t seed) {
  require_simulable(model);
  if (n_paths <= 0) throw ValidationError("model: n_paths must be positive");
  PathEnsemble ens;
  ens.seed = seed;
  ens.n_paths = n_paths;
  ens.steps = model.grid.steps;
  ens.dt = model.grid.dt();
  const auto rows = static_cast<std::size_t>(n_paths) * (ens.steps + 1);
  ens.W.resize(rows);
  ens.N.resize(rows);
  ens.S.resize(rows);
  ens.X.resize(rows);
  ens.default_time.resize(n_paths);
  return ens;
}

}  // namespace

PathEnsemble simulate_paths(const MarketModel& model, const Strategy& strategy, int n_paths,
                            std::uint64_t seed) {
  PathEnsemble ens = allocate(model, n_paths, seed);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n_paths; ++p) simulate_one(model, strategy, ens, p);
  return ens;
}

namespace reference {

PathEnsemble simulate_paths_serial(const MarketModel& model, const Strategy& strategy, int n_paths,
                                   std::uint64_t seed) {
  PathEnsemble ens = allocate(model, n_paths, seed);
  for (int p = 0; p < n_paths; ++p) simulate_one(model, strategy, ens, p);
  return ens;
}

}  // namespace reference

}  // namespace indiff
