// indiff: exponential-utility value functions and indifference prices under
// default risk. See README.md for the configuration schema.

#include <omp.h>

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>

#include "indiff/approx.hpp"
#include "indiff/config.hpp"
#include "indiff/errors.hpp"
#include "indiff/oracle.hpp"
#include "indiff/pricing.hpp"
#include "indiff/report.hpp"

namespace {

using namespace indiff;
using ojson = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool no_timing = false;
};

struct Numerics {
  SpaceGrid space;
  Quadrature quad;
  SolverOptions solver;
};

Numerics numerics_for(const RunConfig& cfg) {
  return {SpaceGrid::for_model(cfg.model, cfg.numerics.M, cfg.numerics.L_mult),
          Quadrature::gauss_hermite(cfg.numerics.quad_nodes), {cfg.numerics.fixed_point}};
}

void print(const ojson& j) { emit_report(j.dump(2) + "\n", "-"); }

int cmd_validate(const RunConfig& cfg) {
  const ValidationReport rep = validate_model(cfg.model);
  ojson j;
  j["valid"] = rep.ok();
  j["violations"] = rep.violations;
  j["market_price_of_risk"] = ojson::array();
  for (const auto& p : rep.premia) {
    j["market_price_of_risk"].push_back(
        {{"regime", p.regime == Regime::pre_default ? "pre_default" : "post_default"},
         {"start", p.start},
         {"alpha", p.alpha}});
  }
  print(j);
  for (const auto& v : rep.violations) std::cerr << "model: " << v << '\n';
  return rep.ok() ? kOk : kValidation;
}

int cmd_solve(const RunConfig& cfg) {
  require_valid(cfg.model);
  const Numerics num = numerics_for(cfg);
  const StrategySet set = StrategySet::symmetric(cfg.numerics.k);
  const ValueSurface surface = solve_bsde(cfg.model, cfg.claim, set, num.space, num.quad, num.solver);
  if (!cfg.output.surface.empty()) {
    std::ostringstream os;
    write_surface_csv(surface, os);
    emit_report(os.str(), cfg.output.surface);
  }
  ojson j;
  j["J0"] = surface_at_origin(surface);
  j["k"] = cfg.numerics.k;
  j["claim"] = cfg.claim.describe();
  j["numerics"] = numerics_json(cfg);
  print(j);
  return kOk;
}

int cmd_converge(const RunConfig& cfg, const Flags& flags) {
  require_valid(cfg.model);
  const Numerics num = numerics_for(cfg);
  SweepOptions opts;
  opts.solver = num.solver;
  KSweepResult sweep;
  if (!cfg.numerics.ks.empty()) {
    sweep = k_sweep(cfg.model, cfg.claim, num.space, num.quad, cfg.numerics.ks, opts);
  } else {
    sweep = converge(cfg.model, cfg.claim, num.space, num.quad, cfg.numerics.k0,
                     cfg.numerics.tol_rel, opts)
                .sweep;
  }
  if (!cfg.output.sweep.empty()) {
    std::ostringstream os;
    write_sweep_csv(sweep, os, !flags.no_timing);
    emit_report(os.str(), cfg.output.sweep);
  }
  ojson j;
  j["J0"] = sweep.J0s.back();
  j["converged"] = sweep.converged;
  j["k_star"] = sweep.k_star ? ojson(*sweep.k_star) : ojson(nullptr);
  j["monotonicity_violations"] = ojson::array();
  for (const auto& v : sweep.monotonicity_violations) {
    j["monotonicity_violations"].push_back({{"k", sweep.ks[v.index + 1]}, {"excess", v.excess}});
    std::cerr << "approx: J0 increased by " << v.excess << " at k = " << sweep.ks[v.index + 1]
              << '\n';
  }
  j["numerics"] = numerics_json(cfg);
  print(j);
  return kOk;
}

int cmd_price(const RunConfig& cfg) {
  require_valid(cfg.model);
  const Numerics num = numerics_for(cfg);
  const PriceReport rep = indifference_price(cfg.model, cfg.claim, num.space, num.quad,
                                             cfg.numerics.k0, cfg.numerics.tol_rel, num.solver);
  const std::string text = price_report_json(rep).dump(2) + "\n";
  emit_report(text, cfg.output.report.empty() ? "-" : cfg.output.report);
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, const Flags& flags) {
  require_valid(cfg.model);
  const Numerics num = numerics_for(cfg);
  const std::uint64_t seed = flags.seed.value_or(cfg.oracle.seed);
  const double k = cfg.numerics.k;
  const ValueSurface surface = solve_bsde(cfg.model, cfg.claim, StrategySet::symmetric(k),
                                          num.space, num.quad, num.solver);
  const double j_solver = surface_at_origin(surface);

  DPSettings dp;
  dp.steps = cfg.oracle.N_small;
  dp.quantizer = cfg.oracle.q;
  dp.strategies = cfg.oracle.G;
  const DPResult bf = brute_force_dp(cfg.model, cfg.claim, k, dp);

  const Strategy strategy = cfg.oracle.strategy == "zero"
                                ? Strategy([](double, double, int) { return 0.0; })
                                : extract_optimal_strategy(surface);
  const DriftReport drift = martingale_check(surface, strategy, cfg.oracle.n_paths, seed);
  if (!cfg.output.drift.empty()) {
    std::ostringstream os;
    write_drift_csv(drift, os);
    emit_report(os.str(), cfg.output.drift);
  }
  if (!cfg.output.paths.empty() && cfg.oracle.dump_paths > 0) {
    const PathEnsemble paths = simulate_paths(cfg.model, strategy, cfg.oracle.dump_paths, seed);
    std::ostringstream os;
    write_paths_csv(paths, os);
    emit_report(os.str(), cfg.output.paths);
  }

  ojson j;
  j["J0_solver"] = j_solver;
  j["J0_dp"] = bf.J0;
  j["relative_gap"] = std::abs(bf.J0 - j_solver) / j_solver;
  j["dp_nodes"] = bf.nodes;
  j["strategy"] = cfg.oracle.strategy;
  j["drift_mean"] = drift.aggregate_mean;
  j["drift_se"] = drift.aggregate_se;
  j["martingale_3se"] = drift.is_martingale(3.0);
  j["submartingale_3se"] = drift.is_submartingale(3.0);
  j["seed"] = seed;
  j["numerics"] = numerics_json(cfg);
  print(j);
  return kOk;
}

int dispatch(const std::string& sub, const Flags& flags) {
  const RunConfig cfg = load_config(flags.config);
  if (sub == "validate") return cmd_validate(cfg);
  if (sub == "solve") return cmd_solve(cfg);
  if (sub == "converge") return cmd_converge(cfg, flags);
  if (sub == "price") return cmd_price(cfg);
  return cmd_oracle(cfg, flags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-utility value functions and indifference prices under default risk"};
  app.require_subcommand(1);
  Flags flags;
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "Override the configured Monte Carlo seed");
  app.add_flag("--no-timing", flags.no_timing, "Write 0 in the sweep runtime column");

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"validate", "Check the market model only"},
      {"solve", "One BSDE solve on C = [-k, k]; surface CSV"},
      {"converge", "k-sweep or k-doubling; sweep CSV"},
      {"price", "Indifference buying/selling price; JSON report"},
      {"oracle", "Brute-force DP comparison and martingale check; drift CSV"}};
  for (const auto& [name, help] : subs) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("config", flags.config, "Configuration JSON")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kValidation;
  }
  if (threads > 0) omp_set_num_threads(threads);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return dispatch(sub, flags);
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "cli: unexpected failure: " << e.what() << '\n';
    return kNumerical;
  }
}
