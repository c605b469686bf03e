#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace indiff {

/// Default state of the single name: 0 before default, 1 after.
enum class Regime : int { pre_default = 0, post_default = 1 };

/// Uniform time discretization of [0, T].
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  double dt() const noexcept { return horizon / steps; }
  /// t_i = i*T/N, exact at i = N.
  double time(int i) const noexcept { return i == steps ? horizon : i * dt(); }
};

/// One piecewise-constant interval of the coefficient schedule, valid from
/// `start` until the next segment's start.
struct CoeffSegment {
  double start = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double beta = 0.0;    // ignored post default
  double lambda = 0.0;  // ignored post default
};

/// Coefficients of the driver at a fixed (t, regime), plus the risk aversion.
struct CoeffSnapshot {
  double mu = 0.0;
  double sigma = 1.0;
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
};

/// Deterministic regime-switching coefficients. Post-default has no jump:
/// lambda and beta are forced to zero when queried.
struct RegimeCoefficients {
  std::vector<CoeffSegment> pre_default;
  std::vector<CoeffSegment> post_default;

  static RegimeCoefficients constant(double mu, double sigma, double beta, double lambda);
  static RegimeCoefficients constant(double mu_pre, double sigma_pre, double beta, double lambda,
                                     double mu_post, double sigma_post);

  const CoeffSegment& segment_at(Regime r, double t) const;
  double sigma_max() const;
  double lambda_max() const;
};

struct MarketModel {
  TimeGrid grid;
  RegimeCoefficients coeffs;
  double gamma = 1.0;
  double s0 = 1.0;

  /// Coefficients at time t in regime r (post default: lambda = beta = 0).
  CoeffSnapshot snapshot(double t, Regime r) const;
};

struct RiskPremium {
  Regime regime;
  double start;
  double alpha;  // (mu + lambda*beta) / sigma
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<RiskPremium> premia;

  bool ok() const noexcept { return violations.empty(); }
};

/// Never throws; lists every violated invariant and the market price of risk
/// per regime and interval.
ValidationReport validate_model(const MarketModel& model);

/// Throws ValidationError listing all violations if the model is unusable.
void require_valid(const MarketModel& model);

// --- claims -----------------------------------------------------------------

struct ConstantClaim {
  double value = 0.0;
};

/// Pays `survive` if no default by T, `defaulted` otherwise.
struct DefaultIndicatorClaim {
  double survive = 1.0;
  double defaulted = 0.0;
};

/// Payoff tabulated on stock nodes per default state; linear in log s between
/// nodes, clamped outside.
struct StockPayoffClaim {
  std::vector<double> s_nodes;
  std::array<std::vector<double>, 2> values;
};

class Claim {
 public:
  using Variant = std::variant<ConstantClaim, DefaultIndicatorClaim, StockPayoffClaim>;

  Claim() : Claim(ConstantClaim{}) {}
  Claim(ConstantClaim c);
  Claim(DefaultIndicatorClaim c);
  Claim(StockPayoffClaim c);

  static Claim constant(double c) { return Claim(ConstantClaim{c}); }
  static Claim default_indicator(double survive, double defaulted) {
    return Claim(DefaultIndicatorClaim{survive, defaulted});
  }
  /// Tabulates payoff(s, n) on the given strictly increasing positive nodes.
  static Claim tabulate(std::span<const double> s_nodes,
                        const std::function<double(double, int)>& payoff);

  const Variant& variant() const noexcept { return v_; }
  double lower_bound() const noexcept { return lo_; }
  double upper_bound() const noexcept { return hi_; }
  bool nonnegative() const noexcept { return lo_ >= 0.0; }
  bool depends_on_stock() const noexcept;

  /// xi + c
  Claim shifted(double c) const;
  /// -xi
  Claim negated() const;

  std::string describe() const;

 private:
  void compute_bounds();

  Variant v_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

double claim_payoff(const Claim& claim, double s_T, int n_T);

// --- simulation ---------------------------------------------------------------

/// Amount of money held in the stock as a function of (t, S_{t-}, N_{t-}).
using Strategy = std::function<double(double t, double s, int n)>;

/// Flat per-path storage, row (path, step) at path*(steps+1)+step.
struct PathEnsemble {
  std::uint64_t seed = 0;
  int n_paths = 0;
  int steps = 0;
  double dt = 0.0;
  std::vector<double> W;
  std::vector<int> N;
  std::vector<double> S;
  std::vector<double> X;
  std::vector<double> default_time;  // NaN when no default before T

  std::size_t index(int path, int step) const noexcept {
    return static_cast<std::size_t>(path) * (steps + 1) + step;
  }
};

/// State after each Euler step of a single path, as produced by PathStepper.
struct PathState {
  double t = 0.0;
  double W = 0.0;
  int N = 0;
  double S = 0.0;
  double X = 0.0;
};

/// Euler stepping of (W, N, S, X) for one path. Randomness comes from a
/// counter-based stream keyed by (seed, path), so every path is independent
/// of the order in which paths are processed.
class PathStepper {
 public:
  PathStepper(const MarketModel& model, std::uint64_t seed, std::uint64_t path);

  const PathState& state() const noexcept { return st_; }
  int step_index() const noexcept { return i_; }
  /// Advances one step holding `pi` in the stock over [t_i, t_{i+1}).
  void advance(double pi);

 private:
  const MarketModel& model_;
  std::uint64_t seed_;
  std::uint64_t path_;
  int i_ = 0;
  PathState st_;
};

PathEnsemble simulate_paths(const MarketModel& model, const Strategy& strategy, int n_paths,
                            std::uint64_t seed);

namespace reference {
PathEnsemble simulate_paths_serial(const MarketModel& model, const Strategy& strategy, int n_paths,
                                   std::uint64_t seed);
}  // namespace reference

}  // namespace indiff
