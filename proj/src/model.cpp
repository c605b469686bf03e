#include "indiff/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "indiff/errors.hpp"

namespace indiff {

namespace {

// Breakpoints that coincide with grid times up to rounding select the later
// segment.
constexpr double kTimeSlack = 1e-12;

void check_schedule(const std::vector<CoeffSegment>& segs, const char* name, double horizon,
                    std::vector<std::string>& out) {
  if (segs.empty()) {
    out.push_back(std::string(name) + ": coefficient schedule is empty");
    return;
  }
  if (std::abs(segs.front().start) > kTimeSlack) {
    out.push_back(std::string(name) + ": breakpoints must start at t = 0");
  }
  for (std::size_t k = 1; k < segs.size(); ++k) {
    if (!(segs[k].start > segs[k - 1].start)) {
      out.push_back(std::string(name) + ": breakpoints must be strictly increasing");
      break;
    }
  }
  if (segs.back().start >= horizon) {
    out.push_back(std::string(name) + ": last breakpoint must lie before T");
  }
}

}  // namespace

RegimeCoefficients RegimeCoefficients::constant(double mu, double sigma, double beta,
                                                double lambda) {
  return constant(mu, sigma, beta, lambda, mu, sigma);
}

RegimeCoefficients RegimeCoefficients::constant(double mu_pre, double sigma_pre, double beta,
                                                double lambda, double mu_post,
                                                double sigma_post) {
  RegimeCoefficients c;
  c.pre_default.push_back({0.0, mu_pre, sigma_pre, beta, lambda});
  c.post_default.push_back({0.0, mu_post, sigma_post, 0.0, 0.0});
  return c;
}

const CoeffSegment& RegimeCoefficients::segment_at(Regime r, double t) const {
  const auto& segs = r == Regime::pre_default ? pre_default : post_default;
  auto it = std::upper_bound(segs.begin(), segs.end(), t + kTimeSlack,
                             [](double v, const CoeffSegment& s) { return v < s.start; });
  if (it == segs.begin()) return segs.front();
  return *std::prev(it);
}

double RegimeCoefficients::sigma_max() const {
  double m = 0.0;
  for (const auto& s : pre_default) m = std::max(m, s.sigma);
  for (const auto& s : post_default) m = std::max(m, s.sigma);
  return m;
}

double RegimeCoefficients::lambda_max() const {
  double m = 0.0;
  for (const auto& s : pre_default) m = std::max(m, s.lambda);
  return m;
}

CoeffSnapshot MarketModel::snapshot(double t, Regime r) const {
  const CoeffSegment& s = coeffs.segment_at(r, t);
  if (r == Regime::post_default) return {s.mu, s.sigma, 0.0, 0.0, gamma};
  return {s.mu, s.sigma, s.lambda, s.beta, gamma};
}

ValidationReport validate_model(const MarketModel& model) {
  ValidationReport rep;
  auto& v = rep.violations;
  const TimeGrid& g = model.grid;

  if (!(g.horizon > 0.0) || !std::isfinite(g.horizon)) v.push_back("T must be positive");
  if (g.steps < 1) v.push_back("N must be at least 1");
  if (!(model.gamma > 0.0) || !std::isfinite(model.gamma)) v.push_back("gamma must be positive");
  if (!(model.s0 > 0.0) || !std::isfinite(model.s0)) v.push_back("s0 must be positive");

  check_schedule(model.coeffs.pre_default, "pre_default", g.horizon, v);
  check_schedule(model.coeffs.post_default, "post_default", g.horizon, v);

  auto scan = [&](const std::vector<CoeffSegment>& segs, Regime r) {
    const char* name = r == Regime::pre_default ? "pre_default" : "post_default";
    for (const auto& s : segs) {
      std::ostringstream where;
      where << name << " segment starting at t=" << s.start << ": ";
      if (!(s.sigma > 0.0)) v.push_back(where.str() + "sigma must be positive");
      if (!std::isfinite(s.mu)) v.push_back(where.str() + "mu must be finite");
      if (r == Regime::pre_default) {
        if (!(s.beta > -1.0)) v.push_back(where.str() + "beta must exceed -1");
        if (!(s.lambda >= 0.0)) v.push_back(where.str() + "lambda must be nonnegative");
      }
      const double lambda = r == Regime::pre_default ? s.lambda : 0.0;
      const double beta = r == Regime::pre_default ? s.beta : 0.0;
      const double alpha = (s.mu + lambda * beta) / s.sigma;
      rep.premia.push_back({r, s.start, alpha});
      if (!std::isfinite(alpha)) v.push_back(where.str() + "market price of risk is not finite");
    }
  };
  scan(model.coeffs.pre_default, Regime::pre_default);
  scan(model.coeffs.post_default, Regime::post_default);

  if (g.steps >= 1 && g.horizon > 0.0 && !(g.dt() * model.coeffs.lambda_max() < 1.0)) {
    v.push_back("dt * max(lambda) must be below 1");
  }
  return rep;
}

void require_valid(const MarketModel& model) {
  const auto rep = validate_model(model);
  if (rep.ok()) return;
  std::string msg = "model: invalid market model:";
  for (const auto& s : rep.violations) msg += "\n  - " + s;
  throw ValidationError(msg);
}

// --- claims -------------------------------------------------------------------

Claim::Claim(ConstantClaim c) : v_(c) { compute_bounds(); }
Claim::Claim(DefaultIndicatorClaim c) : v_(c) { compute_bounds(); }

Claim::Claim(StockPayoffClaim c) : v_(std::move(c)) {
  const auto& t = std::get<StockPayoffClaim>(v_);
  if (t.s_nodes.empty()) throw ValidationError("model: stock payoff table has no nodes");
  for (std::size_t k = 0; k < t.s_nodes.size(); ++k) {
    if (!(t.s_nodes[k] > 0.0)) throw ValidationError("model: stock payoff nodes must be positive");
    if (k > 0 && !(t.s_nodes[k] > t.s_nodes[k - 1])) {
      throw ValidationError("model: stock payoff nodes must be strictly increasing");
    }
  }
  for (const auto& vals : t.values) {
    if (vals.size() != t.s_nodes.size()) {
      throw ValidationError("model: stock payoff table needs one value per node and state");
    }
  }
  compute_bounds();
}

Claim Claim::tabulate(std::span<const double> s_nodes,
                      const std::function<double(double, int)>& payoff) {
  StockPayoffClaim t;
  t.s_nodes.assign(s_nodes.begin(), s_nodes.end());
  for (int n = 0; n < 2; ++n) {
    t.values[n].reserve(s_nodes.size());
    for (double s : s_nodes) t.values[n].push_back(payoff(s, n));
  }
  return Claim(std::move(t));
}

void Claim::compute_bounds() {
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConstantClaim>) {
          lo_ = hi_ = c.value;
        } else if constexpr (std::is_same_v<T, DefaultIndicatorClaim>) {
          lo_ = std::min(c.survive, c.defaulted);
          hi_ = std::max(c.survive, c.defaulted);
        } else {
          lo_ = std::numeric_limits<double>::infinity();
          hi_ = -lo_;
          for (const auto& vals : c.values) {
            for (double x : vals) {
              lo_ = std::min(lo_, x);
              hi_ = std::max(hi_, x);
            }
          }
        }
      },
      v_);
  if (std::isnan(lo_) || std::isnan(hi_) || lo_ == -std::numeric_limits<double>::infinity()) {
    throw ValidationError("model: claim must be bounded below");
  }
}

bool Claim::depends_on_stock() const noexcept {
  return std::holds_alternative<StockPayoffClaim>(v_);
}

Claim Claim::shifted(double c) const {
  return std::visit(
      [c](const auto& x) -> Claim {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstantClaim>) {
          return Claim(ConstantClaim{x.value + c});
        } else if constexpr (std::is_same_v<T, DefaultIndicatorClaim>) {
          return Claim(DefaultIndicatorClaim{x.survive + c, x.defaulted + c});
        } else {
          StockPayoffClaim t = x;
          for (auto& vals : t.values)
            for (double& v : vals) v += c;
          return Claim(std::move(t));
        }
      },
      v_);
}

Claim Claim::negated() const {
  return std::visit(
      [](const auto& x) -> Claim {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstantClaim>) {
          return Claim(ConstantClaim{-x.value});
        } else if constexpr (std::is_same_v<T, DefaultIndicatorClaim>) {
          return Claim(DefaultIndicatorClaim{-x.survive, -x.defaulted});
        } else {
          StockPayoffClaim t = x;
          for (auto& vals : t.values)
            for (double& v : vals) v = -v;
          return Claim(std::move(t));
        }
      },
      v_);
}

std::string Claim::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&os](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstantClaim>) {
          os << "constant(" << x.value << ")";
        } else if constexpr (std::is_same_v<T, DefaultIndicatorClaim>) {
          os << "default_indicator(survive=" << x.survive << ", default=" << x.defaulted << ")";
        } else {
          os << "stock_payoff(" << x.s_nodes.size() << " nodes)";
        }
      },
      v_);
  return os.str();
}

double claim_payoff(const Claim& claim, double s_T, int n_T) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstantClaim>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, DefaultIndicatorClaim>) {
          return n_T == 0 ? x.survive : x.defaulted;
        } else {
          const auto& nodes = x.s_nodes;
          const auto& vals = x.values[n_T == 0 ? 0 : 1];
          if (s_T <= nodes.front()) return vals.front();
          if (s_T >= nodes.back()) return vals.back();
          const auto hi = static_cast<std::size_t>(
              std::upper_bound(nodes.begin(), nodes.end(), s_T) - nodes.begin());
          const std::size_t lo = hi - 1;
          if (s_T == nodes[lo]) return vals[lo];
          const double w = std::log(s_T / nodes[lo]) / std::log(nodes[hi] / nodes[lo]);
          return (1.0 - w) * vals[lo] + w * vals[hi];
        }
      },
      claim.variant());
}

}  // namespace indiff
