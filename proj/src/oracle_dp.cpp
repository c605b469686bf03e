#include <algorithm>
#include <cmath>
#include <limits>

#include "indiff/errors.hpp"
#include "indiff/oracle.hpp"

namespace indiff {

GaussianQuantizer GaussianQuantizer::binomial(int q) {
  if (q < 2 || q > 9) throw ValidationError("oracle: quantizer needs 2 <= q <= 9 points");
  GaussianQuantizer g;
  const double h = 2.0 / std::sqrt(static_cast<double>(q - 1));
  const double center = 0.5 * (q - 1);
  double binom = 1.0;
  const double scale = std::ldexp(1.0, -(q - 1));
  for (int b = 0; b < q; ++b) {
    g.points.push_back((b - center) * h);
    g.weights.push_back(binom * scale);
    binom = binom * (q - 1 - b) / (b + 1);
  }
  for (int b = 0; b < q / 2; ++b) g.points[q - 1 - b] = -g.points[b];
  if (q % 2 == 1) g.points[q / 2] = 0.0;
  return g;
}

namespace {

enum class Execution { serial, parallel };

std::vector<double> strategy_grid(double k, int G) {
  if (G == 1) return {0.0};
  std::vector<double> grid(G);
  for (int g = 0; g < G; ++g) grid[g] = k * (2.0 * g / (G - 1) - 1.0);
  for (int g = 0; g < G / 2; ++g) grid[G - 1 - g] = -grid[g];
  if (G % 2 == 1) grid[G / 2] = 0.0;
  return grid;
}

// Discounting factors exp(-gamma pi dX) of one period for every (holding,
// branch) pair, plus the log-price moves of each branch.
struct Period {
  int q = 0;
  double default_prob = 0.0;
  std::vector<double> no_jump;  // [g * q + b]
  std::vector<double> jump;     // [g * q + b]; empty post default
  std::vector<double> moves;    // log-price move per branch, no jump
  double jump_shift = 0.0;
};

Period make_period(const MarketModel& model, const GaussianQuantizer& quant,
                   const std::vector<double>& grid, double t, double dt, Regime r) {
  const CoeffSnapshot c = model.snapshot(t, r);
  Period p;
  p.q = static_cast<int>(quant.points.size());
  const double sq = std::sqrt(dt);
  for (double pi : grid) {
    for (double z : quant.points) {
      const double dx = c.mu * dt + c.sigma * sq * z;
      p.no_jump.push_back(std::exp(-c.gamma * pi * dx));
      if (r == Regime::pre_default) p.jump.push_back(std::exp(-c.gamma * pi * (dx + c.beta)));
    }
  }
  for (double z : quant.points) p.moves.push_back((c.mu - 0.5 * c.sigma * c.sigma) * dt + c.sigma * sq * z);
  if (r == Regime::pre_default) {
    p.default_prob = -std::expm1(-c.lambda * dt);
    p.jump_shift = std::log1p(c.beta);
  }
  return p;
}

// min over holdings of the expected next value; children are
// no_jump_next[b] (and jump_next[b] before default).
double best_value(const Period& p, const GaussianQuantizer& quant, std::size_t G,
                  const double* no_jump_next, const double* jump_next) {
  double best = std::numeric_limits<double>::infinity();
  const int q = p.q;
  for (std::size_t g = 0; g < G; ++g) {
    double v = 0.0;
    for (int b = 0; b < q; ++b) {
      double e = p.no_jump[g * q + b] * no_jump_next[b];
      if (jump_next != nullptr) {
        e = (1.0 - p.default_prob) * e + p.default_prob * p.jump[g * q + b] * jump_next[b];
      }
      v += quant.weights[b] * e;
    }
    best = std::min(best, v);
  }
  return best;
}

template <class Body>
void for_nodes(Execution exec, std::size_t n, const Body& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < count; ++a) body(static_cast<std::size_t>(a));
  } else {
    for (std::ptrdiff_t a = 0; a < count; ++a) body(static_cast<std::size_t>(a));
  }
}

DPResult dp_collapsed(const MarketModel& model, const Claim& claim,
                      const GaussianQuantizer& quant, const std::vector<double>& grid, int steps) {
  const double dt = model.grid.horizon / steps;
  const int q = static_cast<int>(quant.points.size());
  double v_pre = std::exp(-model.gamma * claim_payoff(claim, model.s0, 0));
  double v_post = std::exp(-model.gamma * claim_payoff(claim, model.s0, 1));
  std::vector<double> pre_next(q), post_next(q);
  for (int i = steps - 1; i >= 0; --i) {
    const double t = i * dt;
    const Period post = make_period(model, quant, grid, t, dt, Regime::post_default);
    const Period pre = make_period(model, quant, grid, t, dt, Regime::pre_default);
    std::fill(pre_next.begin(), pre_next.end(), v_pre);
    std::fill(post_next.begin(), post_next.end(), v_post);
    v_pre = best_value(pre, quant, grid.size(), pre_next.data(), post_next.data());
    v_post = best_value(post, quant, grid.size(), post_next.data(), nullptr);
  }
  return {v_pre, static_cast<std::size_t>(2 * steps + 2), true};
}

DPResult dp_tree(Execution exec, const MarketModel& model, const Claim& claim,
                 const GaussianQuantizer& quant, const std::vector<double>& grid, int steps,
                 std::size_t budget) {
  const double dt = model.grid.horizon / steps;
  const std::size_t q = quant.points.size();

  std::vector<std::size_t> n_pre(steps + 1), n_post(steps + 1);
  n_pre[0] = 1;
  n_post[0] = 0;
  std::size_t total = 1;
  for (int i = 1; i <= steps; ++i) {
    n_pre[i] = n_pre[i - 1] * q;
    n_post[i] = q * (n_pre[i - 1] + n_post[i - 1]);
    total += n_pre[i] + n_post[i];
    if (total > budget) {
      throw ValidationError("oracle: DP tree exceeds the node budget (" + std::to_string(budget) +
                            " nodes); reduce N_small or q");
    }
  }

  std::vector<Period> pre(steps), post(steps);
  for (int i = 0; i < steps; ++i) {
    pre[i] = make_period(model, quant, grid, i * dt, dt, Regime::pre_default);
    post[i] = make_period(model, quant, grid, i * dt, dt, Regime::post_default);
  }

  // forward: log-price of every node
  std::vector<std::vector<double>> x_pre(steps + 1), x_post(steps + 1);
  x_pre[0] = {0.0};
  for (int i = 0; i < steps; ++i) {
    x_pre[i + 1].resize(n_pre[i + 1]);
    x_post[i + 1].resize(n_post[i + 1]);
    const Period& a = pre[i];
    const Period& c = post[i];
    for (std::size_t node = 0; node < n_pre[i]; ++node) {
      for (std::size_t b = 0; b < q; ++b) {
        x_pre[i + 1][node * q + b] = x_pre[i][node] + a.moves[b];
        x_post[i + 1][node * q + b] = x_pre[i][node] + a.moves[b] + a.jump_shift;
      }
    }
    const std::size_t off = q * n_pre[i];
    for (std::size_t node = 0; node < n_post[i]; ++node) {
      for (std::size_t b = 0; b < q; ++b) {
        x_post[i + 1][off + node * q + b] = x_post[i][node] + c.moves[b];
      }
    }
  }

  // backward
  std::vector<double> v_pre(n_pre[steps]), v_post(n_post[steps]);
  for (std::size_t a = 0; a < v_pre.size(); ++a) {
    v_pre[a] = std::exp(-model.gamma * claim_payoff(claim, model.s0 * std::exp(x_pre[steps][a]), 0));
  }
  for (std::size_t a = 0; a < v_post.size(); ++a) {
    v_post[a] = std::exp(-model.gamma * claim_payoff(claim, model.s0 * std::exp(x_post[steps][a]), 1));
  }
  for (int i = steps - 1; i >= 0; --i) {
    std::vector<double> up_pre(n_pre[i]), up_post(n_post[i]);
    const Period& a = pre[i];
    const Period& c = post[i];
    for_nodes(exec, n_pre[i], [&](std::size_t node) {
      up_pre[node] = best_value(a, quant, grid.size(), v_pre.data() + node * q,
                                v_post.data() + node * q);
    });
    const std::size_t off = q * n_pre[i];
    for_nodes(exec, n_post[i], [&](std::size_t node) {
      up_post[node] = best_value(c, quant, grid.size(), v_post.data() + off + node * q, nullptr);
    });
    v_pre = std::move(up_pre);
    v_post = std::move(up_post);
  }
  return {v_pre[0], total, false};
}

DPResult run_dp(Execution exec, const MarketModel& model, const Claim& claim, double k,
                const DPSettings& s) {
  if (s.steps < 1 || s.steps > 16) throw ValidationError("oracle: N_small must lie in [1, 16]");
  if (s.strategies < 1 || s.strategies > 401) throw ValidationError("oracle: G must lie in [1, 401]");
  if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("oracle: k must be nonnegative");
  MarketModel coarse = model;
  coarse.grid.steps = s.steps;
  require_valid(coarse);

  const GaussianQuantizer quant = GaussianQuantizer::binomial(s.quantizer);
  const std::vector<double> grid = strategy_grid(k, s.strategies);
  if (!claim.depends_on_stock()) return dp_collapsed(coarse, claim, quant, grid, s.steps);
  return dp_tree(exec, coarse, claim, quant, grid, s.steps, s.node_budget);
}

}  // namespace

DPResult brute_force_dp(const MarketModel& model, const Claim& claim, double k,
                        const DPSettings& settings) {
  return run_dp(Execution::parallel, model, claim, k, settings);
}

namespace reference {

DPResult brute_force_dp_serial(const MarketModel& model, const Claim& claim, double k,
                               const DPSettings& settings) {
  return run_dp(Execution::serial, model, claim, k, settings);
}

}  // namespace reference

}  // namespace indiff
