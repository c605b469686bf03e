#include <algorithm>
#include <cmath>

#include "indiff/errors.hpp"
#include "indiff/oracle.hpp"

namespace indiff {

bool DriftReport::is_martingale(double z) const {
  return std::abs(aggregate_mean) <= z * aggregate_se;
}

bool DriftReport::is_submartingale(double z) const {
  return aggregate_mean >= -z * aggregate_se;
}

namespace {

enum class Execution { serial, parallel };

constexpr int kBlock = 256;

// Sums and sums of squares of per-step increments over one block of paths.
struct BlockSums {
  std::vector<double> sum, sumsq;
  double total = 0.0;
  double total_sq = 0.0;
};

void run_block(const ValueSurface& surface, const Strategy& strategy, std::uint64_t seed,
               int first, int last, BlockSums& out) {
  const MarketModel& model = surface.model();
  const int N = model.grid.steps;
  out.sum.assign(N, 0.0);
  out.sumsq.assign(N, 0.0);
  for (int p = first; p < last; ++p) {
    PathStepper stepper(model, seed, static_cast<std::uint64_t>(p));
    double v = surface.value_at(0, model.s0, 0);
    const double v0 = v;
    for (int i = 0; i < N; ++i) {
      const PathState& s = stepper.state();
      stepper.advance(strategy(s.t, s.S, s.N));
      const PathState& nx = stepper.state();
      const double v_next = std::exp(-model.gamma * nx.X) * surface.value_at(i + 1, nx.S, nx.N);
      const double d = v_next - v;
      out.sum[i] += d;
      out.sumsq[i] += d * d;
      v = v_next;
    }
    const double tot = v - v0;
    out.total += tot;
    out.total_sq += tot * tot;
  }
}

double standard_error(double sum, double sumsq, int n) {
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1));
  return std::sqrt(var / n);
}

DriftReport check(Execution exec, const ValueSurface& surface, const Strategy& strategy,
                  int n_paths, std::uint64_t seed) {
  if (n_paths < 1000) throw ValidationError("oracle: martingale check needs at least 1000 paths");
  const MarketModel& model = surface.model();
  const int N = model.grid.steps;
  const int n_blocks = (n_paths + kBlock - 1) / kBlock;
  std::vector<BlockSums> blocks(n_blocks);

  auto body = [&](int b) {
    run_block(surface, strategy, seed, b * kBlock, std::min(n_paths, (b + 1) * kBlock), blocks[b]);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < n_blocks; ++b) body(b);
  } else {
    for (int b = 0; b < n_blocks; ++b) body(b);
  }

  DriftReport rep;
  rep.n_paths = n_paths;
  std::vector<double> sum(N, 0.0), sumsq(N, 0.0);
  double total = 0.0, total_sq = 0.0;
  for (const auto& blk : blocks) {
    for (int i = 0; i < N; ++i) {
      sum[i] += blk.sum[i];
      sumsq[i] += blk.sumsq[i];
    }
    total += blk.total;
    total_sq += blk.total_sq;
  }
  for (int i = 0; i < N; ++i) {
    rep.t.push_back(model.grid.time(i));
    rep.mean.push_back(sum[i] / n_paths);
    rep.stderr_.push_back(standard_error(sum[i], sumsq[i], n_paths));
  }
  rep.aggregate_mean = total / n_paths;
  rep.aggregate_se = standard_error(total, total_sq, n_paths);
  return rep;
}

}  // namespace

DriftReport martingale_check(const ValueSurface& surface, const Strategy& strategy, int n_paths,
                             std::uint64_t seed) {
  return check(Execution::parallel, surface, strategy, n_paths, seed);
}

namespace reference {

DriftReport martingale_check_serial(const ValueSurface& surface, const Strategy& strategy,
                                    int n_paths, std::uint64_t seed) {
  return check(Execution::serial, surface, strategy, n_paths, seed);
}

}  // namespace reference

}  // namespace indiff
