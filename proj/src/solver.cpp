#include "indiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "indiff/errors.hpp"

namespace indiff {

SpaceGrid::SpaceGrid(int intervals, double half_width) : m_(intervals), L_(half_width) {
  if (intervals < 2) throw ValidationError("solver: space grid needs M >= 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ValidationError("solver: space grid half width must be positive");
  }
  dx_ = 2.0 * L_ / m_;
  nodes_.resize(m_ + 1);
  for (int j = 0; j <= m_; ++j) nodes_[j] = -L_ + j * dx_;
  // symmetric about 0 to the last bit
  for (int j = 0; j < (m_ + 1) / 2; ++j) nodes_[m_ - j] = -nodes_[j];
  if (m_ % 2 == 0) nodes_[m_ / 2] = 0.0;
}

SpaceGrid SpaceGrid::for_model(const MarketModel& model, int intervals, double l_mult) {
  const double L = l_mult * model.coeffs.sigma_max() * std::sqrt(model.grid.horizon);
  return SpaceGrid(intervals, L);
}

double SpaceGrid::interpolate(std::span<const double> values, double x) const noexcept {
  if (!(x > nodes_.front())) return values.front();
  if (!(x < nodes_.back())) return values.back();
  const double pos = (x + L_) / dx_;
  int k = std::min(static_cast<int>(pos), m_ - 1);
  // guard the floor against rounding in pos
  if (x < nodes_[k]) --k;
  else if (k + 1 < m_ && x >= nodes_[k + 1]) ++k;
  const double w = (x - nodes_[k]) / (nodes_[k + 1] - nodes_[k]);
  if (w == 0.0) return values[k];
  return values[k] + w * (values[k + 1] - values[k]);
}

ValueSurface::ValueSurface(MarketModel model, Claim claim, StrategySet set, SpaceGrid space)
    : model_(std::move(model)), claim_(std::move(claim)), set_(set), space_(std::move(space)) {
  const auto slices = static_cast<std::size_t>(model_.grid.steps + 1) * space_.size();
  y_.assign(2 * slices, 0.0);
  z_.assign(2 * slices, 0.0);
  pi_.assign(2 * slices, 0.0);
  u_.assign(slices, 0.0);
}

double ValueSurface::value_at(int i, double s, int n) const noexcept {
  return space_.interpolate(Y_slice(i, n), std::log(s / model_.s0));
}

// Grants the scheme write access to the surface arrays.
class SurfaceBuilder {
 public:
  explicit SurfaceBuilder(ValueSurface& s) : s_(s) {}

  double* Y(int i, int n) { return s_.y_.data() + s_.slot(i, n); }
  double* Z(int i, int n) { return s_.z_.data() + s_.slot(i, n); }
  double* pi(int i, int n) { return s_.pi_.data() + s_.slot(i, n); }
  double* U(int i) { return s_.u_.data() + s_.row(i); }

 private:
  ValueSurface& s_;
};

namespace {

enum class Execution { serial, parallel };

// Per-step constants shared by every node of a slice.
struct StepContext {
  CoeffSnapshot coeffs;
  std::vector<double> moves;  // log-price moves per quadrature node
  double jump_shift = 0.0;    // log(1 + beta)
  double default_prob = 0.0;  // 1 - exp(-lambda dt)
};

StepContext make_context(const MarketModel& model, const Quadrature& quad, int i, Regime r) {
  StepContext ctx;
  const double dt = model.grid.dt();
  ctx.coeffs = model.snapshot(model.grid.time(i), r);
  const auto& c = ctx.coeffs;
  ctx.moves.resize(quad.size());
  for (int m = 0; m < quad.size(); ++m) {
    ctx.moves[m] = (c.mu - 0.5 * c.sigma * c.sigma) * dt + c.sigma * std::sqrt(dt) * quad.nodes[m];
  }
  if (r == Regime::pre_default) {
    ctx.jump_shift = std::log1p(c.beta);
    ctx.default_prob = -std::expm1(-c.lambda * dt);
  }
  return ctx;
}

struct Moments {
  double mean;
  double slope;  // E[Y' * xi] for the standard normal xi
};

// Quadrature mean and first moment of the next slice seen from x. Both are
// accumulated as deviations from the value at x and the first moment pairs
// mirrored nodes, so a flat slice yields its value and zero exactly.
Moments diffuse(const SpaceGrid& space, const Quadrature& quad, std::span<const double> next,
                const std::vector<double>& moves, double x) {
  const int m = quad.size();
  const double ref = space.interpolate(next, x);
  double dev = 0.0;
  double slope = 0.0;
  for (int k = 0; k < m / 2; ++k) {
    const int r = m - 1 - k;
    const double lo = space.interpolate(next, x + moves[k]);
    const double hi = space.interpolate(next, x + moves[r]);
    dev += quad.weights[k] * ((lo - ref) + (hi - ref));
    slope += quad.weights[r] * quad.nodes[r] * (hi - lo);
  }
  if (m % 2 == 1) dev += quad.weights[m / 2] * (space.interpolate(next, x + moves[m / 2]) - ref);
  return {ref + dev, slope};
}

struct NodeFailure {
  int node = -1;
  std::string message;
};

std::string failure_message(const char* what, int step, int node, Regime r, double a, double b) {
  std::ostringstream os;
  os.precision(12);
  os << "solver: " << what << " at step " << step << ", node " << node << " ("
     << (r == Regime::pre_default ? "pre" : "post") << "-default): " << a;
  if (!std::isnan(b)) os << ", " << b;
  os << "; refine the time grid or widen the space grid";
  return os.str();
}

template <class Kernel>
void for_each_node(Execution exec, int size, const Kernel& kernel, std::vector<NodeFailure>& fail) {
  // exceptions must not escape an OpenMP region
  auto guarded = [&](int j) {
    try {
      kernel(j, fail[j]);
    } catch (const std::exception& e) {
      fail[j] = {j, e.what()};
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < size; ++j) guarded(j);
  } else {
    for (int j = 0; j < size; ++j) guarded(j);
  }
  for (const auto& f : fail) {
    if (f.node >= 0) throw NumericalError(f.message);
  }
}

double advance(const CoeffSnapshot& c, const StrategySet& set, double dt, double e, double z,
               double u, bool refine, double& pi) {
  DriverMin d = minimize_driver(c, set, e, z, u);
  double y = e + dt * d.f_min;
  if (refine && y > 0.0 && y + u >= 0.0) {
    d = minimize_driver(c, set, y, z, u);
    y = e + dt * d.f_min;
  }
  pi = d.pi_star;
  return y;
}

ValueSurface solve(Execution exec, const MarketModel& model, const Claim& claim,
                   const StrategySet& set, const SpaceGrid& space, const Quadrature& quad,
                   const SolverOptions& options) {
  require_valid(model);
  if (!(set.lo <= set.hi) || !std::isfinite(set.lo) || !std::isfinite(set.hi)) {
    throw ValidationError("solver: strategy set must be a finite interval lo <= hi");
  }
  if (quad.size() < 1) throw ValidationError("solver: empty quadrature");

  ValueSurface surface(model, claim, set, space);
  SurfaceBuilder out(surface);
  const int N = model.grid.steps;
  const int J = space.size();
  const double dt = model.grid.dt();
  const double sqdt = std::sqrt(dt);
  const bool refine = options.fixed_point_refinement;
  std::vector<NodeFailure> fail(J);

  for (int n = 0; n < 2; ++n) {
    double* y = out.Y(N, n);
    for (int j = 0; j < J; ++j) {
      y[j] = std::exp(-model.gamma * claim_payoff(claim, model.s0 * std::exp(space.node(j)), n));
      if (!(y[j] > 0.0) || !std::isfinite(y[j])) {
        std::ostringstream os;
        os << "solver: terminal value exp(-gamma xi) is not representable at node " << j
           << " (state " << n << "): " << y[j] << "; rescale the claim or narrow the space grid";
        throw NumericalError(os.str());
      }
    }
  }

  // post-default slice: pure diffusion, lambda = 0
  for (int i = N - 1; i >= 0; --i) {
    const StepContext ctx = make_context(model, quad, i, Regime::post_default);
    const std::span<const double> next = surface.Y_slice(i + 1, 1);
    double* y = out.Y(i, 1);
    double* z = out.Z(i, 1);
    double* pi = out.pi(i, 1);
    for_each_node(
        exec, J,
        [&](int j, NodeFailure& f) {
          const Moments mo = diffuse(space, quad, next, ctx.moves, space.node(j));
          if (!(mo.mean > 0.0)) {
            f = {j, failure_message("conditional mean not positive", i, j, Regime::post_default,
                                    mo.mean, NAN)};
            return;
          }
          z[j] = mo.slope / sqdt;
          y[j] = advance(ctx.coeffs, set, dt, mo.mean, z[j], 0.0, refine, pi[j]);
          if (!(y[j] > 0.0)) {
            f = {j, failure_message("Y not positive", i, j, Regime::post_default, y[j], NAN)};
          }
        },
        fail);
  }

  // pre-default slice
  for (int i = N - 1; i >= 0; --i) {
    const StepContext ctx = make_context(model, quad, i, Regime::pre_default);
    const std::span<const double> next = surface.Y_slice(i + 1, 0);
    const std::span<const double> next_post = surface.Y_slice(i + 1, 1);
    const double p = ctx.default_prob;
    double* y = out.Y(i, 0);
    double* z = out.Z(i, 0);
    double* u = out.U(i);
    double* pi = out.pi(i, 0);
    for_each_node(
        exec, J,
        [&](int j, NodeFailure& f) {
          const double x = space.node(j);
          const Moments mo = diffuse(space, quad, next, ctx.moves, x);
          const double after_jump = space.interpolate(next_post, x + ctx.jump_shift);
          u[j] = after_jump - mo.mean;
          const double e = mo.mean + p * u[j];
          z[j] = (1.0 - p) * mo.slope / sqdt;
          if (!(e > 0.0) || !(e + u[j] >= 0.0)) {
            f = {j, failure_message("driver arguments out of domain (E, E + U)", i, j,
                                    Regime::pre_default, e, e + u[j])};
            return;
          }
          y[j] = advance(ctx.coeffs, set, dt, e, z[j], u[j], refine, pi[j]);
          if (!(y[j] > 0.0) || !(y[j] + u[j] >= 0.0)) {
            f = {j, failure_message("Y or Y + U out of domain", i, j, Regime::pre_default, y[j],
                                    y[j] + u[j])};
          }
        },
        fail);
  }

  // terminal slice: jump of the terminal value, holdings carried from N-1
  {
    const CoeffSnapshot c = model.snapshot(model.grid.horizon, Regime::pre_default);
    const double shift = std::log1p(c.beta);
    double* u = out.U(N);
    const auto y0 = surface.Y_slice(N, 0);
    const auto y1 = surface.Y_slice(N, 1);
    for (int j = 0; j < J; ++j) u[j] = space.interpolate(y1, space.node(j) + shift) - y0[j];
    for (int n = 0; n < 2; ++n) {
      std::copy_n(out.pi(N - 1, n), J, out.pi(N, n));
    }
  }
  return surface;
}

}  // namespace

ValueSurface solve_bsde(const MarketModel& model, const Claim& claim, const StrategySet& set,
                        const SpaceGrid& space, const Quadrature& quad,
                        const SolverOptions& options) {
  return solve(Execution::parallel, model, claim, set, space, quad, options);
}

namespace reference {

ValueSurface solve_bsde_serial(const MarketModel& model, const Claim& claim,
                               const StrategySet& set, const SpaceGrid& space,
                               const Quadrature& quad, const SolverOptions& options) {
  return solve(Execution::serial, model, claim, set, space, quad, options);
}

}  // namespace reference

double SurfaceStrategy::operator()(double t, double s, int n) const {
  const ValueSurface& v = *surface_;
  const int N = v.steps();
  int i = static_cast<int>(std::floor(t / v.model().grid.dt() + 1e-9));
  i = std::clamp(i, 0, N - 1);
  const double x = std::log(s / v.model().s0);
  const double pi = v.space().interpolate(v.pi_slice(i, n == 0 ? 0 : 1), x);
  return std::clamp(pi, v.strategy_set().lo, v.strategy_set().hi);
}

Strategy extract_optimal_strategy(const ValueSurface& surface) {
  return SurfaceStrategy(surface);
}

double surface_at_origin(const ValueSurface& surface) {
  return surface.space().interpolate(surface.Y_slice(0, 0), 0.0);
}

}  // namespace indiff
