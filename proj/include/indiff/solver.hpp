#pragma once

#include <span>
#include <vector>

#include "indiff/driver.hpp"
#include "indiff/model.hpp"

namespace indiff {

/// Uniform grid in x = log(S/s0) over [-L, L] with M+1 nodes.
class SpaceGrid {
 public:
  SpaceGrid(int intervals, double half_width);

  /// Default half width: l_mult * sigma_max * sqrt(T).
  static SpaceGrid for_model(const MarketModel& model, int intervals, double l_mult = 6.0);

  int intervals() const noexcept { return m_; }
  int size() const noexcept { return m_ + 1; }
  double half_width() const noexcept { return L_; }
  double step() const noexcept { return dx_; }
  double node(int j) const noexcept { return nodes_[j]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Linear interpolation of nodal values at x, flat beyond [-L, L].
  double interpolate(std::span<const double> values, double x) const noexcept;

 private:
  int m_;
  double L_;
  double dx_;
  std::vector<double> nodes_;
};

/// Gauss-Hermite rule for expectations of a standard normal variable.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1

  static Quadrature gauss_hermite(int m);
  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

struct SolverOptions {
  /// Re-evaluate the driver once at the first Y estimate instead of E.
  bool fixed_point_refinement = false;
};

/// Discrete solution (Y, Z, U, pi_hat) on (time i, space j, default state n).
/// U is stored for the pre-default state only.
class ValueSurface {
 public:
  ValueSurface(MarketModel model, Claim claim, StrategySet set, SpaceGrid space);

  const MarketModel& model() const noexcept { return model_; }
  const Claim& claim() const noexcept { return claim_; }
  const StrategySet& strategy_set() const noexcept { return set_; }
  const SpaceGrid& space() const noexcept { return space_; }
  int steps() const noexcept { return model_.grid.steps; }

  double Y(int i, int j, int n) const noexcept { return y_[slot(i, n) + j]; }
  double Z(int i, int j, int n) const noexcept { return z_[slot(i, n) + j]; }
  double U(int i, int j) const noexcept { return u_[row(i) + j]; }
  double pi_hat(int i, int j, int n) const noexcept { return pi_[slot(i, n) + j]; }

  /// Nodal Y values of the slice (i, n).
  std::span<const double> Y_slice(int i, int n) const noexcept {
    return {y_.data() + slot(i, n), static_cast<std::size_t>(space_.size())};
  }
  std::span<const double> pi_slice(int i, int n) const noexcept {
    return {pi_.data() + slot(i, n), static_cast<std::size_t>(space_.size())};
  }

  /// Y(t_i, s, n) interpolated in log s.
  double value_at(int i, double s, int n) const noexcept;

 private:
  friend class SurfaceBuilder;

  std::size_t row(int i) const noexcept { return static_cast<std::size_t>(i) * space_.size(); }
  std::size_t slot(int i, int n) const noexcept {
    return (static_cast<std::size_t>(i) * 2 + n) * space_.size();
  }

  MarketModel model_;
  Claim claim_;
  StrategySet set_;
  SpaceGrid space_;
  std::vector<double> y_, z_, pi_, u_;
};

/// Backward scheme for the BSDE with driver inf_{pi in C} f_pi and terminal
/// exp(-gamma xi). Time steps run in sequence; nodes within a step run in
/// parallel and produce the same bits as the serial reference.
///
/// Throws NumericalError (naming step and node) if an iterate leaves
/// Y > 0, Y + U >= 0.
ValueSurface solve_bsde(const MarketModel& model, const Claim& claim, const StrategySet& set,
                        const SpaceGrid& space, const Quadrature& quad,
                        const SolverOptions& options = {});

namespace reference {
ValueSurface solve_bsde_serial(const MarketModel& model, const Claim& claim,
                               const StrategySet& set, const SpaceGrid& space,
                               const Quadrature& quad, const SolverOptions& options = {});
}  // namespace reference

/// Lookup of pi_hat: piecewise constant in time, linear in log s, clipped to C.
class SurfaceStrategy {
 public:
  explicit SurfaceStrategy(const ValueSurface& surface) : surface_(&surface) {}
  double operator()(double t, double s, int n) const;

 private:
  const ValueSurface* surface_;
};

/// The returned strategy refers to `surface`, which must outlive it.
Strategy extract_optimal_strategy(const ValueSurface& surface);

/// Y at t = 0, x = 0, before default.
double surface_at_origin(const ValueSurface& surface);

}  // namespace indiff
