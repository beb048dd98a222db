#pragma once

#include <vector>

#include "idepca/problem.hpp"
#include "idepca/solver.hpp"

namespace idepca {

// Cached product of (1 - b_j) over the problem's effective impulses up to
// t_max. range(lo, hi) multiplies the factors whose times fall in (lo, hi]
// (or [lo, hi) when the flags are flipped, for limits from the left).
class JumpProduct {
 public:
  JumpProduct(const Problem& problem, double t_max);

  // Product over (t0, t].
  double value(double t) const { return range(base_, t); }
  double range(double lo, double hi, bool include_lo = false, bool include_hi = true) const;

  double base() const noexcept { return base_; }
  const std::vector<Impulse>& impulses() const noexcept { return impulses_; }

 private:
  double base_;
  double t_max_;
  std::vector<Impulse> impulses_;
  std::vector<double> factors_;  // 1 - b_j
};

// Product of (1 - b_j) over effective impulse times in (from, to]; 1 when
// the window holds none (in particular whenever to <= from).
double jump_product_value(const Problem& problem, double from, double to);

// Coefficients of the impulse-free equation the substitution
// y(t) = prod_{t0 < t_j <= t} (1 - b_j) x(t) satisfies:
//   y' + a(t) y + B(t) y(t - tau) + C(t) y(floor(t) - 1) = 0
// with B(t) = prod over (t - tau, t] times b(t) and
// C(t) = prod over (floor(t) - 1, t] times c(t). Side::Left evaluates the
// limit from below at the (jump or integer) discontinuities.
double transformed_b(const Problem& problem, double t, Side side = Side::Right);
double transformed_c(const Problem& problem, double t, Side side = Side::Right);

struct TransformedProblem {
  Problem base;  // coefficients a, b, c and the schedule the products use
  double coefficient_a(double t) const { return base.a.eval(t); }
  double coefficient_b(double t, Side side = Side::Right) const {
    return transformed_b(base, t, side);
  }
  double coefficient_c(double t, Side side = Side::Right) const {
    return transformed_c(base, t, side);
  }
};

TransformedProblem transformed(const Problem& problem);

// Integrates the transformed (impulse-free) equation with the same initial
// data. Its breakpoint mesh carries the original impulse times, since B and
// C jump there and at their tau-shifts.
Trajectory integrate_transformed(const Problem& problem, const InitialData& initial,
                                 double horizon, const SolveOptions& options = {});

// Rescales a trajectory by the jump product (forward: x -> y, which removes
// the jumps; inverse: y -> x, which reintroduces them).
Trajectory map_trajectory(const Trajectory& traj, const Problem& problem, bool inverse = false);

struct TransformVerification {
  double max_deviation;  // sup over the sample grid of |prod * x - y|
  double scale;          // max |y| over the grid
  double tol;
  bool pass;             // max_deviation <= tol * (1 + scale)
};

// Integrates both formulations and compares prod(t0, t] * x(t) against y(t)
// on a uniform grid plus both sides of every jump.
TransformVerification verify_transform(const Problem& problem, const InitialData& initial,
                                       double horizon, double tol,
                                       const SolveOptions& options = {});

}  // namespace idepca
