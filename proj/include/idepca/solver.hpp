#pragma once

#include <functional>
#include <vector>

#include "idepca/problem.hpp"

namespace idepca {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { Left, Right };

namespace mesh_reason {
inline constexpr unsigned kIntegerSwitch = 1u;  // the piecewise constant argument switches
inline constexpr unsigned kImpulse = 2u;        // the state jumps
inline constexpr unsigned kPropagated = 4u;     // a breakpoint shifted by a multiple of tau
}  // namespace mesh_reason

struct MeshPoint {
  double t;
  unsigned reasons;
};

// Breakpoints of the right-hand side inside (t0, horizon]: integer times,
// impulse times, and their forward images under t -> t + k*tau up to the
// requested depth. Integration steps never straddle one of these.
struct Mesh {
  double start;
  double end;
  std::vector<MeshPoint> points;  // sorted, distinct (1e-12 tolerance)
};

Mesh build_mesh(const Problem& problem, double horizon, int depth);

// The jump rule: x(t+) = x(t-) / (1 - b_i). Throws on b_i == 1.
double apply_impulse(double x_left, double coeff);

// Right-hand side of the equation in explicit form:
//   x'(t) = -( a(t) x + b(t) x(t - tau) + c(t) x(floor(t) - 1) ).
// Guards b and c against negative values (below -1e-12).
double rhs(const Problem& problem, double t, double x, double x_delay, double x_pca);

struct Segment {
  double t_left, t_right;
  double x_left, x_right;
  double d_left, d_right;  // one-sided derivatives for cubic Hermite evaluation
};

struct Jump {
  double t;
  double left, right;
  double coeff;
};

// Piecewise cubic dense output plus the recorded jumps. Right-continuous:
// value(t) with Side::Right is the solution's value, Side::Left the limit
// from below (they differ only at jump times).
class Trajectory {
 public:
  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }

  double value(double t, Side side = Side::Right) const;
  double derivative(double t, Side side = Side::Right) const;

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }

  static Trajectory assemble(double start, double end, std::vector<Segment> segments,
                             std::vector<Jump> jumps);

 private:
  const Segment& locate(double t, Side side) const;

  double start_ = 0.0;
  double end_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
};

struct SolveOptions {
  double h_max = 1e-3;
  int depth = 2;  // tau-propagation depth of the breakpoint mesh
};

// Method of steps with classical fourth-order Runge-Kutta between
// breakpoints. The problem must validate cleanly.
Trajectory integrate(const Problem& problem, const InitialData& initial, double horizon,
                     const SolveOptions& options = {});

// Generic driver shared with the impulse-removal transform: coefficients are
// side-aware callables (the transformed ones jump at breakpoints), impulses
// are applied as state jumps, and extra_breaks seed the mesh alongside the
// integers.
struct CoefficientField {
  std::function<double(double, Side)> a, b, c;
  std::vector<Impulse> impulses;      // sorted by time, within (t0, horizon]
  std::vector<double> extra_breaks;   // additional mesh seeds
  bool guard_nonnegative = true;      // enforce b, c >= -1e-12 during stepping
};

Trajectory integrate_field(const CoefficientField& field,
                           const std::function<double(double)>& history, double t0, double tau,
                           double horizon, const SolveOptions& options);

}  // namespace idepca
