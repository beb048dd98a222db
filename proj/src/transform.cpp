#include "idepca/transform.hpp"

#include <algorithm>
#include <cmath>

namespace idepca {

JumpProduct::JumpProduct(const Problem& problem, double t_max)
    : base_(problem.t0), t_max_(t_max) {
  impulses_ = problem.impulses(problem.t0, t_max);
  factors_.reserve(impulses_.size());
  for (const Impulse& imp : impulses_) factors_.push_back(1.0 - imp.coeff);
}

double JumpProduct::range(double lo, double hi, bool include_lo, bool include_hi) const {
  if (hi < lo) return 1.0;
  if (hi == lo && !(include_lo && include_hi)) return 1.0;
  if (hi > t_max_ + 1e-12) throw ModelError("jump product queried beyond its cached range");
  auto first = include_lo
                   ? std::lower_bound(impulses_.begin(), impulses_.end(), lo,
                                      [](const Impulse& imp, double v) { return imp.time < v; })
                   : std::upper_bound(impulses_.begin(), impulses_.end(), lo,
                                      [](double v, const Impulse& imp) { return v < imp.time; });
  auto last = include_hi
                  ? std::upper_bound(impulses_.begin(), impulses_.end(), hi,
                                     [](double v, const Impulse& imp) { return v < imp.time; })
                  : std::lower_bound(impulses_.begin(), impulses_.end(), hi,
                                     [](const Impulse& imp, double v) { return imp.time < v; });
  double product = 1.0;
  for (auto it = first; it < last; ++it) {
    product *= factors_[static_cast<std::size_t>(it - impulses_.begin())];
  }
  return product;
}

double jump_product_value(const Problem& problem, double from, double to) {
  if (!(to > from)) return 1.0;
  double product = 1.0;
  for (const Impulse& imp : problem.impulses(from, to)) product *= 1.0 - imp.coeff;
  return product;
}

namespace {

double delay_window_product(const Problem& problem, double t, double tau, Side side) {
  if (side == Side::Right) return jump_product_value(problem, t - tau, t);
  // Limit from below: impulses with t - tau <= t_j < t.
  double product = 1.0;
  for (const Impulse& imp : problem.impulses(t - tau - 1.0, t)) {
    if (imp.time >= t - tau && imp.time < t) product *= 1.0 - imp.coeff;
  }
  return product;
}

double pca_window_product(const Problem& problem, double t, Side side) {
  if (side == Side::Right) return jump_product_value(problem, std::floor(t) - 1.0, t);
  bool integer = t == std::floor(t);
  double lo = integer ? t - 2.0 : std::floor(t) - 1.0;
  double product = 1.0;
  for (const Impulse& imp : problem.impulses(lo, t)) {
    if (imp.time < t) product *= 1.0 - imp.coeff;
  }
  return product;
}

}  // namespace

double transformed_b(const Problem& problem, double t, Side side) {
  return delay_window_product(problem, t, problem.tau, side) * problem.b.eval(t);
}

double transformed_c(const Problem& problem, double t, Side side) {
  return pca_window_product(problem, t, side) * problem.c.eval(t);
}

TransformedProblem transformed(const Problem& problem) { return TransformedProblem{problem}; }

Trajectory integrate_transformed(const Problem& problem, const InitialData& initial,
                                 double horizon, const SolveOptions& options) {
  ValidationReport report = validate(problem, initial, horizon);
  if (!report.ok()) {
    throw ModelError("problem failed validation: " + report.errors.front().message);
  }
  JumpProduct cache(problem, horizon);
  const Problem& p = problem;
  double tau = problem.tau;
  double t0 = problem.t0;

  CoefficientField field;
  field.a = [&p](double t, Side) { return p.a.eval(t); };
  field.b = [&p, &cache, tau, t0](double t, Side side) {
    double b = p.b.eval(t);
    if (b < -1e-12) throw SolverError("b is negative during transformed integration");
    double product = side == Side::Right
                         ? cache.range(std::max(t - tau, t0), t)
                         : cache.range(std::max(t - tau, t0), t, true, false);
    return product * b;
  };
  field.c = [&p, &cache, t0](double t, Side side) {
    double c = p.c.eval(t);
    if (c < -1e-12) throw SolverError("c is negative during transformed integration");
    bool integer = t == std::floor(t);
    double lo = side == Side::Left && integer ? t - 2.0 : std::floor(t) - 1.0;
    // Unlike the delay window, the base floor(t)-1 does not move as s -> t-,
    // so an impulse sitting exactly at the base stays excluded from the limit.
    double product = side == Side::Right ? cache.range(std::max(lo, t0), t)
                                         : cache.range(std::max(lo, t0), t, false, false);
    return product * c;
  };
  for (const Impulse& imp : problem.impulses(problem.t0, horizon)) {
    field.extra_breaks.push_back(imp.time);
  }
  field.guard_nonnegative = false;  // B and C may be negative when some b_j > 1
  const Expr& phi = initial.phi;
  auto history = [&phi](double t) { return phi.eval(t); };
  return integrate_field(field, history, problem.t0, problem.tau, horizon, options);
}

Trajectory map_trajectory(const Trajectory& traj, const Problem& problem, bool inverse) {
  std::vector<Impulse> impulses = problem.impulses(traj.start(), traj.end());
  std::vector<Segment> segments;
  segments.reserve(traj.segments().size());
  std::vector<Jump> jumps;

  double product = 1.0;
  std::size_t next = 0;
  for (const Segment& seg : traj.segments()) {
    // Fold in every impulse at or before this segment's start.
    while (next < impulses.size() && impulses[next].time <= seg.t_left) {
      double before = product;
      product *= 1.0 - impulses[next].coeff;
      if (inverse) {
        double left = traj.value(impulses[next].time, Side::Left) / before;
        jumps.push_back({impulses[next].time, left, apply_impulse(left, impulses[next].coeff),
                         impulses[next].coeff});
      }
      ++next;
    }
    double scale = inverse ? 1.0 / product : product;
    segments.push_back({seg.t_left, seg.t_right, scale * seg.x_left, scale * seg.x_right,
                        scale * seg.d_left, scale * seg.d_right});
  }
  if (!inverse) {
    // The scaled trajectory is continuous: jumps cancel against the product.
    return Trajectory::assemble(traj.start(), traj.end(), std::move(segments), {});
  }
  // An impulse exactly at the end has no following segment; still record it.
  while (next < impulses.size() && impulses[next].time <= traj.end()) {
    double before = product;
    product *= 1.0 - impulses[next].coeff;
    double left = traj.value(impulses[next].time, Side::Left) / before;
    jumps.push_back({impulses[next].time, left, apply_impulse(left, impulses[next].coeff),
                     impulses[next].coeff});
    ++next;
  }
  return Trajectory::assemble(traj.start(), traj.end(), std::move(segments), std::move(jumps));
}

TransformVerification verify_transform(const Problem& problem, const InitialData& initial,
                                       double horizon, double tol,
                                       const SolveOptions& options) {
  Trajectory x = integrate(problem, initial, horizon, options);
  Trajectory y = integrate_transformed(problem, initial, horizon, options);
  JumpProduct cache(problem, horizon);

  double deviation = 0.0;
  double scale = 0.0;
  auto probe = [&](double t, Side side) {
    double product = side == Side::Right ? cache.range(cache.base(), t)
                                         : cache.range(cache.base(), t, false, false);
    double mapped = product * x.value(t, side);
    double yv = y.value(t, side);
    deviation = std::max(deviation, std::fabs(mapped - yv));
    scale = std::max(scale, std::fabs(yv));
  };

  const int kGrid = 2000;
  for (int k = 0; k <= kGrid; ++k) {
    double t = problem.t0 + (horizon - problem.t0) * static_cast<double>(k) / kGrid;
    probe(t, Side::Right);
  }
  for (const Jump& j : x.jumps()) {
    probe(j.t, Side::Left);
    probe(j.t, Side::Right);
  }

  TransformVerification result;
  result.max_deviation = deviation;
  result.scale = scale;
  result.tol = tol;
  result.pass = deviation <= tol * (1.0 + scale);
  return result;
}

}  // namespace idepca
