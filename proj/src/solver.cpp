#include "idepca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace idepca {

namespace {

constexpr double kDedupTol = 1e-12;
constexpr double kNegativityGuard = -1e-12;

std::string describe(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Sort, then merge points closer than the dedup tolerance. Reason masks of
// merged points are combined and the representative time prefers an impulse
// time over an integer over a propagated image, so canonical times survive.
void dedup_mesh(std::vector<MeshPoint>& points) {
  std::sort(points.begin(), points.end(),
            [](const MeshPoint& a, const MeshPoint& b) { return a.t < b.t; });
  std::vector<MeshPoint> merged;
  for (const MeshPoint& p : points) {
    if (!merged.empty() && p.t - merged.back().t <= kDedupTol) {
      MeshPoint& back = merged.back();
      auto rank = [](unsigned reasons) {
        if (reasons & mesh_reason::kImpulse) return 2;
        if (reasons & mesh_reason::kIntegerSwitch) return 1;
        return 0;
      };
      if (rank(p.reasons) > rank(back.reasons)) back.t = p.t;
      back.reasons |= p.reasons;
    } else {
      merged.push_back(p);
    }
  }
  points = std::move(merged);
}

Mesh mesh_from_seeds(double t0, double horizon, double tau, int depth,
                     const std::vector<double>& integer_like,
                     const std::vector<double>& impulse_times,
                     const std::vector<double>& extra) {
  Mesh mesh;
  mesh.start = t0;
  mesh.end = horizon;
  std::vector<MeshPoint> seeds;
  for (double t : integer_like) seeds.push_back({t, mesh_reason::kIntegerSwitch});
  for (double t : impulse_times) seeds.push_back({t, mesh_reason::kImpulse});
  for (double t : extra) seeds.push_back({t, mesh_reason::kImpulse});
  std::vector<MeshPoint> points = seeds;
  for (const MeshPoint& s : seeds) {
    for (int k = 1; k <= depth; ++k) {
      double t = s.t + static_cast<double>(k) * tau;
      if (t > horizon) break;
      points.push_back({t, mesh_reason::kPropagated});
    }
  }
  dedup_mesh(points);
  mesh.points = std::move(points);
  return mesh;
}

}  // namespace

Mesh build_mesh(const Problem& problem, double horizon, int depth) {
  if (!(horizon > problem.t0)) throw SolverError("horizon must be greater than t0");
  if (depth < 0) throw SolverError("mesh depth must be nonnegative");
  std::vector<double> integers;
  for (double n = std::ceil(problem.t0); n <= horizon; n += 1.0) integers.push_back(n);
  std::vector<double> impulse_times;
  for (const Impulse& imp : problem.impulses(problem.t0, horizon)) {
    impulse_times.push_back(imp.time);
  }
  return mesh_from_seeds(problem.t0, horizon, problem.tau, depth, integers, impulse_times, {});
}

double apply_impulse(double x_left, double coeff) {
  if (coeff == 1.0) throw ModelError("impulse coefficient equals 1; jump undefined");
  return x_left / (1.0 - coeff);
}

double rhs(const Problem& problem, double t, double x, double x_delay, double x_pca) {
  double a = problem.a.eval(t);
  double b = problem.b.eval(t);
  double c = problem.c.eval(t);
  if (b < kNegativityGuard) {
    throw SolverError("b(" + describe(t) + ") = " + describe(b) + " is negative");
  }
  if (c < kNegativityGuard) {
    throw SolverError("c(" + describe(t) + ") = " + describe(c) + " is negative");
  }
  return -(a * x + b * x_delay + c * x_pca);
}

Trajectory Trajectory::assemble(double start, double end, std::vector<Segment> segments,
                                std::vector<Jump> jumps) {
  Trajectory traj;
  traj.start_ = start;
  traj.end_ = end;
  traj.segments_ = std::move(segments);
  traj.jumps_ = std::move(jumps);
  return traj;
}

const Segment& Trajectory::locate(double t, Side side) const {
  // Segments tile [start, end]; pick the one whose half-open side matches.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t_left; });
  if (it != segments_.begin()) --it;
  if (side == Side::Left) {
    // t on a shared boundary belongs to the earlier segment.
    if (t == it->t_left && it != segments_.begin()) --it;
  } else {
    if (t == it->t_right && it + 1 != segments_.end()) ++it;
  }
  return *it;
}

double Trajectory::value(double t, Side side) const {
  if (segments_.empty() || t < start_ || t > end_) {
    throw SolverError("evaluation at t = " + describe(t) + " outside [" + describe(start_) +
                      ", " + describe(end_) + "]");
  }
  auto jump = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const Jump& j, double v) { return j.t < v; });
  if (jump != jumps_.end() && jump->t == t) {
    return side == Side::Left ? jump->left : jump->right;
  }
  const Segment& s = locate(t, side);
  double h = s.t_right - s.t_left;
  double theta = (t - s.t_left) / h;
  double h00 = (2.0 * theta - 3.0) * theta * theta + 1.0;
  double h10 = ((theta - 2.0) * theta + 1.0) * theta;
  double h01 = (3.0 - 2.0 * theta) * theta * theta;
  double h11 = (theta - 1.0) * theta * theta;
  return h00 * s.x_left + h * (h10 * s.d_left + h11 * s.d_right) + h01 * s.x_right;
}

double Trajectory::derivative(double t, Side side) const {
  if (segments_.empty() || t < start_ || t > end_) {
    throw SolverError("evaluation at t = " + describe(t) + " outside [" + describe(start_) +
                      ", " + describe(end_) + "]");
  }
  const Segment& s = locate(t, side);
  double h = s.t_right - s.t_left;
  double theta = (t - s.t_left) / h;
  double g00 = 6.0 * theta * (theta - 1.0);
  double g10 = (3.0 * theta - 4.0) * theta + 1.0;
  double g01 = -g00;
  double g11 = (3.0 * theta - 2.0) * theta;
  return (g00 * s.x_left + g01 * s.x_right) / h + g10 * s.d_left + g11 * s.d_right;
}

namespace {

// Evaluation on the partially built trajectory (plain vectors, same layout
// as Trajectory but without the invariant checks).
double partial_value(const std::vector<Segment>& segments, const std::vector<Jump>& jumps,
                     double t, Side side) {
  auto jump = std::lower_bound(jumps.begin(), jumps.end(), t,
                               [](const Jump& j, double v) { return j.t < v; });
  if (jump != jumps.end() && jump->t == t) {
    return side == Side::Left ? jump->left : jump->right;
  }
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const Segment& s) { return v < s.t_left; });
  if (it != segments.begin()) --it;
  const Segment& s = *it;
  double h = s.t_right - s.t_left;
  double theta = (t - s.t_left) / h;
  if (theta <= 0.0) return s.x_left;
  if (theta >= 1.0) return s.x_right;
  double h00 = (2.0 * theta - 3.0) * theta * theta + 1.0;
  double h10 = ((theta - 2.0) * theta + 1.0) * theta;
  double h01 = (3.0 - 2.0 * theta) * theta * theta;
  double h11 = (theta - 1.0) * theta * theta;
  return h00 * s.x_left + h * (h10 * s.d_left + h11 * s.d_right) + h01 * s.x_right;
}

}  // namespace

Trajectory integrate_field(const CoefficientField& field,
                           const std::function<double(double)>& history, double t0, double tau,
                           double horizon, const SolveOptions& options) {
  if (!(horizon > t0)) throw SolverError("horizon must be greater than t0");
  if (!(tau > 0.0)) throw SolverError("tau must be positive");
  if (!(options.h_max > 0.0)) throw SolverError("h_max must be positive");

  std::vector<double> integers;
  for (double n = std::ceil(t0); n <= horizon; n += 1.0) integers.push_back(n);
  std::vector<double> impulse_times;
  for (const Impulse& imp : field.impulses) impulse_times.push_back(imp.time);
  Mesh mesh = mesh_from_seeds(t0, horizon, tau, options.depth, integers, impulse_times,
                              field.extra_breaks);

  // Step boundaries: t0, interior mesh points, horizon. Points within the
  // dedup tolerance of either end merge into it.
  std::vector<double> bounds;
  bounds.push_back(t0);
  for (const MeshPoint& p : mesh.points) {
    if (p.t > t0 + kDedupTol && p.t < horizon - kDedupTol) bounds.push_back(p.t);
  }
  bounds.push_back(horizon);

  std::vector<Segment> segments;
  std::vector<Jump> jumps;
  segments.reserve(static_cast<std::size_t>((horizon - t0) / options.h_max) + bounds.size() + 8);

  auto impulse_at = [&](double t) -> const Impulse* {
    auto it = std::lower_bound(field.impulses.begin(), field.impulses.end(), t - kDedupTol,
                               [](const Impulse& imp, double v) { return imp.time < v; });
    if (it != field.impulses.end() && it->time <= t + kDedupTol) return &*it;
    return nullptr;
  };

  double x = history(t0);
  double comp = 0.0;  // Kahan compensation for the state accumulation

  auto guard = [&](double v, const char* name, double t) {
    if (field.guard_nonnegative && v < kNegativityGuard) {
      throw SolverError(std::string(name) + "(" + describe(t) + ") = " + describe(v) +
                        " is negative");
    }
    return v;
  };

  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    double left = bounds[k];
    double right = bounds[k + 1];
    if (!(right > left)) continue;

    // The piecewise constant argument is fixed on [left, right].
    double pca_arg = std::floor(left) - 1.0;
    double x_pca = pca_arg < t0 ? history(pca_arg)
                                : partial_value(segments, jumps, pca_arg, Side::Right);

    // f evaluates the interval's smooth vector field. at_right_end selects
    // the limit from the left for reads that land exactly on a breakpoint,
    // so each step integrates a smooth piece.
    auto f = [&](double t, double xv, bool at_right_end) {
      Side side = at_right_end ? Side::Left : Side::Right;
      double arg = t - tau;
      double x_delay = arg < t0 ? history(arg) : partial_value(segments, jumps, arg, side);
      double av = field.a(t, side);
      double bv = guard(field.b(t, side), "b", t);
      double cv = guard(field.c(t, side), "c", t);
      return -(av * xv + bv * x_delay + cv * x_pca);
    };

    double span = right - left;
    double h_cap = std::min(options.h_max, tau);
    long nsteps = std::max(1L, static_cast<long>(std::ceil(span / h_cap - 1e-9)));
    double h = span / static_cast<double>(nsteps);

    double slope = f(left, x, false);
    for (long step = 0; step < nsteps; ++step) {
      double t = left + static_cast<double>(step) * h;
      double t_end = step + 1 == nsteps ? right : left + static_cast<double>(step + 1) * h;
      double hh = t_end - t;
      bool last = step + 1 == nsteps;
      double k1 = slope;
      double k2 = f(t + 0.5 * hh, x + 0.5 * hh * k1, false);
      double k3 = f(t + 0.5 * hh, x + 0.5 * hh * k2, false);
      double k4 = f(t_end, x + hh * k3, last);
      double delta = hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      // Compensated accumulation: keeps the roundoff floor flat so the
      // fourth-order convergence stays measurable at small steps.
      double y = delta - comp;
      double x_new = x + y;
      comp = (x_new - x) - y;
      double end_slope = f(t_end, x_new, last);
      segments.push_back({t, t_end, x, x_new, k1, end_slope});
      x = x_new;
      slope = end_slope;  // bitwise equal to the next step's k1 inside the interval
    }

    if (const Impulse* imp = impulse_at(right)) {
      double left_value = x;
      double right_value = apply_impulse(left_value, imp->coeff);
      jumps.push_back({right, left_value, right_value, imp->coeff});
      x = right_value;
      comp = 0.0;
    }
  }

  return Trajectory::assemble(t0, horizon, std::move(segments), std::move(jumps));
}

Trajectory integrate(const Problem& problem, const InitialData& initial, double horizon,
                     const SolveOptions& options) {
  ValidationReport report = validate(problem, initial, horizon);
  if (!report.ok()) {
    throw ModelError("problem failed validation: " + report.errors.front().message);
  }
  CoefficientField field;
  const Expr& a = problem.a;
  const Expr& b = problem.b;
  const Expr& c = problem.c;
  field.a = [&a](double t, Side) { return a.eval(t); };
  field.b = [&b](double t, Side) { return b.eval(t); };
  field.c = [&c](double t, Side) { return c.eval(t); };
  field.impulses = problem.impulses(problem.t0, horizon);
  field.guard_nonnegative = true;
  const Expr& phi = initial.phi;
  auto history = [&phi](double t) { return phi.eval(t); };
  return integrate_field(field, history, problem.t0, problem.tau, horizon, options);
}

}  // namespace idepca
