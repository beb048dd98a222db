#include <cmath>
#include <vector>

#include "doctest.h"
#include "idepca/problem.hpp"
#include "idepca/solver.hpp"

using namespace idepca;

namespace {

Problem make_problem(const char* a, const char* b, const char* c, double tau, double t0,
                     ImpulseSchedule schedule = ImpulseSchedule::none()) {
  Problem p;
  p.a = Expr::parse(a, "t");
  p.b = Expr::parse(b, "t");
  p.c = Expr::parse(c, "t");
  p.tau = tau;
  p.t0 = t0;
  p.schedule = std::move(schedule);
  return p;
}

bool mesh_has(const Mesh& mesh, double t, unsigned reasons = 0) {
  for (const MeshPoint& p : mesh.points) {
    if (std::fabs(p.t - t) <= 1e-12) return (p.reasons & reasons) == reasons;
  }
  return false;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("mesh holds integers and their delay images") {
  Problem p = make_problem("0", "pi", "1", 0.5, 0.25);
  Mesh mesh = build_mesh(p, 3.0, 1);
  CHECK(mesh.start == 0.25);
  CHECK(mesh.end == 3.0);
  for (double t : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    CAPTURE(t);
    CHECK(mesh_has(mesh, t));
  }
  CHECK(mesh_has(mesh, 1.0, mesh_reason::kIntegerSwitch));
  CHECK(mesh_has(mesh, 1.5, mesh_reason::kPropagated));
  CHECK_FALSE(mesh_has(mesh, 3.5));  // beyond the horizon
  // Sorted and distinct.
  for (std::size_t k = 1; k < mesh.points.size(); ++k) {
    CHECK(mesh.points[k].t > mesh.points[k - 1].t + 1e-12);
  }
}

TEST_CASE("mesh merges coinciding seeds and keeps every reason") {
  Problem p = make_problem("0", "pi", "1", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  Mesh mesh = build_mesh(p, 4.0, 2);
  // 2.0 is an integer, an impulse time, and 1.0 + 2*tau.
  CHECK(mesh_has(mesh, 2.0, mesh_reason::kIntegerSwitch | mesh_reason::kImpulse |
                                mesh_reason::kPropagated));
  CHECK(mesh_has(mesh, 1.5, mesh_reason::kPropagated));
  CHECK(mesh_has(mesh, 3.5, mesh_reason::kPropagated));

  Mesh shallow = build_mesh(p, 4.0, 0);
  CHECK_FALSE(mesh_has(shallow, 1.5));
  CHECK(mesh_has(shallow, 2.0, mesh_reason::kIntegerSwitch | mesh_reason::kImpulse));

  CHECK_THROWS_AS(build_mesh(p, 0.25, 1), SolverError);
  CHECK_THROWS_AS(build_mesh(p, 3.0, -1), SolverError);
}

TEST_CASE("the jump rule") {
  CHECK(apply_impulse(3.0, -2.0) == 1.0);
  CHECK(apply_impulse(1.0, 0.5) == 2.0);
  CHECK(apply_impulse(-4.0, -1.0) == -2.0);
  CHECK(apply_impulse(0.0, 0.9) == 0.0);
  CHECK(apply_impulse(1.0, 2.0) == -1.0);  // coefficients above 1 flip the sign
  CHECK_THROWS_AS(apply_impulse(1.0, 1.0), ModelError);
}

TEST_CASE("explicit right-hand side") {
  Problem p = make_problem("1", "pi", "exp(t)", 2.5, 0.5);
  CHECK(rhs(p, 0.0, 1.0, 0.0, 0.0) == -1.0);
  CHECK(rhs(p, 0.0, 0.0, 1.0, 0.0) == -M_PI);
  CHECK(rhs(p, 1.0, 0.0, 0.0, 2.0) == -2.0 * std::exp(1.0));
  Problem bad = make_problem("0", "-1", "0", 1.0, 0.5);
  CHECK_THROWS_AS(rhs(bad, 1.0, 1.0, 1.0, 1.0), SolverError);
}

TEST_CASE("integration refuses a problem that fails validation") {
  Problem p = make_problem("0", "t-9", "0", 1.0, 0.5);  // b negative on [0.5, 10]
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  CHECK_THROWS_AS(integrate(p, init, 10.0, {}), ModelError);
  Problem q = make_problem("0", "1", "0", -1.0, 0.5);
  CHECK_THROWS_AS(integrate(q, make_initial(q, Expr::parse("1", "t")), 10.0, {}), ModelError);
}

TEST_CASE("piecewise-exponential oracle for the pure PCA equation") {
  // x' = -(x + x(floor(t)-1)), phi = 1, t0 = 1: on [n, n+1) the equation is
  // linear with a frozen inhomogeneity, so x(t) = (x(n)+p) e^{-(t-n)} - p
  // with p = x(n-1). The recursion below in long double is the oracle.
  Problem p = make_problem("1", "0", "1", 1.0, 1.0);
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 6.0, SolveOptions{1e-3, 2});

  long double xs[7];
  xs[0] = 1.0L;  // phi(0)
  xs[1] = 1.0L;  // x(t0)
  double sup = 0.0;
  for (int n = 1; n < 6; ++n) {
    long double p_hold = xs[n - 1];
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      long double exact =
          (xs[n] + p_hold) * expl(-static_cast<long double>(frac)) - p_hold;
      double got = traj.value(static_cast<double>(n) + frac,
                              frac == 1.0 ? Side::Left : Side::Right);
      sup = std::max(sup, std::fabs(got - static_cast<double>(exact)));
    }
    xs[n + 1] = (xs[n] + p_hold) * expl(-1.0L) - p_hold;
  }
  CHECK(sup <= 1e-10);
}

TEST_CASE("dyadic staircase with impulses is reproduced exactly") {
  // a = b = 0, c = 1, jumps halve the state at each integer: every node value
  // is a dyadic rational and RK4 commits no truncation error on linear arcs.
  Problem p = make_problem("0", "0", "1", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 4.0, SolveOptions{1e-3, 2});

  struct Node { double t; double value; };  // right-continuous values
  const Node nodes[] = {
      {0.25, 1.0},     {1.0, 0.125},    {2.0, -0.4375},
      {3.0, -0.28125}, {4.0, 0.078125},
  };
  for (const Node& n : nodes) {
    CAPTURE(n.t);
    CHECK(std::fabs(traj.value(n.t, Side::Right) - n.value) <= 1e-13);
  }
  CHECK(std::fabs(traj.value(1.0, Side::Left) - 0.25) <= 1e-13);
  CHECK(std::fabs(traj.value(2.0, Side::Left) - (-0.875)) <= 1e-13);
  CHECK(std::fabs(traj.value(2.5, Side::Right) - (-0.5)) <= 1e-13);
}

TEST_CASE("recorded jumps obey the impulse rule bitwise") {
  Problem p = make_problem("0", "pi", "1", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 5.0, SolveOptions{1e-2, 2});
  REQUIRE(traj.jumps().size() == 5);
  double expect_time = 1.0;
  for (const Jump& j : traj.jumps()) {
    CHECK(j.t == expect_time);
    CHECK(j.coeff == -1.0);
    CHECK(j.right == apply_impulse(j.left, j.coeff));
    CHECK(traj.value(j.t, Side::Left) == j.left);
    CHECK(traj.value(j.t, Side::Right) == j.right);
    expect_time += 1.0;
  }
  // Away from jumps the two sides agree.
  CHECK(traj.value(2.6, Side::Left) == traj.value(2.6, Side::Right));
}

TEST_CASE("zero initial data stays zero") {
  Problem p = make_problem("1", "pi", "exp(t)", 2.5, 0.5,
                           ImpulseSchedule::integers(Expr::parse("-2^i", "i")));
  InitialData init = make_initial(p, Expr::parse("0", "t"));
  Trajectory traj = integrate(p, init, 4.0, SolveOptions{1e-2, 2});
  for (double t = 0.5; t <= 4.0; t += 0.1) {
    CHECK(traj.value(t) == 0.0);
  }
  for (const Jump& j : traj.jumps()) CHECK(j.right == 0.0);
}

TEST_CASE("the equation is linear in the initial data") {
  Problem p = make_problem("0", "pi", "1", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  Trajectory one = integrate(p, make_initial(p, Expr::parse("1", "t")), 5.0,
                             SolveOptions{1e-2, 2});
  Trajectory three = integrate(p, make_initial(p, Expr::parse("3", "t")), 5.0,
                               SolveOptions{1e-2, 2});
  for (double t = 0.25; t <= 5.0; t += 0.17) {
    double u = one.value(t);
    double v = three.value(t);
    CHECK(std::fabs(v - 3.0 * u) <= 1e-12 * (1.0 + std::fabs(v)));
  }
}

TEST_CASE("pure delay with a small coefficient stays positive") {
  Problem p = make_problem("0", "0.2", "0", 1.0, 1.0);
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 10.0, SolveOptions{1e-3, 2});

  // Closed form on the first two intervals.
  for (double t = 1.0; t <= 2.0; t += 0.125) {
    CHECK(std::fabs(traj.value(t) - (1.0 - 0.2 * (t - 1.0))) <= 1e-12);
  }
  for (double t = 2.0; t <= 3.0; t += 0.125) {
    double d = t - 2.0;
    double exact = 0.8 - 0.2 * d + 0.02 * d * d;
    CHECK(std::fabs(traj.value(t) - exact) <= 1e-12);
  }
  for (double t = 1.0; t <= 10.0; t += 0.05) {
    CHECK(traj.value(t) > 0.0);
  }
}

TEST_CASE("dense output is consistent at segment seams") {
  Problem p = make_problem("1", "0", "1", 1.0, 1.0);
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 3.0, SolveOptions{0.25, 2});
  for (const Segment& seg : traj.segments()) {
    CHECK(seg.t_right > seg.t_left);
    CHECK(seg.t_right - seg.t_left <= 0.25 + 1e-12);  // h_max respected
    CHECK(traj.value(seg.t_left, Side::Right) == seg.x_left);
    CHECK(traj.value(seg.t_right, Side::Left) == seg.x_right);
    CHECK(traj.derivative(seg.t_left, Side::Right) == seg.d_left);
  }
  CHECK(traj.start() == 1.0);
  CHECK(traj.end() == 3.0);
}

TEST_CASE("evaluation outside the computed span is an error") {
  Problem p = make_problem("0", "1", "0", 1.0, 1.0);
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 3.0, SolveOptions{1e-2, 2});
  CHECK_THROWS_AS(traj.value(0.5), SolverError);
  CHECK_THROWS_AS(traj.value(3.5), SolverError);
  CHECK_THROWS_AS(traj.derivative(0.5), SolverError);
  CHECK_NOTHROW(traj.value(1.0));
  CHECK_NOTHROW(traj.value(3.0));
}

}  // TEST_SUITE "solver"
