#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "idepca/quadrature.hpp"

using namespace idepca;

TEST_SUITE("quadrature") {

TEST_CASE("smooth closed forms") {
  auto sq = [](double t) { return t * t; };
  CHECK(integrate_adaptive(sq, 0.0, 1.0, 1e-12) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  auto sine = [](double t) { return std::sin(t); };
  CHECK(integrate_adaptive(sine, 0.0, M_PI, 1e-12) == doctest::Approx(2.0).epsilon(1e-12));

  auto expf = [](double t) { return std::exp(t); };
  CHECK(integrate_adaptive(expf, 0.0, 1.0, 1e-12) ==
        doctest::Approx(M_E - 1.0).epsilon(1e-13));
}

TEST_CASE("degenerate and reversed bounds") {
  auto f = [](double t) { return t; };
  CHECK(integrate_adaptive(f, 2.0, 2.0, 1e-10) == 0.0);
  CHECK_THROWS_AS(integrate_adaptive(f, 1.0, 0.0, 1e-10), QuadratureError);
  CHECK_THROWS_AS(integrate_with_breaks(f, 1.0, 0.0, {}, 1e-10), QuadratureError);
}

TEST_CASE("a sharp peak still meets the requested tolerance") {
  const double a = 1e-2;
  auto peak = [a](double t) { return 1.0 / (a * a + t * t); };
  double exact = 2.0 / a * std::atan(1.0 / a);
  double got = integrate_adaptive(peak, -1.0, 1.0, 1e-9);
  CHECK(std::fabs(got - exact) <= 1e-7);
}

TEST_CASE("tightening the tolerance tightens the error") {
  auto f = [](double t) { return std::cos(10.0 * t) * std::exp(-t); };
  double exact =
      (10.0 * std::sin(10.0) - std::cos(10.0)) * std::exp(-1.0) / 101.0 + 1.0 / 101.0;
  double loose = std::fabs(integrate_adaptive(f, 0.0, 1.0, 1e-4) - exact);
  double tight = std::fabs(integrate_adaptive(f, 0.0, 1.0, 1e-12) - exact);
  CHECK(loose <= 1e-3);
  CHECK(tight <= 1e-11);
  CHECK(tight <= loose + 1e-15);
}

TEST_CASE("cutting at a kink recovers full accuracy") {
  // |t - 1| is C0 but not C1 at t = 1; with the cut the two pieces are
  // polynomials and the result is exact to roundoff.
  auto vee = [](double t) { return std::fabs(t - 1.0); };
  std::vector<double> breaks = {1.0};
  CHECK(integrate_with_breaks(vee, 0.0, 2.0, breaks, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-13));

  auto folded = [](double t) { return std::fabs(std::sin(t)); };
  std::vector<double> cuts = {M_PI, 2.0 * M_PI};
  CHECK(integrate_with_breaks(folded, 0.0, 3.0 * M_PI, cuts, 1e-11) ==
        doctest::Approx(6.0).epsilon(1e-11));
}

TEST_CASE("breaks outside the interval or duplicated are ignored") {
  auto f = [](double t) { return 3.0 * t * t; };
  std::vector<double> breaks = {-5.0, 0.5, 0.5, 0.5 + 1e-16, 7.0};
  CHECK(integrate_with_breaks(f, 0.0, 1.0, breaks, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("interval additivity across a cut") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> pick(0.0, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    double a = pick(rng);
    double b = a + 0.5 + pick(rng) * 0.3;
    double m = a + (b - a) * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    auto f = [](double t) { return std::sin(t) * std::exp(0.1 * t); };
    std::vector<double> breaks = {m};
    double whole = integrate_with_breaks(f, a, b, breaks, 1e-12);
    double parts = integrate_adaptive(f, a, m, 1e-12) + integrate_adaptive(f, m, b, 1e-12);
    CHECK(std::fabs(whole - parts) <= 1e-10);
  }
}

TEST_CASE("an integrand that stays rough at every depth is refused") {
  // A value jump exactly at a sample point can never satisfy the Simpson
  // error estimate; the integrator reports failure instead of smearing.
  auto jump = [](double t) { return t < 0.5 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(integrate_adaptive(jump, 0.0, 1.0, 1e-10), QuadratureError);
}

}  // TEST_SUITE "quadrature"
