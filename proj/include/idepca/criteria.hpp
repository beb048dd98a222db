#pragma once

#include <vector>

#include "idepca/problem.hpp"
#include "idepca/quadrature.hpp"

namespace idepca {

// Cumulative integral A(t) of the coefficient a from a base point, backed by
// a node table with per-cell adaptive Simpson refinement. Queries off the
// node grid integrate the short remainder on demand. A structurally constant
// a short-circuits to an exact closed form.
class Antiderivative {
 public:
  Antiderivative(Expr a, double t_base, double t_max, double abs_tol = 1e-10,
                 std::vector<double> extra_nodes = {});

  double operator()(double t) const;

  double base() const noexcept { return t_base_; }
  double max() const noexcept { return t_max_; }
  double tolerance() const noexcept { return abs_tol_; }

 private:
  Expr a_;
  double t_base_;
  double t_max_;
  double abs_tol_;
  bool constant_ = false;
  double constant_value_ = 0.0;
  double cell_tol_ = 1e-12;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

// The eight oscillation conditions. The T2/T3 family always applies; the
// corollaries additionally require one of b, c to vanish identically:
//   T2-b / T3-b   window min(tau, 1), delay-term integrand, limsup > 1 / liminf > 1/e
//   T2-c / T3-c   window min(tau, 1) ending at each integer + 1, same thresholds
//   C1   / C3     window tau (needs c == 0), limsup > 1 / liminf > 1/e
//   C2   / C4     window 1 over [n, n+1] (needs b == 0), same thresholds
enum class ConditionId { T2b, T2c, T3b, T3c, C1, C2, C3, C4 };

const char* condition_name(ConditionId id);
bool condition_integer_indexed(ConditionId id);
bool condition_uses_c(ConditionId id);   // integrand built from c; otherwise from b
bool condition_liminf(ConditionId id);   // tail statistic is an inf; otherwise a sup
double condition_threshold(ConditionId id);

// Delay-term window value ending at t:
//   integral over [t - window, t] of prod_{s-tau < t_j <= s}(1 - b_j) b(s)
//   exp( A(s) - A(s - tau) ) ds
// split at every impulse time and every impulse time + tau inside the window.
double window_integral_b(const Problem& problem, const Antiderivative& a_integral, double t,
                         double window, double abs_tol = 1e-10);

// Piecewise-constant-term window value for index n (window ends at n + 1):
//   integral over [n + 1 - window, n + 1] of prod_{n-1 < t_j <= s}(1 - b_j) c(s)
//   exp( A(s) - A(n - 1) ) ds
double window_integral_c(const Problem& problem, const Antiderivative& a_integral, long n,
                         double window, double abs_tol = 1e-10);

struct ScanOptions {
  double start;   // first window right endpoint; must be >= t0 + max(tau, 2)
  double end;     // last window right endpoint
  double stride;  // grid spacing for the continuous-time conditions
  double margin;  // a condition holds only when tail > threshold + margin

  static ScanOptions defaults(const Problem& problem);
};

enum class Verdict { SatisfiedAtHorizon, NotSatisfiedAtHorizon };

struct SeriesPoint {
  double window_t;  // right endpoint of the window
  double value;
};

struct CriterionReport {
  ConditionId id;
  std::vector<SeriesPoint> series;
  double tail;       // sup (or inf, for the liminf conditions) over the trailing half
  double threshold;
  double margin;
  Verdict verdict;
};

CriterionReport check_condition(const Problem& problem, ConditionId id, const ScanOptions& scan);

struct AnalysisResult {
  std::vector<CriterionReport> reports;
  bool certified;  // some condition is satisfied at the horizon
};

// Runs the four theorem conditions plus every corollary whose structural
// hypothesis holds.
AnalysisResult check_all(const Problem& problem, const ScanOptions& scan);

}  // namespace idepca
