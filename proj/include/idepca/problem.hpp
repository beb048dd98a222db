#pragma once

#include <string>
#include <vector>

#include "idepca/expr.hpp"

namespace idepca {

// A structurally invalid problem or schedule (the data cannot describe a
// well-posed equation: b_i == 1, nonpositive tau, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Impulse {
  long index;   // 1-based position in the schedule
  double time;  // t_i
  double coeff; // b_i; the state jumps by x(t_i+) = x(t_i-) / (1 - b_i)
};

// Where and how the state jumps. Times come from an explicit list, an
// arithmetic progression, or the positive integers; coefficients from an
// expression in the 1-based index "i".
class ImpulseSchedule {
 public:
  ImpulseSchedule();  // no impulses

  static ImpulseSchedule none();
  static ImpulseSchedule integers(Expr coeff);
  static ImpulseSchedule arithmetic(double first, double step, Expr coeff);
  static ImpulseSchedule explicit_times(std::vector<double> times, Expr coeff);

  bool empty() const;

  // All impulses with lo < t_i <= hi, in time order. Throws ModelError if a
  // coefficient in the window equals 1 exactly, EvalError if one fails to
  // evaluate, and ModelError when the window would enumerate absurdly many
  // impulses.
  std::vector<Impulse> enumerate(double lo, double hi) const;

  // How many scheduled times are <= cut (used to warn about times that can
  // never fire because the solution starts after them).
  long count_at_or_before(double cut) const;

  const Expr& coeff() const noexcept { return coeff_; }

 private:
  enum class Kind { Explicit, Arithmetic, Integers };

  Kind kind_ = Kind::Explicit;
  std::vector<double> times_;
  double first_ = 1.0;
  double step_ = 1.0;
  Expr coeff_;

  double time_at(long index) const;
  Impulse make(long index) const;
};

// Left end of the history interval: initial data must cover
// [min(t0 - tau, floor(t0) - 1), t0] so both the delayed argument and the
// piecewise constant argument can always be read.
double history_domain(double t0, double tau);

struct Problem {
  Expr a, b, c;  // coefficients, functions of t
  double tau = 1.0;
  double t0 = 1.0;
  ImpulseSchedule schedule;

  // Effective impulses in (lo, hi]: the schedule restricted to times after
  // t0 (the equation starts at t0, so earlier times never fire).
  std::vector<Impulse> impulses(double lo, double hi) const;
};

struct InitialData {
  Expr phi;
  double domain_start = 0.0;
};

InitialData make_initial(const Problem& problem, Expr phi);

struct Diagnostic {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
  bool ok() const { return errors.empty(); }
};

// Structural checks plus coefficient sampling over [t0, horizon] and phi
// sampling over its history domain. Solver and criteria entry points refuse
// problems whose report has errors.
ValidationReport validate(const Problem& problem, const InitialData& initial, double horizon);

}  // namespace idepca
