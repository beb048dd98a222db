#include "idepca/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace idepca {

namespace {

constexpr long kEnumerationCap = 10'000'000;
constexpr double kNegativityGuard = -1e-12;

std::string describe(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ImpulseSchedule::ImpulseSchedule() : coeff_(Expr::parse("0", "i")) {}

ImpulseSchedule ImpulseSchedule::none() { return ImpulseSchedule(); }

ImpulseSchedule ImpulseSchedule::integers(Expr coeff) {
  ImpulseSchedule s;
  s.kind_ = Kind::Integers;
  s.coeff_ = std::move(coeff);
  return s;
}

ImpulseSchedule ImpulseSchedule::arithmetic(double first, double step, Expr coeff) {
  if (!(first > 0.0)) throw ModelError("arithmetic schedule: first time must be positive");
  if (!(step > 0.0)) throw ModelError("arithmetic schedule: step must be positive");
  ImpulseSchedule s;
  s.kind_ = Kind::Arithmetic;
  s.first_ = first;
  s.step_ = step;
  s.coeff_ = std::move(coeff);
  return s;
}

ImpulseSchedule ImpulseSchedule::explicit_times(std::vector<double> times, Expr coeff) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) throw ModelError("impulse times must be positive");
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw ModelError("impulse times must be strictly increasing");
    }
  }
  ImpulseSchedule s;
  s.kind_ = Kind::Explicit;
  s.times_ = std::move(times);
  s.coeff_ = std::move(coeff);
  return s;
}

bool ImpulseSchedule::empty() const { return kind_ == Kind::Explicit && times_.empty(); }

double ImpulseSchedule::time_at(long index) const {
  switch (kind_) {
    case Kind::Explicit:
      return times_[static_cast<std::size_t>(index - 1)];
    case Kind::Arithmetic:
      return first_ + static_cast<double>(index - 1) * step_;
    case Kind::Integers:
      return static_cast<double>(index);
  }
  return 0.0;
}

Impulse ImpulseSchedule::make(long index) const {
  double b = coeff_.eval(static_cast<double>(index));
  if (b == 1.0) {
    throw ModelError("impulse coefficient b_" + std::to_string(index) +
                     " equals 1; the jump x(t+) = x(t-)/(1-b) is undefined");
  }
  return Impulse{index, time_at(index), b};
}

std::vector<Impulse> ImpulseSchedule::enumerate(double lo, double hi) const {
  std::vector<Impulse> result;
  if (!(hi > lo)) return result;
  long i_lo = 1;
  long i_hi = 0;
  switch (kind_) {
    case Kind::Explicit: {
      auto begin = std::upper_bound(times_.begin(), times_.end(), lo);
      auto end = std::upper_bound(times_.begin(), times_.end(), hi);
      i_lo = static_cast<long>(begin - times_.begin()) + 1;
      i_hi = static_cast<long>(end - times_.begin());
      break;
    }
    case Kind::Arithmetic:
    case Kind::Integers: {
      double first = kind_ == Kind::Integers ? 1.0 : first_;
      double step = kind_ == Kind::Integers ? 1.0 : step_;
      // Smallest index with time > lo and largest with time <= hi, computed
      // approximately and then nudged so the strict/inclusive comparisons on
      // the actual times decide.
      double q_lo = (lo - first) / step + 1.0;
      double q_hi = (hi - first) / step + 1.0;
      if (q_lo > 1e18 || q_hi > 1e18) throw ModelError("impulse window is unreasonably large");
      i_lo = std::max(1L, static_cast<long>(std::floor(q_lo)));
      while (i_lo > 1 && time_at(i_lo - 1) > lo) --i_lo;
      while (time_at(i_lo) <= lo) ++i_lo;
      i_hi = std::max(0L, static_cast<long>(std::ceil(q_hi)));
      while (time_at(i_hi + 1) <= hi) ++i_hi;
      while (i_hi >= 1 && time_at(i_hi) > hi) --i_hi;
      break;
    }
  }
  if (i_hi < i_lo) return result;
  if (i_hi - i_lo + 1 > kEnumerationCap) {
    throw ModelError("impulse window would enumerate more than 10^7 impulses");
  }
  result.reserve(static_cast<std::size_t>(i_hi - i_lo + 1));
  for (long i = i_lo; i <= i_hi; ++i) result.push_back(make(i));
  return result;
}

long ImpulseSchedule::count_at_or_before(double cut) const {
  switch (kind_) {
    case Kind::Explicit:
      return static_cast<long>(std::upper_bound(times_.begin(), times_.end(), cut) -
                               times_.begin());
    case Kind::Arithmetic: {
      if (cut < first_) return 0;
      long n = static_cast<long>(std::floor((cut - first_) / step_)) + 1;
      while (n >= 1 && time_at(n) > cut) --n;
      while (time_at(n + 1) <= cut) ++n;
      return n;
    }
    case Kind::Integers:
      return cut < 1.0 ? 0 : static_cast<long>(std::floor(cut));
  }
  return 0;
}

double history_domain(double t0, double tau) {
  return std::min(t0 - tau, std::floor(t0) - 1.0);
}

std::vector<Impulse> Problem::impulses(double lo, double hi) const {
  return schedule.enumerate(std::max(lo, t0), hi);
}

InitialData make_initial(const Problem& problem, Expr phi) {
  InitialData init;
  init.phi = std::move(phi);
  init.domain_start = history_domain(problem.t0, problem.tau);
  return init;
}

ValidationReport validate(const Problem& problem, const InitialData& initial, double horizon) {
  ValidationReport report;
  auto error = [&](const char* code, std::string message) {
    report.errors.push_back({code, std::move(message)});
  };
  auto warning = [&](const char* code, std::string message) {
    report.warnings.push_back({code, std::move(message)});
  };

  if (!(problem.tau > 0.0)) error("TAU_NONPOSITIVE", "tau must be positive");
  if (!(problem.t0 > 0.0)) error("T0_NONPOSITIVE", "t0 must be positive");
  if (!(horizon > problem.t0)) error("HORIZON", "horizon must be greater than t0");
  if (problem.tau > 0.0 && problem.tau < 1e-3) {
    warning("SMALL_TAU", "tau below 1e-3 forces very small integration steps");
  }
  if (!report.errors.empty()) return report;

  try {
    std::vector<Impulse> in_window = problem.impulses(problem.t0, horizon);
    bool above_one = false;
    for (const Impulse& imp : in_window) {
      if (imp.coeff > 1.0) above_one = true;
    }
    if (above_one) {
      warning("IMPULSE_SIGN_FLIP",
              "some impulse coefficients exceed 1, so every such impulse flips the sign of the "
              "solution and oscillation is immediate; the integral criteria assume b_i < 1");
    }
  } catch (const std::exception& e) {
    error("IMPULSE_COEFF", e.what());
  }

  long skipped = problem.schedule.count_at_or_before(problem.t0);
  if (skipped > 0) {
    warning("IMPULSES_BEFORE_START",
            std::to_string(skipped) + " scheduled impulse time(s) at or before t0 = " +
                describe(problem.t0) + " are ignored (the solution starts at t0)");
  }

  if (problem.b.is_zero() && problem.c.is_zero()) {
    warning("NO_DELAYED_TERMS",
            "b and c are both identically zero; the equation degenerates to a plain linear ODE "
            "with impulses and the oscillation criteria do not apply");
  }

  const int kGrid = 1000;
  auto sample = [&](const Expr& f, double lo, double hi, const char* name, bool nonnegative) {
    for (int k = 0; k <= kGrid; ++k) {
      double t = lo + (hi - lo) * static_cast<double>(k) / kGrid;
      double v;
      try {
        v = f.eval(t);
      } catch (const EvalError& e) {
        error("COEFFICIENT_DOMAIN", std::string(name) + "(" + describe(t) + "): " + e.what());
        return;
      }
      if (nonnegative && v < kNegativityGuard) {
        error("COEFFICIENT_NEGATIVE",
              std::string(name) + "(" + describe(t) + ") = " + describe(v) +
                  " is negative; the oscillation theory requires " + name + " >= 0");
        return;
      }
    }
  };
  sample(problem.a, problem.t0, horizon, "a", false);
  sample(problem.b, problem.t0, horizon, "b", true);
  sample(problem.c, problem.t0, horizon, "c", true);

  for (int k = 0; k <= kGrid; ++k) {
    double t = initial.domain_start +
               (problem.t0 - initial.domain_start) * static_cast<double>(k) / kGrid;
    try {
      initial.phi.eval(t);
    } catch (const EvalError& e) {
      error("PHI_DOMAIN", std::string("phi(") + describe(t) + "): " + e.what());
      break;
    }
  }

  return report;
}

}  // namespace idepca
