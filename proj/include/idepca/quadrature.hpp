#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace idepca {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive Simpson integration of f over [a, b] (a <= b). The target is an
// absolute tolerance with a small relative floor so that integrands of very
// large magnitude do not chase accuracy below machine resolution. Throws
// QuadratureError if 50 bisection levels do not reach the target.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol);

// Same, but the interval is first cut at every break point that falls
// strictly inside (a, b); the pieces are integrated independently and summed.
double integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                             std::span<const double> breaks, double abs_tol);

}  // namespace idepca
