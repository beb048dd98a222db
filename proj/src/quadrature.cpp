#include "idepca/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace idepca {

namespace {

constexpr int kMaxLevels = 50;
constexpr double kRelFloor = 1e-12;

struct SimpsonState {
  const std::function<double(double)>& f;
};

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adapt(const SimpsonState& s, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int level) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = s.f(lm);
  double frm = s.f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double delta = left + right - whole;
  double accept = std::max(tol, kRelFloor * std::fabs(left + right));
  if (std::fabs(delta) <= 15.0 * accept) {
    return left + right + delta / 15.0;
  }
  if (level >= kMaxLevels) {
    throw QuadratureError("adaptive quadrature did not converge within 50 bisection levels");
  }
  return adapt(s, a, m, fa, flm, fm, left, 0.5 * tol, level + 1) +
         adapt(s, m, b, fm, frm, fb, right, 0.5 * tol, level + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
  if (!(a <= b)) throw QuadratureError("integration bounds are reversed");
  if (a == b) return 0.0;
  SimpsonState s{f};
  double m = 0.5 * (a + b);
  double fa = f(a);
  double fm = f(m);
  double fb = f(b);
  double whole = simpson(fa, fm, fb, b - a);
  return adapt(s, a, b, fa, fm, fb, whole, abs_tol, 0);
}

double integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                             std::span<const double> breaks, double abs_tol) {
  if (!(a <= b)) throw QuadratureError("integration bounds are reversed");
  if (a == b) return 0.0;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breaks) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::fabs(x - y) <= 1e-14; }),
             cuts.end());
  double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += integrate_adaptive(f, cuts[k], cuts[k + 1], piece_tol);
  }
  return total;
}

}  // namespace idepca
