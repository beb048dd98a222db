#include "idepca/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "idepca/transform.hpp"

namespace idepca {

namespace {

constexpr double kNegativityGuard = -1e-12;
constexpr double kGridSlack = 1e-9;

}  // namespace

Antiderivative::Antiderivative(Expr a, double t_base, double t_max, double abs_tol,
                               std::vector<double> extra_nodes)
    : a_(std::move(a)), t_base_(t_base), t_max_(t_max), abs_tol_(abs_tol) {
  if (!(t_max_ >= t_base_)) throw QuadratureError("antiderivative range is reversed");
  if (a_.is_constant()) {
    constant_ = true;
    constant_value_ = a_.eval(t_base_);
    return;
  }
  nodes_.push_back(t_base_);
  for (double n = std::ceil(t_base_); n <= t_max_; n += 1.0) nodes_.push_back(n);
  for (double t : extra_nodes) {
    if (t > t_base_ && t < t_max_) nodes_.push_back(t);
  }
  nodes_.push_back(t_max_);
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end(),
                           [](double x, double y) { return y - x <= 1e-12; }),
               nodes_.end());
  // Refine to a maximum cell width so off-node queries stay short.
  std::vector<double> refined;
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    double lo = nodes_[k];
    double hi = nodes_[k + 1];
    refined.push_back(lo);
    int pieces = static_cast<int>(std::ceil((hi - lo) / 0.25));
    for (int j = 1; j < pieces; ++j) {
      refined.push_back(lo + (hi - lo) * static_cast<double>(j) / pieces);
    }
  }
  refined.push_back(nodes_.back());
  nodes_ = std::move(refined);

  cell_tol_ = abs_tol_ / static_cast<double>(nodes_.size());
  auto f = [this](double t) { return a_.eval(t); };
  cumulative_.resize(nodes_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    cumulative_[k + 1] =
        cumulative_[k] + integrate_adaptive(f, nodes_[k], nodes_[k + 1], cell_tol_);
  }
}

double Antiderivative::operator()(double t) const {
  if (constant_) return constant_value_ * (t - t_base_);
  if (t < t_base_ - 1e-12 || t > t_max_ + 1e-12) {
    throw QuadratureError("antiderivative queried outside its range");
  }
  t = std::clamp(t, t_base_, t_max_);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  if (k > 0) --k;
  if (k + 1 >= nodes_.size()) k = nodes_.size() - 2;
  if (t == nodes_[k]) return cumulative_[k];
  auto f = [this](double s) { return a_.eval(s); };
  return cumulative_[k] + integrate_adaptive(f, nodes_[k], t, cell_tol_);
}

const char* condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::T2b: return "T2-b";
    case ConditionId::T2c: return "T2-c";
    case ConditionId::T3b: return "T3-b";
    case ConditionId::T3c: return "T3-c";
    case ConditionId::C1: return "C1";
    case ConditionId::C2: return "C2";
    case ConditionId::C3: return "C3";
    case ConditionId::C4: return "C4";
  }
  return "?";
}

bool condition_integer_indexed(ConditionId id) {
  return id == ConditionId::T2c || id == ConditionId::T3c || id == ConditionId::C2 ||
         id == ConditionId::C4;
}

bool condition_uses_c(ConditionId id) { return condition_integer_indexed(id); }

bool condition_liminf(ConditionId id) {
  return id == ConditionId::T3b || id == ConditionId::T3c || id == ConditionId::C3 ||
         id == ConditionId::C4;
}

double condition_threshold(ConditionId id) {
  return condition_liminf(id) ? 1.0 / M_E : 1.0;
}

double window_integral_b(const Problem& problem, const Antiderivative& a_integral, double t,
                         double window, double abs_tol) {
  if (!(window > 0.0)) throw QuadratureError("window length must be positive");
  double lo = t - window;
  double tau = problem.tau;

  // The product factor jumps where s or s - tau crosses an impulse time.
  std::vector<double> breaks;
  for (const Impulse& imp : problem.impulses(lo, t)) breaks.push_back(imp.time);
  for (const Impulse& imp : problem.impulses(lo - tau, t - tau)) breaks.push_back(imp.time + tau);

  const Expr& b = problem.b;
  // Integrate piece by piece so the product can be evaluated once per piece
  // (it is constant between breaks; sampling it at endpoints would pick the
  // wrong side of a jump).
  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double c : breaks) {
    if (c > lo && c < t) cuts.push_back(c);
  }
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return y - x <= 1e-14; }),
             cuts.end());

  double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double u = cuts[k];
    double v = cuts[k + 1];
    double mid = 0.5 * (u + v);
    double product = jump_product_value(problem, mid - tau, mid);
    auto g = [&](double s) {
      double bv = b.eval(s);
      if (bv < kNegativityGuard) {
        throw QuadratureError("b is negative inside a criterion window");
      }
      return product * bv * std::exp(a_integral(s) - a_integral(s - tau));
    };
    total += integrate_adaptive(g, u, v, piece_tol);
  }
  return total;
}

double window_integral_c(const Problem& problem, const Antiderivative& a_integral, long n,
                         double window, double abs_tol) {
  if (!(window > 0.0)) throw QuadratureError("window length must be positive");
  double hi = static_cast<double>(n) + 1.0;
  double lo = hi - window;
  double base = static_cast<double>(n) - 1.0;

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (const Impulse& imp : problem.impulses(lo, hi)) {
    if (imp.time > lo && imp.time < hi) cuts.push_back(imp.time);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return y - x <= 1e-14; }),
             cuts.end());

  const Expr& c = problem.c;
  double a_base = a_integral(base);
  double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double u = cuts[k];
    double v = cuts[k + 1];
    double mid = 0.5 * (u + v);
    double product = jump_product_value(problem, base, mid);
    auto g = [&](double s) {
      double cv = c.eval(s);
      if (cv < kNegativityGuard) {
        throw QuadratureError("c is negative inside a criterion window");
      }
      return product * cv * std::exp(a_integral(s) - a_base);
    };
    total += integrate_adaptive(g, u, v, piece_tol);
  }
  return total;
}

ScanOptions ScanOptions::defaults(const Problem& problem) {
  ScanOptions scan;
  scan.start = problem.t0 + std::max(problem.tau, 2.0);
  scan.end = scan.start + 50.0;
  scan.stride = 0.05;
  scan.margin = 1e-6;
  return scan;
}

namespace {

double window_length(const Problem& problem, ConditionId id) {
  double l = std::min(problem.tau, 1.0);
  switch (id) {
    case ConditionId::T2b:
    case ConditionId::T3b:
    case ConditionId::T2c:
    case ConditionId::T3c:
      return l;
    case ConditionId::C1:
    case ConditionId::C3:
      return problem.tau;
    case ConditionId::C2:
    case ConditionId::C4:
      return 1.0;
  }
  return l;
}

void require_applicable(const Problem& problem, ConditionId id) {
  switch (id) {
    case ConditionId::C1:
    case ConditionId::C3:
      if (!problem.c.is_zero() || problem.b.is_zero()) {
        throw ModelError(std::string(condition_name(id)) +
                         " applies only when c vanishes identically and b does not");
      }
      break;
    case ConditionId::C2:
    case ConditionId::C4:
      if (!problem.b.is_zero() || problem.c.is_zero()) {
        throw ModelError(std::string(condition_name(id)) +
                         " applies only when b vanishes identically and c does not");
      }
      break;
    default:
      break;
  }
}

}  // namespace

CriterionReport check_condition(const Problem& problem, ConditionId id, const ScanOptions& scan) {
  require_applicable(problem, id);
  double lower_bound = problem.t0 + std::max(problem.tau, 2.0);
  if (scan.start < lower_bound - kGridSlack) {
    throw ModelError("scan must start at or after t0 + max(tau, 2)");
  }
  if (!(scan.end > scan.start)) throw ModelError("scan window is empty");
  if (!(scan.stride > 0.0)) throw ModelError("scan stride must be positive");
  if (scan.margin < 0.0) throw ModelError("scan margin must be nonnegative");

  double window = window_length(problem, id);
  CriterionReport report;
  report.id = id;
  report.threshold = condition_threshold(id);
  report.margin = scan.margin;

  // One antiderivative wide enough for every argument the integrands use.
  double a_lo = std::min(scan.start - window - problem.tau, std::floor(scan.start) - 1.0);
  double a_hi = scan.end + 1.0;
  std::vector<double> extra;
  for (const Impulse& imp : problem.impulses(a_lo, a_hi)) {
    extra.push_back(imp.time);
    if (imp.time + problem.tau < a_hi) extra.push_back(imp.time + problem.tau);
  }
  Antiderivative a_integral(problem.a, a_lo, a_hi, 1e-10, std::move(extra));

  if (condition_integer_indexed(id)) {
    long n_lo = static_cast<long>(std::ceil(scan.start - kGridSlack));
    long n_hi = static_cast<long>(std::floor(scan.end + kGridSlack));
    if (n_hi < n_lo) throw ModelError("scan window contains no integer index");
    for (long n = n_lo; n <= n_hi; ++n) {
      double value = window_integral_c(problem, a_integral, n, window);
      report.series.push_back({static_cast<double>(n) + 1.0, value});
    }
  } else {
    long count = static_cast<long>(std::floor((scan.end - scan.start) / scan.stride + kGridSlack));
    for (long k = 0; k <= count; ++k) {
      double t = scan.start + static_cast<double>(k) * scan.stride;
      double value = window_integral_b(problem, a_integral, t, window);
      report.series.push_back({t, value});
    }
  }

  // Tail statistic over the trailing half of the series.
  std::size_t size = report.series.size();
  std::size_t from = size - (size + 1) / 2;
  bool inf = condition_liminf(id);
  double tail = inf ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  for (std::size_t k = from; k < size; ++k) {
    tail = inf ? std::min(tail, report.series[k].value) : std::max(tail, report.series[k].value);
  }
  report.tail = tail;
  report.verdict = tail > report.threshold + scan.margin ? Verdict::SatisfiedAtHorizon
                                                         : Verdict::NotSatisfiedAtHorizon;
  return report;
}

AnalysisResult check_all(const Problem& problem, const ScanOptions& scan) {
  AnalysisResult result;
  result.certified = false;
  std::vector<ConditionId> ids = {ConditionId::T2b, ConditionId::T2c, ConditionId::T3b,
                                  ConditionId::T3c};
  bool c_zero = problem.c.is_zero();
  bool b_zero = problem.b.is_zero();
  if (c_zero && !b_zero) {
    ids.push_back(ConditionId::C1);
    ids.push_back(ConditionId::C3);
  }
  if (b_zero && !c_zero) {
    ids.push_back(ConditionId::C2);
    ids.push_back(ConditionId::C4);
  }
  for (ConditionId id : ids) {
    result.reports.push_back(check_condition(problem, id, scan));
    if (result.reports.back().verdict == Verdict::SatisfiedAtHorizon) result.certified = true;
  }
  return result;
}

}  // namespace idepca
