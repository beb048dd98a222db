#include "idepca/csv.hpp"

#include <cstdio>

#include "idepca/transform.hpp"

namespace idepca {

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

namespace {

void append_row(std::string& out, double t, double x, const char* side) {
  out += format_double(t);
  out += ',';
  out += format_double(x);
  out += ',';
  out += side;
  out += '\n';
}

}  // namespace

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,side\n";
  const auto& segments = trajectory.segments();
  const auto& jumps = trajectory.jumps();
  if (segments.empty()) return out;

  append_row(out, segments.front().t_left, segments.front().x_left, ".");
  std::size_t j = 0;
  for (const Segment& seg : segments) {
    double t = seg.t_right;
    while (j < jumps.size() && jumps[j].t < t) ++j;
    if (j < jumps.size() && jumps[j].t == t) {
      append_row(out, t, jumps[j].left, "-");
      append_row(out, t, jumps[j].right, "+");
      ++j;
    } else {
      append_row(out, t, seg.x_right, ".");
    }
  }
  return out;
}

std::string criteria_csv(const AnalysisResult& analysis) {
  std::string out = "condition,window_t,value\n";
  for (const CriterionReport& report : analysis.reports) {
    for (const SeriesPoint& point : report.series) {
      out += condition_name(report.id);
      out += ',';
      out += format_double(point.window_t);
      out += ',';
      out += format_double(point.value);
      out += '\n';
    }
  }
  return out;
}

std::string transform_csv(const Problem& problem, double horizon, int grid) {
  if (grid < 1) throw ModelError("transform grid needs at least one interval");
  if (!(horizon > problem.t0)) throw ModelError("horizon must lie beyond t0");
  std::string out = "t,product,B,C\n";
  for (int i = 0; i <= grid; ++i) {
    double t = problem.t0 + (horizon - problem.t0) * static_cast<double>(i) / grid;
    out += format_double(t);
    out += ',';
    out += format_double(jump_product_value(problem, problem.t0, t));
    out += ',';
    out += format_double(transformed_b(problem, t));
    out += ',';
    out += format_double(transformed_c(problem, t));
    out += '\n';
  }
  return out;
}

std::string detect_csv(const DetectionResult& detection) {
  std::string out = "change_t\n";
  for (const SignChange& change : detection.changes) {
    out += format_double(change.t);
    out += '\n';
  }
  return out;
}

}  // namespace idepca
