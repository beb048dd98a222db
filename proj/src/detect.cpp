#include "idepca/detect.hpp"

#include <algorithm>
#include <cmath>

namespace idepca {

namespace {

struct Sample {
  double t;
  double x;
};

double hermite(const Segment& seg, double theta) {
  double h = seg.t_right - seg.t_left;
  double h00 = (2.0 * theta - 3.0) * theta * theta + 1.0;
  double h10 = ((theta - 2.0) * theta + 1.0) * theta;
  double h01 = (3.0 - 2.0 * theta) * theta * theta;
  double h11 = (theta - 1.0) * theta * theta;
  return h00 * seg.x_left + h10 * h * seg.d_left + h01 * seg.x_right + h11 * h * seg.d_right;
}

int band_sign(double x, double atol) {
  if (std::abs(x) <= atol) return 0;
  return x > 0.0 ? 1 : -1;
}

// Shared scan: samples the dense output in time order and records flips,
// zero runs, and scale information into `result`.
void walk(const Trajectory& trajectory, const DetectOptions& options, DetectionResult& result) {
  if (options.interior_samples < 0) {
    throw SolverError("interior sample count must be nonnegative");
  }
  if (!(options.refine_width > 0.0)) {
    throw SolverError("bisection width must be positive");
  }

  // Each boundary contributes its left limit from the earlier segment and
  // its (post-jump) value from the later one, so a flip across an impulse
  // shows up as two samples sharing one time.
  const auto& segments = trajectory.segments();
  std::vector<Sample> samples;
  samples.reserve(segments.size() * (2 + static_cast<std::size_t>(options.interior_samples)));
  for (const Segment& seg : segments) {
    samples.push_back({seg.t_left, seg.x_left});
    for (int j = 1; j <= options.interior_samples; ++j) {
      double theta = static_cast<double>(j) / (options.interior_samples + 1);
      samples.push_back({seg.t_left + theta * (seg.t_right - seg.t_left), hermite(seg, theta)});
    }
    samples.push_back({seg.t_right, seg.x_right});
  }

  result.max_abs = 0.0;
  for (const Sample& s : samples) result.max_abs = std::max(result.max_abs, std::abs(s.x));
  result.atol = options.atol < 0.0 ? 1e-9 * (1.0 + result.max_abs) : options.atol;
  result.sample_count = samples.size();

  std::size_t zero_count = 0;
  bool in_zero_run = false;
  int prev_sign = 0;
  double prev_t = trajectory.start();
  for (const Sample& s : samples) {
    int sg = band_sign(s.x, result.atol);
    if (sg == 0) {
      ++zero_count;
      if (in_zero_run) {
        result.zero_runs.back().t_end = s.t;
      } else {
        result.zero_runs.push_back({s.t, s.t});
        in_zero_run = true;
      }
      continue;
    }
    in_zero_run = false;
    if (prev_sign != 0 && sg != prev_sign) {
      if (s.t - prev_t <= options.refine_width) {
        result.changes.push_back({s.t, true});
      } else {
        double lo = prev_t;
        double hi = s.t;
        int lo_sign = prev_sign;
        for (int iter = 0; iter < 80 && hi - lo > options.refine_width; ++iter) {
          double m = 0.5 * (lo + hi);
          int ms = band_sign(trajectory.value(m, Side::Right), result.atol);
          if (ms == 0) {
            lo = hi = m;  // landed inside the zero band: close enough
          } else if (ms == lo_sign) {
            lo = m;
          } else {
            hi = m;
          }
        }
        result.changes.push_back({0.5 * (lo + hi), false});
      }
    }
    prev_sign = sg;
    prev_t = s.t;
  }
  result.zero_fraction = samples.empty()
                             ? 0.0
                             : static_cast<double>(zero_count) / static_cast<double>(samples.size());
}

}  // namespace

const char* sign_class_name(SignClass c) {
  switch (c) {
    case SignClass::OscillatoryDetected: return "OscillatoryDetected";
    case SignClass::SignConstantAtHorizon: return "SignConstantAtHorizon";
  }
  return "?";
}

std::vector<SignChange> find_sign_changes(const Trajectory& trajectory, double atol) {
  DetectOptions options;
  options.atol = atol;
  DetectionResult result;
  walk(trajectory, options, result);
  return std::move(result.changes);
}

DetectionResult classify_trajectory(const Trajectory& trajectory, const DetectOptions& options) {
  double start = trajectory.start();
  double span = trajectory.end() - start;
  if (span < 4.0 - 1e-9) {
    throw SolverError("classification needs a span of at least 4 time units");
  }
  DetectionResult result;
  walk(trajectory, options, result);

  double quarter = start + 0.75 * span;
  bool late_change = false;
  for (const SignChange& ch : result.changes) {
    if (ch.t >= quarter) late_change = true;
  }
  result.classification = (result.changes.size() >= 2 && late_change)
                              ? SignClass::OscillatoryDetected
                              : SignClass::SignConstantAtHorizon;
  return result;
}

}  // namespace idepca
