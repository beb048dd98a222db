#pragma once

#include <cstddef>
#include <vector>

#include "idepca/solver.hpp"

namespace idepca {

// A detected sign change. Continuous crossings carry a bisection-refined
// location; flips across an impulse carry the jump time verbatim.
struct SignChange {
  double t;
  bool at_jump;
};

// A finite window can witness oscillation but never disprove it, so the
// negative verdict only states that the scanned sign pattern settled.
enum class SignClass {
  OscillatoryDetected,    // at least two changes and one inside the final quarter
  SignConstantAtHorizon,  // everything else
};

// Maximal run of consecutive samples inside the zero band.
struct ZeroRun {
  double t_begin;
  double t_end;
};

struct DetectOptions {
  // Samples with |x| <= atol count as zero touches and never feed the sign
  // walk. Negative means auto: 1e-9 * (1 + max |x| over the trajectory).
  double atol = -1.0;
  double refine_width = 1e-10;  // bisection stops at this bracket width
  int interior_samples = 3;     // extra probes strictly inside each segment
};

struct DetectionResult {
  std::vector<SignChange> changes;
  SignClass classification = SignClass::SignConstantAtHorizon;
  double atol = 0.0;           // tolerance actually used
  double max_abs = 0.0;        // max |x| over all samples
  std::vector<ZeroRun> zero_runs;
  double zero_fraction = 0.0;  // fraction of samples inside the zero band
  std::size_t sample_count = 0;

  // Time of the latest change; meaningless when changes is empty.
  double last_change() const { return changes.empty() ? 0.0 : changes.back().t; }
};

// Sign-flip scan alone: walks the dense output (segment endpoints on both
// sides of every jump, plus interior probes) and records every flip between
// consecutive out-of-band samples. Works on any trajectory.
std::vector<SignChange> find_sign_changes(const Trajectory& trajectory, double atol = -1.0);

// Full classification. Requires a scanned span of at least 4 time units so
// the final-quarter recency rule is meaningful.
DetectionResult classify_trajectory(const Trajectory& trajectory,
                                    const DetectOptions& options = {});

const char* sign_class_name(SignClass c);

}  // namespace idepca
