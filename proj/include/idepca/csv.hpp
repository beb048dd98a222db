#pragma once

#include <string>

#include "idepca/criteria.hpp"
#include "idepca/detect.hpp"
#include "idepca/solver.hpp"

namespace idepca {

// 17-significant-digit decimal: the shortest fixed format that survives a
// print/parse round trip bit-exactly. Locale-independent ('.' separator).
std::string format_double(double x);

// Header "t,x,side"; one row per step boundary in time order. A jump time
// produces two rows, the left limit with side "-" and the state after the
// jump with side "+"; every other row carries side ".".
std::string trajectory_csv(const Trajectory& trajectory);

// Header "condition,window_t,value"; the full scan series of every report.
std::string criteria_csv(const AnalysisResult& analysis);

// Header "t,product,B,C" on a uniform grid of `grid` intervals over
// [t0, horizon]: the jump product over (t0, t] and the coefficients of the
// rescaled jump-free equation.
std::string transform_csv(const Problem& problem, double horizon, int grid);

// Header "change_t"; one row per detected sign change.
std::string detect_csv(const DetectionResult& detection);

}  // namespace idepca
