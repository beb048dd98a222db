#include "idepca.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "idepca/criteria.hpp"
#include "idepca/csv.hpp"
#include "idepca/detect.hpp"
#include "idepca/problem_file.hpp"
#include "idepca/solver.hpp"
#include "idepca/transform.hpp"

struct idepca_problem {
  idepca::LoadedProblem loaded;
  std::vector<std::string> warnings;
};

struct idepca_trajectory {
  idepca::Trajectory traj;
};

struct idepca_analysis {
  idepca::AnalysisResult result;
};

struct idepca_detection {
  idepca::DetectionResult result;
};

namespace {

thread_local std::string g_last_error;

class BadArgument : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

idepca_status classify_exception() {
  try {
    throw;
  } catch (const BadArgument& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_ARGUMENT;
  } catch (const idepca::IoError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_IO;
  } catch (const idepca::ProblemFileError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_PARSE;
  } catch (const idepca::ParseError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_PARSE;
  } catch (const idepca::ModelError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_VALIDATION;
  } catch (const idepca::EvalError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_DOMAIN;
  } catch (const idepca::SolverError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_SOLVER;
  } catch (const idepca::QuadratureError& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_QUADRATURE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IDEPCA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IDEPCA_ERR_INTERNAL;
  }
}

template <typename Fn>
idepca_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IDEPCA_OK;
  } catch (...) {
    return classify_exception();
  }
}

template <typename T>
const T& require(const T* p, const char* what) {
  if (p == nullptr) throw BadArgument(std::string("null ") + what);
  return *p;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> collect(const char* const* items, size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    if (items == nullptr || items[i] == nullptr) throw BadArgument("null override");
    out.emplace_back(items[i]);
  }
  return out;
}

idepca_problem* finish_problem(idepca::LoadedProblem loaded) {
  idepca::ValidationReport report =
      idepca::validate(loaded.problem, loaded.initial, loaded.horizon);
  if (!report.ok()) {
    std::string message;
    for (const auto& d : report.errors) {
      if (!message.empty()) message += "; ";
      message += d.code + ": " + d.message;
    }
    throw idepca::ModelError(message);
  }
  auto* handle = new idepca_problem{std::move(loaded), {}};
  for (const auto& d : report.warnings) handle->warnings.push_back(d.code + ": " + d.message);
  return handle;
}

}  // namespace

const char* idepca_version(void) { return "1.0.0"; }

const char* idepca_last_error(void) { return g_last_error.c_str(); }

void idepca_string_free(char* s) { std::free(s); }

idepca_status idepca_problem_load(const char* path, const char* const* overrides,
                                  size_t n_overrides, idepca_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output pointer");
    *out = finish_problem(idepca::load_problem_file(path, collect(overrides, n_overrides)));
  });
}

idepca_status idepca_problem_parse(const char* text, const char* const* overrides,
                                   size_t n_overrides, idepca_problem** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output pointer");
    *out = finish_problem(idepca::parse_problem_text(text, collect(overrides, n_overrides)));
  });
}

idepca_status idepca_example_text(int id, char** out_text) {
  return guarded([&] {
    require(out_text, "output pointer");
    *out_text = copy_string(idepca::example_problem_text(id));
  });
}

void idepca_problem_free(idepca_problem* p) { delete p; }

double idepca_problem_t0(const idepca_problem* p) {
  return p == nullptr ? 0.0 : p->loaded.problem.t0;
}

double idepca_problem_tau(const idepca_problem* p) {
  return p == nullptr ? 0.0 : p->loaded.problem.tau;
}

double idepca_problem_horizon(const idepca_problem* p) {
  return p == nullptr ? 0.0 : p->loaded.horizon;
}

size_t idepca_problem_warning_count(const idepca_problem* p) {
  return p == nullptr ? 0 : p->warnings.size();
}

idepca_status idepca_problem_warning(const idepca_problem* p, size_t index, char** out) {
  return guarded([&] {
    const auto& handle = require(p, "problem");
    require(out, "output pointer");
    if (index >= handle.warnings.size()) throw BadArgument("warning index out of range");
    *out = copy_string(handle.warnings[index]);
  });
}

idepca_status idepca_simulate(const idepca_problem* p, double horizon, double h_max,
                              idepca_trajectory** out) {
  return guarded([&] {
    const auto& handle = require(p, "problem");
    require(out, "output pointer");
    idepca::SolveOptions options;
    if (h_max > 0.0) options.h_max = h_max;
    double end = horizon > 0.0 ? horizon : handle.loaded.horizon;
    *out = new idepca_trajectory{
        idepca::integrate(handle.loaded.problem, handle.loaded.initial, end, options)};
  });
}

void idepca_trajectory_free(idepca_trajectory* t) { delete t; }

double idepca_trajectory_start(const idepca_trajectory* t) {
  return t == nullptr ? 0.0 : t->traj.start();
}

double idepca_trajectory_end(const idepca_trajectory* t) {
  return t == nullptr ? 0.0 : t->traj.end();
}

size_t idepca_trajectory_segment_count(const idepca_trajectory* t) {
  return t == nullptr ? 0 : t->traj.segments().size();
}

size_t idepca_trajectory_jump_count(const idepca_trajectory* t) {
  return t == nullptr ? 0 : t->traj.jumps().size();
}

idepca_status idepca_trajectory_value(const idepca_trajectory* t, double time, int side,
                                      double* out) {
  return guarded([&] {
    const auto& handle = require(t, "trajectory");
    require(out, "output pointer");
    *out = handle.traj.value(time, side < 0 ? idepca::Side::Left : idepca::Side::Right);
  });
}

idepca_status idepca_trajectory_csv(const idepca_trajectory* t, char** out) {
  return guarded([&] {
    const auto& handle = require(t, "trajectory");
    require(out, "output pointer");
    *out = copy_string(idepca::trajectory_csv(handle.traj));
  });
}

idepca_status idepca_check(const idepca_problem* p, double scan_start, double scan_end,
                           double stride, double margin, idepca_analysis** out) {
  return guarded([&] {
    const auto& handle = require(p, "problem");
    require(out, "output pointer");
    idepca::ScanOptions scan = idepca::ScanOptions::defaults(handle.loaded.problem);
    if (!std::isnan(scan_start)) scan.start = scan_start;
    scan.end = std::isnan(scan_end) ? scan.start + 50.0 : scan_end;
    if (!std::isnan(stride)) scan.stride = stride;
    if (!std::isnan(margin)) scan.margin = margin;
    *out = new idepca_analysis{idepca::check_all(handle.loaded.problem, scan)};
  });
}

void idepca_analysis_free(idepca_analysis* a) { delete a; }

int idepca_analysis_certified(const idepca_analysis* a) {
  return (a != nullptr && a->result.certified) ? 1 : 0;
}

size_t idepca_analysis_report_count(const idepca_analysis* a) {
  return a == nullptr ? 0 : a->result.reports.size();
}

const char* idepca_analysis_condition(const idepca_analysis* a, size_t index) {
  if (a == nullptr || index >= a->result.reports.size()) return nullptr;
  return idepca::condition_name(a->result.reports[index].id);
}

int idepca_analysis_satisfied(const idepca_analysis* a, size_t index) {
  if (a == nullptr || index >= a->result.reports.size()) return 0;
  return a->result.reports[index].verdict == idepca::Verdict::SatisfiedAtHorizon ? 1 : 0;
}

double idepca_analysis_tail(const idepca_analysis* a, size_t index) {
  if (a == nullptr || index >= a->result.reports.size()) return 0.0;
  return a->result.reports[index].tail;
}

double idepca_analysis_threshold(const idepca_analysis* a, size_t index) {
  if (a == nullptr || index >= a->result.reports.size()) return 0.0;
  return a->result.reports[index].threshold;
}

idepca_status idepca_analysis_csv(const idepca_analysis* a, char** out) {
  return guarded([&] {
    const auto& handle = require(a, "analysis");
    require(out, "output pointer");
    *out = copy_string(idepca::criteria_csv(handle.result));
  });
}

idepca_status idepca_transform_csv(const idepca_problem* p, double horizon, int grid, char** out) {
  return guarded([&] {
    const auto& handle = require(p, "problem");
    require(out, "output pointer");
    double end = horizon > 0.0 ? horizon : handle.loaded.horizon;
    *out = copy_string(idepca::transform_csv(handle.loaded.problem, end, grid));
  });
}

idepca_status idepca_verify_transform(const idepca_problem* p, double horizon, double tol,
                                      double h_max, double* out_deviation, int* out_pass) {
  return guarded([&] {
    const auto& handle = require(p, "problem");
    require(out_deviation, "output pointer");
    require(out_pass, "output pointer");
    idepca::SolveOptions options;
    if (h_max > 0.0) options.h_max = h_max;
    double end = horizon > 0.0 ? horizon : handle.loaded.horizon;
    idepca::TransformVerification v = idepca::verify_transform(
        handle.loaded.problem, handle.loaded.initial, end, tol, options);
    *out_deviation = v.max_deviation;
    *out_pass = v.pass ? 1 : 0;
  });
}

idepca_status idepca_detect(const idepca_trajectory* t, double atol, idepca_detection** out) {
  return guarded([&] {
    const auto& handle = require(t, "trajectory");
    require(out, "output pointer");
    idepca::DetectOptions options;
    options.atol = std::isnan(atol) ? -1.0 : atol;
    *out = new idepca_detection{idepca::classify_trajectory(handle.traj, options)};
  });
}

void idepca_detection_free(idepca_detection* d) { delete d; }

int idepca_detection_oscillatory(const idepca_detection* d) {
  return (d != nullptr &&
          d->result.classification == idepca::SignClass::OscillatoryDetected)
             ? 1
             : 0;
}

const char* idepca_detection_class_name(const idepca_detection* d) {
  if (d == nullptr) return "?";
  return idepca::sign_class_name(d->result.classification);
}

size_t idepca_detection_change_count(const idepca_detection* d) {
  return d == nullptr ? 0 : d->result.changes.size();
}

idepca_status idepca_detection_change_time(const idepca_detection* d, size_t index, double* out) {
  return guarded([&] {
    const auto& handle = require(d, "detection");
    require(out, "output pointer");
    if (index >= handle.result.changes.size()) throw BadArgument("change index out of range");
    *out = handle.result.changes[index].t;
  });
}

double idepca_detection_atol(const idepca_detection* d) {
  return d == nullptr ? 0.0 : d->result.atol;
}

double idepca_detection_zero_fraction(const idepca_detection* d) {
  return d == nullptr ? 0.0 : d->result.zero_fraction;
}

idepca_status idepca_detection_csv(const idepca_detection* d, char** out) {
  return guarded([&] {
    const auto& handle = require(d, "detection");
    require(out, "output pointer");
    *out = copy_string(idepca::detect_csv(handle.result));
  });
}
