#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "idepca.h"

namespace {

int exit_code_for(idepca_status status) {
  switch (status) {
    case IDEPCA_OK: return 0;
    case IDEPCA_ERR_IO: return 2;
    case IDEPCA_ERR_PARSE: return 3;
    case IDEPCA_ERR_VALIDATION: return 4;
    default: return 1;  // runtime evaluation failure (domain, solver, quadrature, ...)
  }
}

[[noreturn]] void die(idepca_status status) {
  std::cerr << "error: " << idepca_last_error() << "\n";
  std::exit(exit_code_for(status));
}

void need(idepca_status status) {
  if (status != IDEPCA_OK) die(status);
}

std::string fmt17(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string fmt6(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6g", x);
  return buffer;
}

struct ProblemHandle {
  idepca_problem* p = nullptr;
  ~ProblemHandle() { idepca_problem_free(p); }
};

struct TrajectoryHandle {
  idepca_trajectory* t = nullptr;
  ~TrajectoryHandle() { idepca_trajectory_free(t); }
};

struct AnalysisHandle {
  idepca_analysis* a = nullptr;
  ~AnalysisHandle() { idepca_analysis_free(a); }
};

struct DetectionHandle {
  idepca_detection* d = nullptr;
  ~DetectionHandle() { idepca_detection_free(d); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { idepca_string_free(s); }
};

idepca_status load_problem(const std::string& path, const std::vector<std::string>& overrides,
                           ProblemHandle& out) {
  std::vector<const char*> pointers;
  pointers.reserve(overrides.size());
  for (const std::string& o : overrides) pointers.push_back(o.c_str());
  return idepca_problem_load(path.c_str(), pointers.empty() ? nullptr : pointers.data(),
                             pointers.size(), &out.p);
}

void load_or_die(const std::string& path, ProblemHandle& out) {
  need(load_problem(path, {}, out));
  for (size_t i = 0; i < idepca_problem_warning_count(out.p); ++i) {
    OwnedString w;
    if (idepca_problem_warning(out.p, i, &w.s) == IDEPCA_OK) {
      std::cerr << "warning: " << w.s << "\n";
    }
  }
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(2);
  }
}

std::string satisfied_list(const idepca_analysis* a) {
  std::string out;
  for (size_t i = 0; i < idepca_analysis_report_count(a); ++i) {
    if (idepca_analysis_satisfied(a, i)) {
      if (!out.empty()) out += ", ";
      out += idepca_analysis_condition(a, i);
    }
  }
  return out;
}

std::string criteria_summary(const idepca_analysis* a) {
  if (idepca_analysis_certified(a)) return "CERTIFIED (" + satisfied_list(a) + ")";
  return "INCONCLUSIVE";
}

constexpr double kUnset = -1.0;  // numeric flags use NaN-or-default semantics

double or_nan(double flag_value) {
  return flag_value == kUnset ? std::nan("") : flag_value;
}

// ---- subcommand bodies (each terminates the process) ----------------------

[[noreturn]] void run_simulate(const std::string& file, double h_max, const std::string& out) {
  ProblemHandle problem;
  load_or_die(file, problem);
  TrajectoryHandle traj;
  need(idepca_simulate(problem.p, 0.0, h_max, &traj.t));
  OwnedString csv;
  need(idepca_trajectory_csv(traj.t, &csv.s));
  write_output(csv.s, out);
  std::exit(0);
}

[[noreturn]] void run_check(const std::string& file, double start, double end, double stride,
                            double margin) {
  ProblemHandle problem;
  load_or_die(file, problem);
  AnalysisHandle analysis;
  need(idepca_check(problem.p, or_nan(start), or_nan(end), or_nan(stride), or_nan(margin),
                    &analysis.a));
  OwnedString csv;
  need(idepca_analysis_csv(analysis.a, &csv.s));
  std::cout << csv.s;
  std::cout << criteria_summary(analysis.a) << "\n";
  std::exit(idepca_analysis_certified(analysis.a) ? 0 : 10);
}

[[noreturn]] void run_transform(const std::string& file, int grid) {
  ProblemHandle problem;
  load_or_die(file, problem);
  OwnedString csv;
  need(idepca_transform_csv(problem.p, 0.0, grid, &csv.s));
  std::cout << csv.s;
  std::exit(0);
}

[[noreturn]] void run_verify(const std::string& file, double tol, double h_max) {
  ProblemHandle problem;
  load_or_die(file, problem);
  double deviation = 0.0;
  int pass = 0;
  need(idepca_verify_transform(problem.p, 0.0, tol, h_max, &deviation, &pass));
  std::cout << "max deviation = " << fmt6(deviation) << " (tol " << fmt6(tol)
            << ", relative to solution scale)\n";
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  std::exit(pass ? 0 : 11);
}

[[noreturn]] void run_detect(const std::string& file, double h_max, double atol) {
  ProblemHandle problem;
  load_or_die(file, problem);
  TrajectoryHandle traj;
  need(idepca_simulate(problem.p, 0.0, h_max, &traj.t));
  DetectionHandle detection;
  need(idepca_detect(traj.t, atol, &detection.d));
  size_t count = idepca_detection_change_count(detection.d);
  std::cout << "verdict: " << idepca_detection_class_name(detection.d) << " (" << count
            << " sign changes, atol " << fmt6(idepca_detection_atol(detection.d)) << ")\n";
  OwnedString csv;
  need(idepca_detection_csv(detection.d, &csv.s));
  std::cout << csv.s;
  std::exit(idepca_detection_oscillatory(detection.d) ? 0 : 12);
}

[[noreturn]] void run_example(int id) {
  OwnedString text;
  need(idepca_example_text(id, &text.s));
  ProblemHandle problem;
  need(idepca_problem_parse(text.s, nullptr, 0, &problem.p));
  std::cout << "problem: built-in example " << id << " (t0 = "
            << fmt6(idepca_problem_t0(problem.p)) << ", tau = "
            << fmt6(idepca_problem_tau(problem.p)) << ", horizon = "
            << fmt6(idepca_problem_horizon(problem.p)) << ")\n";

  AnalysisHandle analysis;
  double nan = std::nan("");
  need(idepca_check(problem.p, nan, nan, nan, nan, &analysis.a));
  std::cout << "criteria: " << criteria_summary(analysis.a) << "\n";

  TrajectoryHandle traj;
  need(idepca_simulate(problem.p, 0.0, 0.0, &traj.t));
  std::cout << "simulate: " << idepca_trajectory_segment_count(traj.t) << " steps, "
            << idepca_trajectory_jump_count(traj.t) << " jumps on ["
            << fmt6(idepca_trajectory_start(traj.t)) << ", "
            << fmt6(idepca_trajectory_end(traj.t)) << "]\n";

  DetectionHandle detection;
  need(idepca_detect(traj.t, nan, &detection.d));
  size_t count = idepca_detection_change_count(detection.d);
  std::cout << "detect: " << idepca_detection_class_name(detection.d);
  if (count > 0) {
    double last = 0.0;
    need(idepca_detection_change_time(detection.d, count - 1, &last));
    std::cout << " (" << count << " sign changes, last at t = " << fmt6(last) << ")";
  } else {
    std::cout << " (no sign changes)";
  }
  std::cout << "\n";
  std::exit(0);
}

// ---- sweep -----------------------------------------------------------------

struct VarySpec {
  std::string key;
  double lo = 0.0;
  double hi = 0.0;
  long count = 1;
};

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

VarySpec parse_vary(const std::string& text) {
  auto structural = [&]() -> VarySpec {
    std::cerr << "error: --vary expects key=lo:hi:n, got '" << text << "'\n";
    std::exit(64);
  };
  std::size_t eq = text.find('=');
  if (eq == std::string::npos) return structural();
  VarySpec spec;
  spec.key = text.substr(0, eq);
  static const char* kKeys[] = {"a", "b", "c", "phi", "tau", "t0", "horizon"};
  if (std::find_if(std::begin(kKeys), std::end(kKeys),
                   [&](const char* k) { return spec.key == k; }) == std::end(kKeys)) {
    std::cerr << "error: --vary key must be one of a, b, c, phi, tau, t0, horizon\n";
    std::exit(64);
  }
  std::string rest = text.substr(eq + 1);
  std::size_t c1 = rest.find(':');
  std::size_t c2 = c1 == std::string::npos ? std::string::npos : rest.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) return structural();
  double n_raw = 0.0;
  if (!parse_number(rest.substr(0, c1), spec.lo) ||
      !parse_number(rest.substr(c1 + 1, c2 - c1 - 1), spec.hi) ||
      !parse_number(rest.substr(c2 + 1), n_raw) || n_raw < 1.0 ||
      n_raw != std::floor(n_raw)) {
    std::cerr << "error: --vary '" << text << "' has a malformed number\n";
    std::exit(65);
  }
  spec.count = static_cast<long>(n_raw);
  return spec;
}

struct SweepRow {
  std::vector<double> params;
  std::string criteria;
  std::string detect;
  idepca_status status = IDEPCA_OK;
  std::string error;
};

[[noreturn]] void run_sweep(const std::string& file, const std::vector<std::string>& vary_texts,
                            double h_max, long jobs) {
  std::vector<VarySpec> specs;
  specs.reserve(vary_texts.size());
  for (const std::string& v : vary_texts) specs.push_back(parse_vary(v));

  std::size_t total = 1;
  for (const VarySpec& s : specs) total *= static_cast<std::size_t>(s.count);
  if (total == 0 || total > 1000000) {
    std::cerr << "error: sweep grid has " << total << " points\n";
    std::exit(64);
  }

  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      std::size_t index = cursor.fetch_add(1);
      if (index >= total) return;
      SweepRow& row = rows[index];

      std::size_t rem = index;
      std::vector<std::string> overrides;
      for (const VarySpec& s : specs) {
        std::size_t step = rem % static_cast<std::size_t>(s.count);
        rem /= static_cast<std::size_t>(s.count);
        double value = s.count < 2
                           ? s.lo
                           : s.lo + (s.hi - s.lo) * static_cast<double>(step) /
                                 static_cast<double>(s.count - 1);
        row.params.push_back(value);
        overrides.push_back(s.key + "=" + fmt17(value));
      }

      ProblemHandle problem;
      row.status = load_problem(file, overrides, problem);
      if (row.status != IDEPCA_OK) {
        row.error = idepca_last_error();
        continue;
      }
      AnalysisHandle analysis;
      double nan = std::nan("");
      row.status = idepca_check(problem.p, nan, nan, nan, nan, &analysis.a);
      if (row.status != IDEPCA_OK) {
        row.error = idepca_last_error();
        continue;
      }
      TrajectoryHandle traj;
      row.status = idepca_simulate(problem.p, 0.0, h_max, &traj.t);
      if (row.status != IDEPCA_OK) {
        row.error = idepca_last_error();
        continue;
      }
      DetectionHandle detection;
      row.status = idepca_detect(traj.t, nan, &detection.d);
      if (row.status != IDEPCA_OK) {
        row.error = idepca_last_error();
        continue;
      }
      row.criteria = idepca_analysis_certified(analysis.a) ? "CERTIFIED" : "INCONCLUSIVE";
      row.detect = idepca_detection_class_name(detection.d);
    }
  };

  long n_threads = jobs > 0 ? jobs : static_cast<long>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1L, 16L);
  std::vector<std::thread> pool;
  for (long i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  for (const SweepRow& row : rows) {
    if (row.status != IDEPCA_OK) {
      std::cerr << "error: " << row.error << "\n";
      std::exit(exit_code_for(row.status));
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& x, const SweepRow& y) { return x.params < y.params; });

  for (std::size_t i = 0; i < specs.size(); ++i) std::cout << specs[i].key << ",";
  std::cout << "criteria,detect\n";
  for (const SweepRow& row : rows) {
    for (double v : row.params) std::cout << fmt17(v) << ",";
    std::cout << row.criteria << "," << row.detect << "\n";
  }
  std::exit(0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and oscillation analysis of impulsive delay equations "
               "with a piecewise constant argument"};
  app.set_version_flag("--version", idepca_version());
  app.require_subcommand(1);

  std::string file;
  std::string out_path;
  double h_max = kUnset;
  double scan_start = kUnset, scan_end = kUnset, stride = kUnset, margin = kUnset;
  double tol = 1e-6;
  double atol = kUnset;
  int grid = 1000;
  int example_id = 0;
  std::vector<std::string> vary_texts;
  long jobs = 0;

  CLI::App* simulate = app.add_subcommand("simulate", "Integrate and emit the trajectory CSV");
  simulate->add_option("file", file, "problem file")->required();
  simulate->add_option("--h-max", h_max, "maximum integration step (default 1e-3)");
  simulate->add_option("--out", out_path, "write the CSV here instead of stdout");

  CLI::App* check = app.add_subcommand("check", "Evaluate the oscillation criteria");
  check->add_option("file", file, "problem file")->required();
  check->add_option("--scan-start", scan_start, "first window endpoint (default t0 + max(tau, 2))");
  check->add_option("--scan-end", scan_end, "last window endpoint (default start + 50)");
  check->add_option("--stride", stride, "scan grid spacing (default 0.05)");
  check->add_option("--margin", margin, "threshold margin (default 1e-6)");

  CLI::App* transform = app.add_subcommand(
      "transform", "Emit the jump product and rescaled coefficients as CSV");
  transform->add_option("file", file, "problem file")->required();
  transform->add_option("--grid", grid, "number of grid intervals (default 1000)");

  CLI::App* verify = app.add_subcommand(
      "verify-theorem1", "Check the jump-removal identity between both formulations");
  verify->add_option("file", file, "problem file")->required();
  verify->add_option("--tol", tol, "scale-relative tolerance (default 1e-6)");
  verify->add_option("--h-max", h_max, "maximum integration step (default 1e-3)");

  CLI::App* detect = app.add_subcommand("detect", "Simulate and classify sign changes");
  detect->add_option("file", file, "problem file")->required();
  detect->add_option("--h-max", h_max, "maximum integration step (default 1e-3)");
  detect->add_option("--atol", atol, "zero band half-width (default 1e-9 * (1 + max|x|))");

  CLI::App* example = app.add_subcommand("example", "Run a built-in problem end to end");
  example->add_option("id", example_id, "1 or 2")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid concurrently");
  sweep->add_option("file", file, "problem file")->required();
  sweep->add_option("--vary", vary_texts, "key=lo:hi:n (repeatable)")->required();
  sweep->add_option("--h-max", h_max, "maximum integration step (default 1e-3)");
  sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ConversionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 65;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }

  if (app.got_subcommand(simulate)) run_simulate(file, h_max, out_path);
  if (app.got_subcommand(check)) run_check(file, scan_start, scan_end, stride, margin);
  if (app.got_subcommand(transform)) run_transform(file, grid);
  if (app.got_subcommand(verify)) run_verify(file, tol, h_max);
  if (app.got_subcommand(detect)) run_detect(file, h_max, atol);
  if (app.got_subcommand(example)) run_example(example_id);
  if (app.got_subcommand(sweep)) run_sweep(file, vary_texts, h_max, jobs);
  return 64;
}
