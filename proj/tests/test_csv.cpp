#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "idepca/csv.hpp"
#include "idepca/transform.hpp"

using namespace idepca;

namespace {

Problem make_problem(const char* a, const char* b, const char* c, double tau, double t0,
                     ImpulseSchedule schedule = ImpulseSchedule::none()) {
  Problem p;
  p.a = Expr::parse(a, "t");
  p.b = Expr::parse(b, "t");
  p.c = Expr::parse(c, "t");
  p.tau = tau;
  p.t0 = t0;
  p.schedule = std::move(schedule);
  return p;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

double parse_field(const std::string& field) {
  char* end = nullptr;
  double value = std::strtod(field.c_str(), &end);
  REQUIRE(end == field.c_str() + field.size());
  return value;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("format_double survives a parse round trip") {
  for (double x : {0.1, 1.0 / 3.0, M_PI, 1e-300, -2.5e17, 6.02e23, 0.0, -7.25}) {
    std::string s = format_double(x);
    CAPTURE(s);
    CHECK(parse_field(s) == x);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("trajectory rows round-trip and jumps appear as a -/+ pair") {
  Problem p = make_problem("0", "1", "0", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 3.25, SolveOptions{0.05, 2});

  std::vector<std::string> lines = lines_of(trajectory_csv(traj));
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "t,x,side");
  CHECK(lines.size() == 2 + traj.segments().size() + traj.jumps().size());

  double previous_t = traj.start();
  std::size_t jump_rows = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::vector<std::string> fields = split_fields(lines[k]);
    REQUIRE(fields.size() == 3);
    double t = parse_field(fields[0]);
    double x = parse_field(fields[1]);
    CHECK(t >= previous_t);
    previous_t = t;
    if (fields[2] == "-") {
      ++jump_rows;
      CHECK(x == traj.value(t, Side::Left));
    } else if (fields[2] == "+") {
      CHECK(x == traj.value(t, Side::Right));
    } else {
      CHECK(fields[2] == ".");
      CHECK(x == traj.value(t));
    }
  }
  CHECK(jump_rows == traj.jumps().size());
  CHECK(jump_rows == 3);  // impulses at 1, 2, 3
}

TEST_CASE("criteria rows mirror the analysis series exactly") {
  Problem p = make_problem("0", "1", "0", 0.5, 0.5);
  ScanOptions scan{2.5, 6.5, 0.5, 1e-6};
  AnalysisResult analysis = check_all(p, scan);
  REQUIRE(!analysis.reports.empty());

  std::vector<std::string> lines = lines_of(criteria_csv(analysis));
  CHECK(lines[0] == "condition,window_t,value");
  std::size_t expected = 1;
  for (const CriterionReport& r : analysis.reports) expected += r.series.size();
  REQUIRE(lines.size() == expected);

  std::size_t row = 1;
  for (const CriterionReport& report : analysis.reports) {
    for (const SeriesPoint& point : report.series) {
      std::vector<std::string> fields = split_fields(lines[row++]);
      REQUIRE(fields.size() == 3);
      CHECK(fields[0] == condition_name(report.id));
      CHECK(parse_field(fields[1]) == point.window_t);
      CHECK(parse_field(fields[2]) == point.value);
    }
  }
}

TEST_CASE("transform rows evaluate the product and the rescaled coefficients") {
  Problem p = make_problem("0", "pi", "1", 0.5, 0.25,
                           ImpulseSchedule::integers(Expr::parse("-1", "i")));
  const double horizon = 4.25;
  const int grid = 16;
  std::vector<std::string> lines = lines_of(transform_csv(p, horizon, grid));
  REQUIRE(lines.size() == std::size_t(grid) + 2);
  CHECK(lines[0] == "t,product,B,C");
  for (int i = 0; i <= grid; ++i) {
    std::vector<std::string> fields = split_fields(lines[std::size_t(i) + 1]);
    REQUIRE(fields.size() == 4);
    double t = parse_field(fields[0]);
    CHECK(t == p.t0 + (horizon - p.t0) * double(i) / grid);
    CHECK(parse_field(fields[1]) == jump_product_value(p, p.t0, t));
    CHECK(parse_field(fields[2]) == transformed_b(p, t));
    CHECK(parse_field(fields[3]) == transformed_c(p, t));
  }

  CHECK_THROWS_AS(transform_csv(p, 4.0, 0), ModelError);
  CHECK_THROWS_AS(transform_csv(p, p.t0, 4), ModelError);
}

TEST_CASE("detect rows list the change times") {
  Problem p = make_problem("0", "0", "0", 1.0, 0.5,
                           ImpulseSchedule::integers(Expr::parse("2", "i")));
  InitialData init = make_initial(p, Expr::parse("1", "t"));
  Trajectory traj = integrate(p, init, 8.5, SolveOptions{0.05, 2});
  DetectionResult detection = classify_trajectory(traj);
  REQUIRE(detection.changes.size() == 8);

  std::vector<std::string> lines = lines_of(detect_csv(detection));
  REQUIRE(lines.size() == detection.changes.size() + 1);
  CHECK(lines[0] == "change_t");
  for (std::size_t k = 0; k < detection.changes.size(); ++k) {
    CHECK(parse_field(lines[k + 1]) == detection.changes[k].t);
  }
}

}  // TEST_SUITE "csv"
