#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "idepca/problem.hpp"

namespace idepca {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed problem-file text. line is 1-based; 0 means the file as a whole
// (a missing required key, for example).
class ProblemFileError : public std::runtime_error {
 public:
  ProblemFileError(const std::string& message, int line);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct LoadedProblem {
  Problem problem;
  InitialData initial;
  double horizon = 0.0;
};

// Parses key = value text ('#' starts a comment anywhere on a line).
// Recognized keys: a, b, c, phi (expressions in t), tau, t0, horizon
// (constant expressions), impulse.times, impulse.coeff (expression in i).
// Required: a, tau, t0, horizon. Defaults: b = 0, c = 0, phi = 1. The two
// impulse.* keys must appear together or not at all. Overrides are extra
// "key=value" assignments applied on top of the parsed text.
LoadedProblem parse_problem_text(std::string_view text,
                                 const std::vector<std::string>& overrides = {});

LoadedProblem load_problem_file(const std::string& path,
                                const std::vector<std::string>& overrides = {});

// Text of the built-in demonstration problems (id 1 or 2); throws ModelError
// for any other id.
std::string example_problem_text(int id);

}  // namespace idepca
