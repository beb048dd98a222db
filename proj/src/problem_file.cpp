#include "idepca/problem_file.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace idepca {

namespace {

std::string trim(std::string_view s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return std::string(s.substr(lo, hi - lo));
}

constexpr std::array<std::string_view, 9> kKnownKeys = {
    "a", "b", "c", "phi", "tau", "t0", "horizon", "impulse.times", "impulse.coeff"};

bool known_key(const std::string& key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

struct Entry {
  std::string value;
  int line;
};

using EntryMap = std::map<std::string, Entry>;

void assign(EntryMap& entries, const std::string& key, const std::string& value, int line,
            bool allow_replace) {
  if (key.empty()) throw ProblemFileError("empty key", line);
  if (!known_key(key)) throw ProblemFileError("unknown key '" + key + "'", line);
  if (!allow_replace && entries.count(key)) {
    throw ProblemFileError("duplicate key '" + key + "'", line);
  }
  entries[key] = Entry{value, line};
}

Expr parse_value(const Entry& entry, const std::string& key, std::string_view variable) {
  try {
    return Expr::parse(entry.value, variable);
  } catch (const ParseError& e) {
    throw ProblemFileError("key '" + key + "': " + e.what(), entry.line);
  }
}

double constant_value(const Entry& entry, const std::string& key) {
  Expr e = parse_value(entry, key, "t");
  if (!e.is_constant()) {
    throw ProblemFileError("key '" + key + "' must be a constant", entry.line);
  }
  try {
    return e.eval(0.0);
  } catch (const EvalError& err) {
    throw ProblemFileError("key '" + key + "': " + err.what(), entry.line);
  }
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(trim(s.substr(pos)));
      return parts;
    }
    parts.push_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
}

double constant_piece(const std::string& text, const std::string& key, int line) {
  return constant_value(Entry{text, line}, key);
}

ImpulseSchedule build_schedule(const EntryMap& entries) {
  auto times_it = entries.find("impulse.times");
  auto coeff_it = entries.find("impulse.coeff");
  if ((times_it == entries.end()) != (coeff_it == entries.end())) {
    int line = times_it != entries.end() ? times_it->second.line : coeff_it->second.line;
    throw ProblemFileError("impulse.times and impulse.coeff must be given together", line);
  }
  if (times_it == entries.end()) return ImpulseSchedule::none();

  Expr coeff = parse_value(coeff_it->second, "impulse.coeff", "i");
  const Entry& times = times_it->second;
  std::string text = times.value;
  try {
    if (text == "integers") return ImpulseSchedule::integers(std::move(coeff));
    if (text.rfind("arithmetic:", 0) == 0) {
      auto parts = split(std::string_view(text).substr(11), ',');
      if (parts.size() != 2) {
        throw ProblemFileError("impulse.times arithmetic form needs exactly <first>,<step>",
                               times.line);
      }
      double first = constant_piece(parts[0], "impulse.times", times.line);
      double step = constant_piece(parts[1], "impulse.times", times.line);
      return ImpulseSchedule::arithmetic(first, step, std::move(coeff));
    }
    if (text.rfind("list:", 0) == 0) {
      auto parts = split(std::string_view(text).substr(5), ',');
      std::vector<double> list;
      for (const std::string& p : parts) {
        if (p.empty()) throw ProblemFileError("impulse.times list has an empty entry", times.line);
        list.push_back(constant_piece(p, "impulse.times", times.line));
      }
      return ImpulseSchedule::explicit_times(std::move(list), std::move(coeff));
    }
  } catch (const ModelError& e) {
    // A structurally impossible schedule (nonpositive step, unordered
    // times) is a malformed file, same as a bad expression.
    throw ProblemFileError(std::string("impulse.times: ") + e.what(), times.line);
  }
  throw ProblemFileError(
      "impulse.times must be 'integers', 'arithmetic:<first>,<step>', or "
      "'list:<t1>,<t2>,...'",
      times.line);
}

LoadedProblem build(const EntryMap& entries) {
  for (const char* key : {"a", "tau", "t0", "horizon"}) {
    if (!entries.count(key)) {
      throw ProblemFileError(std::string("missing required key '") + key + "'", 0);
    }
  }
  auto expr_or = [&](const char* key, const char* fallback) {
    auto it = entries.find(key);
    if (it == entries.end()) return Expr::parse(fallback, "t");
    return parse_value(it->second, key, "t");
  };

  LoadedProblem loaded;
  loaded.problem.a = expr_or("a", "0");
  loaded.problem.b = expr_or("b", "0");
  loaded.problem.c = expr_or("c", "0");
  loaded.problem.tau = constant_value(entries.at("tau"), "tau");
  loaded.problem.t0 = constant_value(entries.at("t0"), "t0");
  loaded.problem.schedule = build_schedule(entries);
  loaded.horizon = constant_value(entries.at("horizon"), "horizon");
  loaded.initial.phi = expr_or("phi", "1");
  loaded.initial.domain_start = history_domain(loaded.problem.t0, loaded.problem.tau);
  return loaded;
}

}  // namespace

ProblemFileError::ProblemFileError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

LoadedProblem parse_problem_text(std::string_view text, const std::vector<std::string>& overrides) {
  EntryMap entries;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    ++lineno;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::string_view line = raw.substr(0, std::min(raw.find('#'), raw.size()));
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ProblemFileError("expected key = value", lineno);
    }
    assign(entries, trim(std::string_view(stripped).substr(0, eq)),
           trim(std::string_view(stripped).substr(eq + 1)), lineno, false);
  }

  for (const std::string& o : overrides) {
    std::size_t eq = o.find('=');
    if (eq == std::string::npos) {
      throw ProblemFileError("override '" + o + "' is not of the form key=value", 0);
    }
    assign(entries, trim(std::string_view(o).substr(0, eq)),
           trim(std::string_view(o).substr(eq + 1)), 0, true);
  }
  return build(entries);
}

LoadedProblem load_problem_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return parse_problem_text(buffer.str(), overrides);
}

std::string example_problem_text(int id) {
  if (id == 1) {
    return
        "# Built-in demonstration problem 1:\n"
        "#   x'(t) + pi x(t - 1/2) + x([t-1]) = 0 away from the integers,\n"
        "#   x(n+) = x(n-) / 2 at every positive integer (coefficient -1).\n"
        "a = 0\n"
        "b = pi\n"
        "c = 1\n"
        "phi = 1\n"
        "tau = 0.5\n"
        "t0 = 0.25\n"
        "horizon = 20\n"
        "impulse.times = integers\n"
        "impulse.coeff = -1\n";
  }
  if (id == 2) {
    return
        "# Built-in demonstration problem 2:\n"
        "#   x'(t) + x(t) + pi x(t - 5/2) + exp(t) x([t-1]) = 0 away from the\n"
        "#   integers, x(n+) = x(n-) / (1 + 2^n) at every positive integer.\n"
        "# The horizon is kept short on purpose: the rescaled coefficients\n"
        "# grow like 2^n exp(t), which makes long runs badly conditioned.\n"
        "a = 1\n"
        "b = pi\n"
        "c = exp(t)\n"
        "phi = 1\n"
        "tau = 2.5\n"
        "t0 = 0.5\n"
        "horizon = 6\n"
        "impulse.times = integers\n"
        "impulse.coeff = -2^i\n";
  }
  throw ModelError("no built-in problem with id " + std::to_string(id));
}

}  // namespace idepca
