#pragma once

// Independent reader for the CPLEX-LP subset the exporter emits, plus a row
// evaluator for checking candidate solutions against a parsed model.

#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tf_test {

struct LpRow {
  std::string name;
  std::map<std::string, double> coef;
  std::string sense;
  double rhs = 0.0;
};

struct LpFile {
  std::map<std::string, double> objective;
  std::vector<LpRow> rows;
  std::map<std::string, double> lower;  // absent = 0
  std::map<std::string, double> upper;  // absent = +inf
  std::set<std::string> binaries;
  std::set<std::string> variables;      // every name seen anywhere
  std::size_t longest_line = 0;
};

class LpGrammarError : public std::runtime_error {
 public:
  LpGrammarError(std::size_t line, const std::string& what)
      : std::runtime_error("lp line " + std::to_string(line) + ": " + what) {}
};

namespace lp_detail {

inline bool is_number(const std::string& s) {
  static const std::regex re(R"([0-9]+(\.[0-9]*)?([eE][+-]?[0-9]+)?|inf|infinity)");
  return std::regex_match(s, re);
}

// Names the exporter may use: letters, digits and underscores, not starting
// with a digit or with e/E (which CPLEX may read as an exponent).
inline bool is_name(const std::string& s) {
  static const std::regex re(R"([A-DF-Za-df-z_][A-Za-z0-9_]*)");
  return std::regex_match(s, re);
}

inline double number(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

inline std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// [+|-] [number] name, repeated.
inline std::map<std::string, double> linear(const std::vector<std::string>& toks,
                                            std::size_t line, LpFile& lp) {
  std::map<std::string, double> out;
  std::size_t i = 0;
  bool first = true;
  while (i < toks.size()) {
    double sign = 1.0;
    if (toks[i] == "+" || toks[i] == "-") {
      sign = toks[i] == "-" ? -1.0 : 1.0;
      ++i;
    } else if (!first) {
      throw LpGrammarError(line, "missing operator before '" + toks[i] + "'");
    }
    if (i >= toks.size()) throw LpGrammarError(line, "dangling operator");
    double mag = 1.0;
    if (is_number(toks[i])) {
      mag = number(toks[i]);
      ++i;
    }
    if (i >= toks.size() || !is_name(toks[i])) {
      throw LpGrammarError(line, "expected a variable name");
    }
    if (out.contains(toks[i])) throw LpGrammarError(line, "repeated variable " + toks[i]);
    out[toks[i]] = sign * mag;
    lp.variables.insert(toks[i]);
    ++i;
    first = false;
  }
  return out;
}

}  // namespace lp_detail

inline LpFile parse_lp(const std::string& text) {
  using namespace lp_detail;
  LpFile lp;
  enum class Sec { kHead, kObjective, kRows, kBounds, kBinaries, kEnd };
  Sec sec = Sec::kHead;

  // Logical statements: a line opening with " name:" starts one, a line
  // opening with two spaces continues the previous.
  std::vector<std::pair<std::size_t, std::string>> statements;
  std::istringstream in(text);
  std::string raw;
  std::size_t number_of_line = 0;
  std::set<std::string> row_names;

  auto flush = [&](Sec where) {
    for (const auto& [line, body] : statements) {
      const auto colon = body.find(':');
      if (colon == std::string::npos) throw LpGrammarError(line, "row without a name");
      const std::string name = body.substr(0, colon);
      const auto name_toks = split(name);
      if (name_toks.size() != 1 || !is_name(name_toks[0])) {
        throw LpGrammarError(line, "bad row name '" + name + "'");
      }
      auto toks = split(body.substr(colon + 1));
      if (where == Sec::kObjective) {
        if (name_toks[0] != "obj") throw LpGrammarError(line, "objective must be named obj");
        lp.objective = linear(toks, line, lp);
        continue;
      }
      if (toks.size() < 3) throw LpGrammarError(line, "row too short");
      const std::string rhs = toks.back();
      const std::string sense = toks[toks.size() - 2];
      if (sense != "<=" && sense != ">=" && sense != "=") {
        throw LpGrammarError(line, "bad sense '" + sense + "'");
      }
      if (!is_number(rhs) && !(rhs.size() > 1 && rhs[0] == '-' && is_number(rhs.substr(1)))) {
        throw LpGrammarError(line, "bad right-hand side '" + rhs + "'");
      }
      toks.resize(toks.size() - 2);
      if (toks.empty()) throw LpGrammarError(line, "row without terms");
      if (!row_names.insert(name_toks[0]).second) {
        throw LpGrammarError(line, "duplicate row " + name_toks[0]);
      }
      lp.rows.push_back({name_toks[0], linear(toks, line, lp), sense,
                         rhs[0] == '-' ? -number(rhs.substr(1)) : number(rhs)});
    }
    statements.clear();
  };

  while (std::getline(in, raw)) {
    ++number_of_line;
    lp.longest_line = std::max(lp.longest_line, raw.size());
    if (raw.empty()) continue;
    if (raw[0] == '\\') {
      if (sec != Sec::kHead) throw LpGrammarError(number_of_line, "comment after header");
      continue;
    }
    if (raw[0] != ' ') {
      const Sec before = sec;
      if (raw == "Minimize" || raw == "Maximize") {
        if (sec != Sec::kHead) throw LpGrammarError(number_of_line, "misplaced objective");
        sec = Sec::kObjective;
      } else if (raw == "Subject To") {
        if (sec != Sec::kObjective) throw LpGrammarError(number_of_line, "misplaced Subject To");
        sec = Sec::kRows;
      } else if (raw == "Bounds") {
        if (sec != Sec::kRows) throw LpGrammarError(number_of_line, "misplaced Bounds");
        sec = Sec::kBounds;
      } else if (raw == "Binaries") {
        if (sec != Sec::kRows && sec != Sec::kBounds) {
          throw LpGrammarError(number_of_line, "misplaced Binaries");
        }
        sec = Sec::kBinaries;
      } else if (raw == "End") {
        sec = Sec::kEnd;
      } else {
        throw LpGrammarError(number_of_line, "unknown section '" + raw + "'");
      }
      if (before == Sec::kObjective || before == Sec::kRows) flush(before);
      continue;
    }
    if (sec == Sec::kEnd) throw LpGrammarError(number_of_line, "text after End");
    if (sec == Sec::kObjective || sec == Sec::kRows) {
      if (raw.rfind("  ", 0) == 0) {
        if (statements.empty()) throw LpGrammarError(number_of_line, "orphan continuation");
        statements.back().second += " " + raw;
      } else {
        statements.push_back({number_of_line, raw});
      }
      continue;
    }
    const auto toks = split(raw);
    if (sec == Sec::kBounds) {
      // lo <= name <= hi | name >= lo | name <= hi | name free
      if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=" && is_name(toks[2]) &&
          is_number(toks[0]) && is_number(toks[4])) {
        lp.lower[toks[2]] = number(toks[0]);
        lp.upper[toks[2]] = number(toks[4]);
        lp.variables.insert(toks[2]);
      } else if (toks.size() == 3 && is_name(toks[0]) && is_number(toks[2]) &&
                 (toks[1] == ">=" || toks[1] == "<=")) {
        (toks[1] == ">=" ? lp.lower : lp.upper)[toks[0]] = number(toks[2]);
        lp.variables.insert(toks[0]);
      } else if (toks.size() == 2 && is_name(toks[0]) && toks[1] == "free") {
        lp.lower[toks[0]] = -std::numeric_limits<double>::infinity();
        lp.variables.insert(toks[0]);
      } else {
        throw LpGrammarError(number_of_line, "bad bound");
      }
      continue;
    }
    if (sec == Sec::kBinaries) {
      for (const auto& t : toks) {
        if (!is_name(t)) throw LpGrammarError(number_of_line, "bad binary name " + t);
        if (!lp.binaries.insert(t).second) {
          throw LpGrammarError(number_of_line, "binary listed twice: " + t);
        }
        lp.variables.insert(t);
      }
      continue;
    }
    throw LpGrammarError(number_of_line, "content before the objective");
  }
  if (sec != Sec::kEnd) throw LpGrammarError(number_of_line, "missing End");
  return lp;
}

// Names of rows, bounds or integrality requirements the assignment breaks.
// Unassigned variables are zero.
inline std::vector<std::string> violations(const LpFile& lp,
                                           const std::map<std::string, double>& x,
                                           double tol = 1e-6) {
  auto value = [&](const std::string& v) {
    const auto it = x.find(v);
    return it == x.end() ? 0.0 : it->second;
  };
  std::vector<std::string> out;
  for (const auto& row : lp.rows) {
    double lhs = 0.0;
    for (const auto& [v, c] : row.coef) lhs += c * value(v);
    const double slack = tol * std::max(1.0, std::abs(row.rhs));
    const bool ok = row.sense == "<=" ? lhs <= row.rhs + slack
                    : row.sense == ">=" ? lhs >= row.rhs - slack
                                        : std::abs(lhs - row.rhs) <= slack;
    if (!ok) out.push_back(row.name);
  }
  for (const auto& v : lp.variables) {
    const double val = value(v);
    const auto lo = lp.lower.find(v);
    const auto hi = lp.upper.find(v);
    if (val < (lo == lp.lower.end() ? 0.0 : lo->second) - tol ||
        (hi != lp.upper.end() && val > hi->second + tol)) {
      out.push_back("bound:" + v);
    }
    if (lp.binaries.contains(v) && val != 0.0 && val != 1.0) out.push_back("binary:" + v);
  }
  return out;
}

}  // namespace tf_test
