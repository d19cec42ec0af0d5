#pragma once

// Shared tokenizer for the line-oriented text formats (instances, suite
// configs, traces). Not installed.

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "marrt/grid_world.hpp"

namespace marrt::detail {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

/// Splits each non-empty, non-comment line into whitespace-separated tokens.
/// `#` starts a comment that runs to end of line.
inline std::vector<Line> tokenize_lines(std::istream &in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::istringstream ss(raw);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(std::move(tok));
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline long long parse_integer(const Line &line, const std::string &tok) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw ParseError(line.number, "expected integer, got '" + tok + "'");
  }
}

inline unsigned long long parse_unsigned(const Line &line, const std::string &tok) {
  try {
    std::size_t used = 0;
    if (!tok.empty() && tok[0] == '-') throw std::invalid_argument(tok);
    unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw ParseError(line.number, "expected unsigned integer, got '" + tok + "'");
  }
}

inline double parse_real(const Line &line, const std::string &tok) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw ParseError(line.number, "expected number, got '" + tok + "'");
  }
}

inline void expect_arity(const Line &line, std::size_t n) {
  if (line.tokens.size() != n)
    throw ParseError(line.number, "'" + line.tokens.front() + "' expects " +
                                      std::to_string(n - 1) + " value(s)");
}

} // namespace marrt::detail
