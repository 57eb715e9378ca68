#pragma once

#include <string>
#include <vector>

namespace ebsm {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  std::string code;  // short identifier, e.g. "unknown-state"
  std::string message;

  static Diagnostic error(int line, int col, std::string code, std::string msg) {
    return {Severity::Error, line, col, std::move(code), std::move(msg)};
  }
  static Diagnostic warning(int line, int col, std::string code, std::string msg) {
    return {Severity::Warning, line, col, std::move(code), std::move(msg)};
  }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

inline std::string render_diagnostic(const Diagnostic& d) {
  std::string s = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
  s += " [" + d.code + "] line " + std::to_string(d.line) + ":" +
       std::to_string(d.column) + ": " + d.message;
  return s;
}

}  // namespace ebsm
