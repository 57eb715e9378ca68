// Shared helpers for the test suites.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ebsm/parser.hpp"

namespace ebsm_test {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string models_dir() { return EBSM_MODELS_DIR; }
inline std::string golden_dir() { return EBSM_GOLDEN_DIR; }

inline ebsm::Model load_fixture() {
  auto res = ebsm::parse_model(read_file(models_dir() + "/stop_start.ebsm"));
  if (!res.ok()) {
    std::string msg = "fixture does not parse:";
    for (const auto& d : res.diagnostics) msg += "\n  " + ebsm::render_diagnostic(d);
    throw std::runtime_error(msg);
  }
  return *res.model;
}

inline ebsm::Model parse_or_throw(const std::string& src) {
  auto res = ebsm::parse_model(src);
  if (!res.ok()) {
    std::string msg = "model does not parse:";
    for (const auto& d : res.diagnostics) msg += "\n  " + ebsm::render_diagnostic(d);
    throw std::runtime_error(msg);
  }
  return *res.model;
}

}  // namespace ebsm_test
