// Guidance config parsing: { "n": int, "transitions": { "SM.t": {...} } }.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebsm/diagnostics.hpp"
#include "ebsm/model.hpp"

namespace ebsm {

struct GuidanceParseResult {
  std::optional<GuidanceConfig> config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return config.has_value(); }
};

namespace guidance_detail {

inline std::pair<int, int> line_col_of(const std::string& src, size_t byte_pos) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte_pos && i < src.size(); ++i) {
    if (src[i] == '\n') { ++line; col = 1; }
    else ++col;
  }
  return {line, col};
}

}  // namespace guidance_detail

inline GuidanceParseResult parse_guidance(const std::string& src) {
  using nlohmann::json;
  GuidanceParseResult res;
  auto& diags = res.diagnostics;

  // Duplicate-key detection: nlohmann's DOM silently keeps the last value,
  // so track keys per open object via the parse callback.
  std::vector<std::set<std::string>> key_stack;
  std::vector<std::string> dup_keys;
  json::parser_callback_t cb = [&](int /*depth*/, json::parse_event_t event,
                                   json& parsed) {
    if (event == json::parse_event_t::object_start) key_stack.emplace_back();
    else if (event == json::parse_event_t::object_end) key_stack.pop_back();
    else if (event == json::parse_event_t::key && !key_stack.empty()) {
      std::string k = parsed.get<std::string>();
      if (!key_stack.back().insert(k).second) dup_keys.push_back(k);
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(src, cb);
  } catch (const json::parse_error& e) {
    auto [line, col] = guidance_detail::line_col_of(src, e.byte ? e.byte - 1 : 0);
    diags.push_back(Diagnostic::error(line, col, "syntax", e.what()));
    return res;
  }
  for (const auto& k : dup_keys)
    diags.push_back(Diagnostic::error(1, 1, "duplicate-key",
                                      "duplicate key '" + k + "' in guidance file"));

  GuidanceConfig cfg;
  if (!doc.is_object()) {
    diags.push_back(Diagnostic::error(1, 1, "syntax", "guidance must be an object"));
    return res;
  }
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer() || doc["n"].get<std::int64_t>() < 1)
      diags.push_back(Diagnostic::error(1, 1, "bad-n", "'n' must be an integer >= 1"));
    else
      cfg.n = doc["n"].get<std::int64_t>();
  }
  if (doc.contains("transitions")) {
    const auto& ts = doc["transitions"];
    if (!ts.is_object()) {
      diags.push_back(Diagnostic::error(1, 1, "syntax", "'transitions' must be an object"));
    } else {
      for (auto it = ts.begin(); it != ts.end(); ++it) {
        const std::string& key = it.key();
        if (key.find('.') == std::string::npos) {
          diags.push_back(Diagnostic::warning(
              1, 1, "unknown-transition",
              "transition key '" + key + "' is not of the form '<Machine>.<transition>'; "
              "entry ignored"));
          continue;
        }
        const auto& entry = it.value();
        Gate g;
        std::string mode = entry.value("mode", "");
        if (mode == "exact") g.mode = GateMode::Exact;
        else if (mode == "threshold") g.mode = GateMode::Threshold;
        else {
          diags.push_back(Diagnostic::error(1, 1, "bad-mode",
                                            "gate '" + key +
                                                "' needs mode 'exact' or 'threshold'"));
          continue;
        }
        if (!entry.contains("q") || !entry["q"].is_number_integer()) {
          diags.push_back(Diagnostic::error(1, 1, "bad-q",
                                            "gate '" + key + "' needs an integer 'q'"));
          continue;
        }
        g.q = entry["q"].get<std::int64_t>();
        if (g.q < 0 || g.q > cfg.n) {
          diags.push_back(Diagnostic::error(1, 1, "q-out-of-range",
                                            "gate '" + key + "' has q outside 0.." +
                                                std::to_string(cfg.n)));
          continue;
        }
        cfg.gates[key] = g;
      }
    }
  }
  if (!has_errors(diags)) res.config = std::move(cfg);
  return res;
}

}  // namespace ebsm
