// Deterministic seeded execution of a translated ProgramIR under the
// write-read-process protocol: per cycle, evaluate every procedure (one
// random draw each), then sends, then reads, then console output.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebsm/codegen.hpp"
#include "ebsm/ir.hpp"
#include "ebsm/prng.hpp"
#include "ebsm/semantics.hpp"

namespace ebsm {

struct SimConfig {
  std::uint64_t seed = 1;
  int cycles = 100;
  GuidanceConfig guidance;  // also supplies the draw range bound n
};

struct CycleRecord {
  int cycle = 0;
  // per machine: transition fired this cycle, absent entry value on skip
  std::map<std::string, std::optional<std::string>> fired;
  Env snapshot;  // post-cycle
  std::vector<std::string> outputs;
  std::vector<std::string> event_log;  // "eval M" / "send E" / "read E"
};

struct SimTrace {
  std::vector<CycleRecord> cycles;
};

struct CoverageReport {
  std::vector<std::pair<std::string, std::uint64_t>> counts;  // decl order
  std::vector<std::string> covered;
  std::vector<std::string> uncovered;
  std::uint64_t total_fired = 0;
  double ratio = 0.0;
};

namespace sim_detail {

inline Scope ir_scope(const ProgramIR& p) {
  Scope s;
  for (const auto& v : p.variables) s.types[v.name] = v.type;
  for (const auto& sm : p.machines)
    s.types[sm.state_var()] = SemType::enumeration(sm.states);
  return s;
}

inline Env ir_initial_env(const ProgramIR& p) {
  Env env;
  for (const auto& v : p.variables) env[v.name] = v.init;
  for (const auto& sm : p.machines) env[sm.state_var()] = EnumLit{sm.initial};
  return env;
}

inline bool gate_open(const Gate& g, std::int64_t r) {
  return g.mode == GateMode::Exact ? r == g.q : r <= g.q;
}

inline void apply_parallel(const std::vector<Assign>& body, Env& env,
                           const Scope& scope, const std::string& ctx) {
  std::vector<std::pair<std::string, Value>> updates;
  updates.reserve(body.size());
  for (const auto& a : body) updates.emplace_back(a.lhs, eval_expr(a.rhs, env));
  for (auto& [lhs, v] : updates) {
    if (const SemType* t = scope.find(lhs); t && !t->contains(v))
      throw DomainViolation("assignment to " + lhs + " leaves its domain (" + ctx + ")");
    env[lhs] = std::move(v);
  }
}

}  // namespace sim_detail

/// One evaluation of a translated procedure with a forced random draw r.
/// Fires the first branch of the current state's arm whose condition holds
/// and whose gate (if any) is open; otherwise the null branch.
inline std::optional<std::string> eval_procedure(const ProcedureIR& proc, Env& env,
                                                 const Scope& scope, std::int64_t r) {
  const std::string& current = std::get<EnumLit>(env.at(proc.state_var)).name;
  for (const auto& arm : proc.arms) {
    if (arm.state != current) continue;
    for (const auto& b : arm.branches) {
      if (!std::get<bool>(eval_expr(b.condition, env))) continue;
      if (b.gate && !sim_detail::gate_open(*b.gate, r)) continue;
      sim_detail::apply_parallel(b.body, env, scope, b.transition_key);
      return b.comment;  // transition name
    }
    return std::nullopt;  // else null;
  }
  return std::nullopt;
}

/// One full cycle over the IR with explicit per-procedure draws (r_values
/// aligned with p.procedures). Exposed for the translation-soundness oracle.
inline CycleRecord run_cycle(const ProgramIR& p, Env& env, const Scope& scope,
                             const std::vector<std::int64_t>& r_values) {
  CycleRecord rec;
  for (size_t i = 0; i < p.procedures.size(); ++i) {
    const auto& proc = p.procedures[i];
    rec.event_log.push_back("eval " + proc.machine);
    rec.fired[proc.machine] = eval_procedure(proc, env, scope, r_values[i]);
  }
  for (const auto& e : p.send_events) {
    rec.event_log.push_back("send " + e.name);
    if (event_enabled(e, env)) env = apply_event(e, env, scope);
  }
  for (const auto& e : p.read_events) {
    rec.event_log.push_back("read " + e.name);
    if (event_enabled(e, env)) env = apply_event(e, env, scope);
  }
  for (const auto& o : p.outputs) {
    std::string line = o.label;
    if (line.size() < 18) line.resize(18, ' ');
    for (size_t i = 0; i < o.vars.size(); ++i)
      line += (i ? " " : "") + render_value(env.at(o.vars[i]));
    rec.outputs.push_back(line);
  }
  rec.snapshot = env;
  return rec;
}

/// Seeded run: init phase once (initializers plus initial sends), then
/// `cycles` iterations. One draw per procedure per cycle, in declaration
/// order, whether or not the procedure has gated branches.
inline std::pair<SimTrace, CoverageReport> run_simulation(const ProgramIR& p,
                                                          const SimConfig& cfg) {
  Scope scope = sim_detail::ir_scope(p);
  Env env = sim_detail::ir_initial_env(p);
  for (const auto& e : p.init_events)
    if (event_enabled(e, env)) env = apply_event(e, env, scope);

  Prng prng(cfg.seed);
  SimTrace trace;
  std::map<std::string, std::uint64_t> counts;
  for (int c = 0; c < cfg.cycles; ++c) {
    std::vector<std::int64_t> rs;
    rs.reserve(p.procedures.size());
    for (size_t i = 0; i < p.procedures.size(); ++i)
      rs.push_back(prng.draw_in_range(cfg.guidance.n));
    CycleRecord rec;
    try {
      rec = run_cycle(p, env, scope, rs);
    } catch (const DomainViolation& e) {
      throw DomainViolation("cycle " + std::to_string(c) + ": " + e.what());
    }
    rec.cycle = c;
    for (const auto& [machine, fired] : rec.fired)
      if (fired) ++counts[machine + "." + *fired];
    trace.cycles.push_back(std::move(rec));
  }

  CoverageReport cov;
  for (const auto& sm : p.machines) {
    for (const auto& t : sm.transitions) {
      std::string key = sm.name + "." + t.name;
      std::uint64_t n = counts.count(key) ? counts[key] : 0;
      cov.counts.emplace_back(key, n);
      (n ? cov.covered : cov.uncovered).push_back(key);
      cov.total_fired += n;
    }
  }
  cov.ratio = cov.counts.empty()
                  ? 0.0
                  : static_cast<double>(cov.covered.size()) / cov.counts.size();
  return {std::move(trace), std::move(cov)};
}

/// Recount coverage from a stored trace against the model's transition list.
inline CoverageReport coverage_report(const SimTrace& t, const Model& m) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& rec : t.cycles)
    for (const auto& [machine, fired] : rec.fired)
      if (fired) ++counts[machine + "." + *fired];
  CoverageReport cov;
  for (const auto& sm : m.statemachines) {
    for (const auto& tr : sm.transitions) {
      std::string key = sm.name + "." + tr.name;
      std::uint64_t n = counts.count(key) ? counts[key] : 0;
      cov.counts.emplace_back(key, n);
      (n ? cov.covered : cov.uncovered).push_back(key);
      cov.total_fired += n;
    }
  }
  cov.ratio = cov.counts.empty()
                  ? 0.0
                  : static_cast<double>(cov.covered.size()) / cov.counts.size();
  return cov;
}

// ---------------------------------------------------------------------------
// Serialization.

inline std::string render_trace_text(const SimTrace& t) {
  std::string s;
  for (const auto& rec : t.cycles)
    for (const auto& line : rec.outputs) s += line + "\n";
  return s;
}

namespace sim_detail {
inline nlohmann::json value_json(const Value& v) {
  if (is_bool(v)) return std::get<bool>(v);
  if (is_int(v)) return std::get<std::int64_t>(v);
  return std::get<EnumLit>(v).name;
}
}  // namespace sim_detail

inline std::string render_trace_json(const SimTrace& t) {
  nlohmann::ordered_json doc;
  doc["cycles"] = nlohmann::ordered_json::array();
  for (const auto& rec : t.cycles) {
    nlohmann::ordered_json c;
    c["cycle"] = rec.cycle;
    nlohmann::ordered_json fired = nlohmann::ordered_json::object();
    for (const auto& [m, f] : rec.fired)
      fired[m] = f ? nlohmann::ordered_json(*f) : nlohmann::ordered_json(nullptr);
    c["fired"] = std::move(fired);
    nlohmann::ordered_json snap = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rec.snapshot) snap[k] = sim_detail::value_json(v);
    c["snapshot"] = std::move(snap);
    c["outputs"] = rec.outputs;
    doc["cycles"].push_back(std::move(c));
  }
  return doc.dump(2) + "\n";
}

inline SimTrace parse_trace_json(const std::string& src) {
  auto doc = nlohmann::json::parse(src);
  SimTrace t;
  for (const auto& c : doc.at("cycles")) {
    CycleRecord rec;
    rec.cycle = c.at("cycle").get<int>();
    for (auto it = c.at("fired").begin(); it != c.at("fired").end(); ++it)
      rec.fired[it.key()] = it.value().is_null()
                                ? std::optional<std::string>{}
                                : std::optional<std::string>{it.value().get<std::string>()};
    for (auto it = c.at("snapshot").begin(); it != c.at("snapshot").end(); ++it) {
      const auto& v = it.value();
      if (v.is_boolean()) rec.snapshot[it.key()] = v.get<bool>();
      else if (v.is_number_integer()) rec.snapshot[it.key()] = v.get<std::int64_t>();
      else rec.snapshot[it.key()] = EnumLit{v.get<std::string>()};
    }
    rec.outputs = c.at("outputs").get<std::vector<std::string>>();
    t.cycles.push_back(std::move(rec));
  }
  return t;
}

inline std::string render_coverage_json(const CoverageReport& cov) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [k, n] : cov.counts) counts[k] = n;
  doc["counts"] = std::move(counts);
  doc["covered"] = cov.covered;
  doc["uncovered"] = cov.uncovered;
  doc["total_fired"] = cov.total_fired;
  doc["ratio"] = cov.ratio;
  return doc.dump(2) + "\n";
}

inline std::string render_coverage_text(const CoverageReport& cov) {
  std::string s = "transition coverage\n";
  for (const auto& [k, n] : cov.counts)
    s += "  " + k + ": " + std::to_string(n) + "\n";
  s += "covered " + std::to_string(cov.covered.size()) + "/" +
       std::to_string(cov.counts.size()) + " (ratio " + std::to_string(cov.ratio) +
       ")\n";
  return s;
}

}  // namespace ebsm
