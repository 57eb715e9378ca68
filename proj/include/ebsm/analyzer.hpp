// Static checks over a parsed Model: partition well-formedness, guard
// disjointness/completeness by finite-domain enumeration, and guidance
// consistency.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ebsm/diagnostics.hpp"
#include "ebsm/model.hpp"
#include "ebsm/semantics.hpp"

namespace ebsm {

inline constexpr std::uint64_t kDefaultDomainBound = 10'000'000;
inline constexpr int kDefaultWitnessLimit = 3;

struct GuardReport {
  std::string machine;
  std::string state;
  bool disjoint = true;
  bool complete = true;
  // Witness environments for each failed property. Disjointness witnesses
  // satisfy two outgoing guards at once; completeness witnesses satisfy none.
  std::vector<Env> disjoint_witnesses;
  std::vector<Env> completeness_witnesses;
  // Set when the domain product exceeded the bound; no verdict then.
  std::optional<std::uint64_t> domain_too_large;
};

// Finite cartesian product of the domains of the variables read by the
// guards under analysis.
struct DomainSpace {
  std::vector<std::pair<std::string, SemType>> vars;

  std::uint64_t size() const {
    std::uint64_t n = 1;
    for (const auto& [_, t] : vars) n *= t.cardinality();
    return n;
  }

  Env point(std::uint64_t index) const {
    Env env;
    for (const auto& [name, t] : vars) {
      std::uint64_t card = t.cardinality();
      env[name] = t.nth(index % card);
      index /= card;
    }
    return env;
  }
};

inline std::vector<Diagnostic> check_partition(const Model& m) {
  std::vector<Diagnostic> diags;
  for (const auto& sm : m.statemachines) {
    std::set<std::string> seen;
    for (const auto& s : sm.states)
      if (!seen.insert(s).second)
        diags.push_back(Diagnostic::error(1, 1, "duplicate-state",
                                          "machine '" + sm.name +
                                              "' declares state '" + s + "' twice"));
    if (!seen.count(sm.initial))
      diags.push_back(Diagnostic::error(1, 1, "missing-initial",
                                        "machine '" + sm.name + "' initial state '" +
                                            sm.initial + "' is not declared"));
    // reachability from initial over declared transitions
    std::set<std::string> reached{sm.initial};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& t : sm.transitions)
        if (reached.count(t.source) && reached.insert(t.target).second) grew = true;
    }
    for (const auto& s : sm.states)
      if (!reached.count(s))
        diags.push_back(Diagnostic::warning(1, 1, "unreachable-state",
                                            "state '" + s + "' of machine '" + sm.name +
                                                "' is unreachable from '" + sm.initial + "'"));
  }
  return diags;
}

namespace analyzer_detail {

// Variables read by the user guards of the state's outgoing transitions,
// minus constants (fixed) and the state variable (pinned by the case arm).
inline DomainSpace guard_domain(const Model& m, const StateMachine& sm,
                                const std::string& state) {
  std::vector<std::string> names;
  for (const auto* t : sm.outgoing(state))
    if (t->user_guard) free_vars(t->user_guard, names);
  DomainSpace space;
  Scope scope = m.scope();
  for (const auto& n : names) {
    if (n == sm.state_var()) continue;
    if (const VarDecl* vd = m.find_var(n); vd && vd->is_const) continue;
    if (const SemType* t = scope.find(n)) space.vars.emplace_back(n, *t);
  }
  return space;
}

// Fixed part of every enumerated environment: constants at their declared
// values plus the analyzed machine pinned to `state`.
inline Env fixed_env(const Model& m, const StateMachine& sm, const std::string& state) {
  Env env;
  for (const auto& v : m.variables)
    if (v.is_const) env[v.name] = v.init;
  env[sm.state_var()] = EnumLit{state};
  return env;
}

}  // namespace analyzer_detail

/// Brute-force disjointness/completeness of one state's outgoing guards over
/// the finite domain of the variables they read. The implicit skip branch
/// does not count toward completeness.
inline GuardReport check_disjoint_complete(const Model& m, const std::string& machine,
                                           const std::string& state,
                                           std::uint64_t bound = kDefaultDomainBound,
                                           int witness_limit = kDefaultWitnessLimit) {
  GuardReport rep;
  rep.machine = machine;
  rep.state = state;
  const StateMachine* sm = m.find_machine(machine);
  if (!sm) return rep;

  auto outgoing = sm->outgoing(state);
  DomainSpace space = analyzer_detail::guard_domain(m, *sm, state);
  if (space.size() > bound) {
    rep.domain_too_large = space.size();
    return rep;
  }
  Env fixed = analyzer_detail::fixed_env(m, *sm, state);
  if (outgoing.empty()) {
    rep.complete = false;
    if (witness_limit > 0) rep.completeness_witnesses.push_back(fixed);
    return rep;
  }

  std::uint64_t n = space.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    Env env = space.point(i);
    env.insert(fixed.begin(), fixed.end());
    int enabled = 0;
    for (const auto* t : outgoing) {
      bool g = !t->user_guard || std::get<bool>(eval_expr(t->user_guard, env));
      if (g) ++enabled;
    }
    if (enabled >= 2) {
      rep.disjoint = false;
      if ((int)rep.disjoint_witnesses.size() < witness_limit)
        rep.disjoint_witnesses.push_back(env);
    }
    if (enabled == 0) {
      rep.complete = false;
      if ((int)rep.completeness_witnesses.size() < witness_limit)
        rep.completeness_witnesses.push_back(env);
    }
  }
  return rep;
}

/// Guidance consistency against the model: gated transitions exist, q <= n,
/// and exact-mode q values are unique among each state's outgoing gates.
inline std::vector<Diagnostic> check_guidance(const Model& m, const GuidanceConfig& g) {
  std::vector<Diagnostic> diags;
  for (const auto& [key, gate] : g.gates) {
    auto dot = key.find('.');
    std::string machine = key.substr(0, dot);
    std::string transition = key.substr(dot + 1);
    if (!m.find_transition(machine, transition))
      diags.push_back(Diagnostic::warning(1, 1, "unknown-transition",
                                          "gate on unknown transition '" + key + "'"));
    if (gate.q > g.n)
      diags.push_back(Diagnostic::error(1, 1, "q-out-of-range",
                                        "gate '" + key + "' has q > n"));
  }
  // exact q values must be distinct within each case-statement branch set
  for (const auto& sm : m.statemachines) {
    for (const auto& state : sm.states) {
      std::map<std::int64_t, std::string> seen;
      for (const auto* t : sm.outgoing(state)) {
        auto gate = g.gate_for(sm.name + "." + t->name);
        if (!gate || gate->mode != GateMode::Exact) continue;
        auto [it, inserted] = seen.emplace(gate->q, t->name);
        if (!inserted)
          diags.push_back(Diagnostic::error(
              1, 1, "duplicate-q",
              "transitions '" + it->second + "' and '" + t->name + "' out of " +
                  sm.name + "." + state + " share exact q=" + std::to_string(gate->q)));
      }
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Whole-model report: partition checks plus a GuardReport per (machine, state).
// Controller guard failures are errors (their outgoing transitions are
// expected disjoint and complete); environment machines get warnings.

struct AnalysisReport {
  std::vector<Diagnostic> diagnostics;
  std::vector<GuardReport> guard_reports;
};

inline AnalysisReport analyze_model(const Model& m,
                                    std::uint64_t bound = kDefaultDomainBound) {
  AnalysisReport rep;
  rep.diagnostics = check_partition(m);
  for (const auto& sm : m.statemachines) {
    bool controller = sm.kind == MachineKind::Controller;
    for (const auto& state : sm.states) {
      GuardReport gr = check_disjoint_complete(m, sm.name, state, bound);
      auto where = sm.name + "." + state;
      if (gr.domain_too_large) {
        rep.diagnostics.push_back(Diagnostic::warning(
            1, 1, "domain-too-large",
            "guard domain of " + where + " has " +
                std::to_string(*gr.domain_too_large) + " points; not enumerated"));
      } else {
        auto report = [&](const std::string& code, const std::string& what) {
          auto msg = "outgoing guards of " + where + " are not " + what;
          rep.diagnostics.push_back(controller
                                        ? Diagnostic::error(1, 1, code, msg)
                                        : Diagnostic::warning(1, 1, code, msg));
        };
        if (!gr.disjoint) report("guards-not-disjoint", "disjoint");
        if (!gr.complete) report("guards-not-complete", "complete");
      }
      rep.guard_reports.push_back(std::move(gr));
    }
  }
  return rep;
}

inline std::string render_guard_report(const GuardReport& r) {
  std::string s = r.machine + "." + r.state + ": ";
  if (r.domain_too_large)
    return s + "domain too large (" + std::to_string(*r.domain_too_large) + " points)";
  s += std::string("disjoint=") + (r.disjoint ? "yes" : "no");
  s += std::string(" complete=") + (r.complete ? "yes" : "no");
  auto witnesses = [](const std::vector<Env>& ws) {
    std::string t;
    for (const auto& w : ws) {
      t += "\n    witness:";
      for (const auto& [k, v] : w) t += " " + k + "=" + render_value(v);
    }
    return t;
  };
  if (!r.disjoint_witnesses.empty())
    s += "\n  overlapping guards at:" + witnesses(r.disjoint_witnesses);
  if (!r.completeness_witnesses.empty())
    s += "\n  no guard holds at:" + witnesses(r.completeness_witnesses);
  return s;
}

}  // namespace ebsm
