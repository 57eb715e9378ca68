// Translation of state-machines and the task body to the case/branch program
// form, guidance instrumentation, and Ada source emission.
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "ebsm/ir.hpp"
#include "ebsm/model.hpp"

namespace ebsm {

/// One procedure per state-machine: a case arm per state, one branch per
/// outgoing transition in declaration order, condition = the user guard (the
/// arm already pins the state), trailing null-branch implicit.
inline ProcedureIR translate_statemachine(const StateMachine& sm) {
  ProcedureIR proc;
  proc.name = sm.name + "stateMachine";
  proc.machine = sm.name;
  proc.state_var = sm.state_var();
  for (const auto& state : sm.states) {
    CaseArm arm;
    arm.state = state;
    for (const auto* t : sm.outgoing(state)) {
      BranchIR b;
      b.condition = t->user_guard ? t->user_guard : Expr::literal(Value{true});
      b.body.push_back({sm.state_var(), Expr::literal(Value{EnumLit{t->target}})});
      for (const auto& a : t->user_actions) b.body.push_back(a);
      b.comment = t->name;
      b.transition_key = sm.name + "." + t->name;
      arm.branches.push_back(std::move(b));
    }
    proc.arms.push_back(std::move(arm));
  }
  return proc;
}

/// Whole-program form: globals, procedures in eval order, and the periodic
/// loop phases init; { eval*; sends; reads; outputs }.
inline ProgramIR translate_taskbody(const Model& m) {
  ProgramIR p;
  p.model_name = m.name;
  p.variables = m.variables;
  p.machines = m.statemachines;
  for (const auto& sm_name : m.taskbody.eval_phase)
    p.procedures.push_back(translate_statemachine(*m.find_machine(sm_name)));
  auto events = [&](const std::vector<std::string>& names) {
    std::vector<Event> out;
    for (const auto& n : names) out.push_back(*m.find_event(n));
    return out;
  };
  p.init_events = events(m.taskbody.init_phase);
  p.send_events = events(m.taskbody.send_phase);
  p.read_events = events(m.taskbody.read_phase);
  p.outputs = m.taskbody.outputs;
  return p;
}

/// Attach guidance gates to the translated branches. A gated branch fires
/// only when its condition holds and the per-procedure random draw matches
/// (exact: r = q) or clears (threshold: r <= q) its gate. Empty guidance is
/// the identity.
inline ProgramIR instrument(const ProgramIR& p, const GuidanceConfig& g) {
  if (g.gates.empty()) return p;
  ProgramIR out = p;
  out.instrumented = true;
  out.random_bound = g.n;
  for (auto& proc : out.procedures)
    for (auto& arm : proc.arms)
      for (auto& b : arm.branches) b.gate = g.gate_for(b.transition_key);
  return out;
}

// ---------------------------------------------------------------------------
// Ada emission. Shape and indentation are frozen: case/when/if/elsif/else
// null/end if/end case, 3-space steps, branch conditions doubly
// parenthesized, "-- <transition>" trailing comments.

namespace ada_detail {

inline std::string atom(const ExprPtr& e) {
  if (e->op == Expr::Op::Var) return e->var;
  const Value& v = e->lit;
  if (is_bool(v)) return std::get<bool>(v) ? "true" : "false";
  return render_value(v);
}

inline std::string render(const ExprPtr& e) {
  using Op = Expr::Op;
  static const std::map<Op, std::string> relops = {
      {Op::Eq, "="}, {Op::Ne, "/="}, {Op::Lt, "<"},
      {Op::Le, "<="}, {Op::Gt, ">"}, {Op::Ge, ">="}};
  switch (e->op) {
    case Op::Lit:
    case Op::Var:
      return atom(e);
    case Op::Not:
      return "not (" + render(e->lhs) + ")";
    case Op::And:
    case Op::Or: {
      const char* op = e->op == Op::And ? " and " : " or ";
      auto side = [&](const ExprPtr& s) {
        // mixed and/or needs explicit grouping
        if ((s->op == Op::And || s->op == Op::Or) && s->op != e->op)
          return "(" + render(s) + ")";
        return render(s);
      };
      return side(e->lhs) + op + side(e->rhs);
    }
    default:
      return "(" + atom(e->lhs) + " " + relops.at(e->op) + " " + atom(e->rhs) + ")";
  }
}

// Branch condition as it appears after `if`: the guard in one extra pair of
// parentheses, then the gate conjunct when instrumented.
inline std::string condition_text(const BranchIR& b, const std::string& random_var) {
  std::string s = "(" + render(b.condition) + ")";
  if (b.gate) {
    const char* rel = b.gate->mode == GateMode::Exact ? " = " : " <= ";
    s += " and (" + random_var + rel + std::to_string(b.gate->q) + ")";
  }
  return s;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline void emit_procedure(std::string& out, const ProgramIR& p,
                           const ProcedureIR& proc, int base) {
  auto ind = [&](int level) { return std::string(static_cast<size_t>(base + 3 * level), ' '); };
  out += ind(0) + "procedure " + proc.name + " is\n";
  out += ind(0) + "begin\n";
  if (p.instrumented)
    out += ind(1) + p.random_var() + " := Next_Random (" +
           std::to_string(p.random_bound) + ");\n";
  out += ind(1) + "case " + proc.state_var + " is\n";
  for (const auto& arm : proc.arms) {
    if (arm.branches.empty()) {
      out += ind(2) + "when " + arm.state + " => null;\n";
      continue;
    }
    out += ind(2) + "when " + arm.state + " =>\n";
    for (size_t i = 0; i < arm.branches.size(); ++i) {
      const auto& b = arm.branches[i];
      out += ind(3) + (i == 0 ? "if " : "elsif ") +
             condition_text(b, p.random_var()) + " then\n";
      for (const auto& a : b.body)
        out += ind(4) + a.lhs + " := " + atom(a.rhs) + "; -- " + b.comment + "\n";
    }
    out += ind(3) + "else null;\n";
    out += ind(3) + "end if;\n";
  }
  out += ind(1) + "end case;\n";
  out += ind(0) + "end " + proc.name + ";\n";
}

inline void emit_event(std::string& out, const Event& e, int base) {
  auto ind = [&](int level) { return std::string(static_cast<size_t>(base + 3 * level), ' '); };
  out += ind(0) + "procedure " + e.name + " is\n";
  out += ind(0) + "begin\n";
  bool guarded = !(e.guard->op == Expr::Op::Lit && e.guard->lit == Value{true});
  int body = 1;
  if (guarded) {
    out += ind(1) + "if (" + render(e.guard) + ") then\n";
    body = 2;
  }
  for (const auto& a : e.action)
    out += ind(body) + a.lhs + " := " + render(a.rhs) + ";\n";
  if (guarded) out += ind(1) + "end if;\n";
  out += ind(0) + "end " + e.name + ";\n";
}

}  // namespace ada_detail

struct AdaSources {
  std::string globals_filename;
  std::string globals;
  std::string main_filename;
  std::string main;
};

inline AdaSources emit_ada(const ProgramIR& p) {
  using namespace ada_detail;
  AdaSources out;
  std::string model = p.model_name;
  out.globals_filename = lower(model) + "_globals.ads";
  out.main_filename = lower(model) + "_main.adb";

  // ---- globals package: enum types, constants, initialized variables ----
  std::string& g = out.globals;
  g += "package " + model + "_Globals is\n\n";
  // one enumeration type per state-machine, literals in declared order
  for (const auto& sm : p.machines) {
    g += "   type " + sm.states_type_name() + " is (";
    for (size_t i = 0; i < sm.states.size(); ++i) g += (i ? ", " : "") + sm.states[i];
    g += ");\n";
  }
  // synthesized enum types for declared variables whose literal set matches
  // no machine partition
  std::map<std::string, std::string> enum_type_of;  // joined literal set -> type name
  for (const auto& sm : p.machines) {
    std::string key;
    for (const auto& s : sm.states) key += s + ",";
    enum_type_of.emplace(key, sm.states_type_name());
  }
  for (const auto& v : p.variables) {
    if (v.type.kind != SemType::Kind::Enum) continue;
    std::string key;
    for (const auto& l : v.type.literals) key += l + ",";
    if (enum_type_of.count(key)) continue;
    std::string tname = v.name + "_TYPE";
    enum_type_of.emplace(key, tname);
    g += "   type " + tname + " is (";
    for (size_t i = 0; i < v.type.literals.size(); ++i)
      g += (i ? ", " : "") + v.type.literals[i];
    g += ");\n";
  }
  g += "\n";
  for (const auto& v : p.variables) {
    std::string tname;
    switch (v.type.kind) {
      case SemType::Kind::Bool: tname = "Boolean"; break;
      case SemType::Kind::Int: tname = "Integer"; break;
      case SemType::Kind::Enum: {
        std::string key;
        for (const auto& l : v.type.literals) key += l + ",";
        tname = enum_type_of.at(key);
        break;
      }
    }
    g += "   " + v.name + " : " + (v.is_const ? "constant " : "") + tname + " := " +
         (is_bool(v.init) ? (std::get<bool>(v.init) ? "true" : "false")
                          : render_value(v.init)) +
         ";\n";
  }
  for (const auto& sm : p.machines)
    g += "   " + sm.state_var() + " : " + sm.states_type_name() + " := " + sm.initial +
         ";\n";
  if (p.instrumented) {
    g += "\n   " + p.random_var() + " : Integer := 0;\n";
    g += "   function Next_Random (N : Integer) return Integer;\n";
  }
  g += "\nend " + model + "_Globals;\n";

  // ---- main: procedures plus the periodic phase loop ----
  std::string& s = out.main;
  s += "with " + model + "_Globals; use " + model + "_Globals;\n";
  s += "with Ada.Text_IO; use Ada.Text_IO;\n\n";
  s += "procedure " + model + "_Main is\n\n";
  for (const auto& proc : p.procedures) {
    emit_procedure(s, p, proc, 3);
    s += "\n";
  }
  for (const auto* evs : {&p.send_events, &p.read_events}) {
    for (const auto& e : *evs) {
      emit_event(s, e, 3);
      s += "\n";
    }
  }
  s += "begin\n";
  for (const auto& e : p.init_events) s += "   " + e.name + ";\n";
  s += "   loop\n";
  for (const auto& proc : p.procedures) s += "      " + proc.name + ";\n";
  for (const auto& e : p.send_events) s += "      " + e.name + ";\n";
  for (const auto& e : p.read_events) s += "      " + e.name + ";\n";
  for (const auto& o : p.outputs) {
    std::string label = o.label;
    if (label.size() < 18) label.resize(18, ' ');
    s += "      Put_Line (\"" + label + "\"";
    for (const auto& v : o.vars) s += " & " + v + "'Image";
    s += ");\n";
  }
  s += "   end loop;\n";
  s += "end " + model + "_Main;\n";
  return out;
}

}  // namespace ebsm
