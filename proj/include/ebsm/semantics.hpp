// Operational semantics: expression evaluation, parallel-assignment events,
// and single-step state-machine evaluation.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "ebsm/model.hpp"

namespace ebsm {

using Env = std::map<std::string, Value>;

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundVariable : EvalError {
  explicit UnboundVariable(const std::string& name)
      : EvalError("unbound variable: " + name) {}
};
struct TypeMismatch : EvalError {
  using EvalError::EvalError;
};
struct GuardFalse : EvalError {
  explicit GuardFalse(const std::string& ev)
      : EvalError("event applied while disabled: " + ev) {}
};
struct DomainViolation : EvalError {
  using EvalError::EvalError;
};

namespace detail {
inline std::int64_t as_int(const Value& v, const char* ctx) {
  if (!is_int(v)) throw TypeMismatch(std::string(ctx) + ": integer operand required");
  return std::get<std::int64_t>(v);
}
inline bool as_bool(const Value& v, const char* ctx) {
  if (!is_bool(v)) throw TypeMismatch(std::string(ctx) + ": boolean operand required");
  return std::get<bool>(v);
}
inline bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) throw TypeMismatch("comparison of unlike types");
  return a == b;
}
}  // namespace detail

inline Value eval_expr(const ExprPtr& e, const Env& env) {
  using Op = Expr::Op;
  switch (e->op) {
    case Op::Lit: return e->lit;
    case Op::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw UnboundVariable(e->var);
      return it->second;
    }
    case Op::Not: return Value{!detail::as_bool(eval_expr(e->lhs, env), "not")};
    case Op::And:
      return Value{detail::as_bool(eval_expr(e->lhs, env), "and") &&
                   detail::as_bool(eval_expr(e->rhs, env), "and")};
    case Op::Or:
      return Value{detail::as_bool(eval_expr(e->lhs, env), "or") ||
                   detail::as_bool(eval_expr(e->rhs, env), "or")};
    case Op::Eq:
      return Value{detail::values_equal(eval_expr(e->lhs, env), eval_expr(e->rhs, env))};
    case Op::Ne:
      return Value{!detail::values_equal(eval_expr(e->lhs, env), eval_expr(e->rhs, env))};
    default: break;
  }
  // ordered comparisons: bounded-int operands only
  auto l = detail::as_int(eval_expr(e->lhs, env), "comparison");
  auto r = detail::as_int(eval_expr(e->rhs, env), "comparison");
  switch (e->op) {
    case Op::Lt: return Value{l < r};
    case Op::Le: return Value{l <= r};
    case Op::Gt: return Value{l > r};
    case Op::Ge: return Value{l >= r};
    default: throw std::logic_error("bad expr op");
  }
}

inline bool event_enabled(const Event& ev, const Env& env) {
  return detail::as_bool(eval_expr(ev.guard, env), "guard");
}

/// Parallel product: every rhs reads the pre-state, then all assignments land
/// at once. Assigned values must stay inside the declared domains.
inline Env apply_event(const Event& ev, const Env& env, const Scope& scope) {
  if (!event_enabled(ev, env)) throw GuardFalse(ev.name);
  std::vector<std::pair<std::string, Value>> updates;
  updates.reserve(ev.action.size());
  for (const auto& a : ev.action) updates.emplace_back(a.lhs, eval_expr(a.rhs, env));
  Env out = env;
  for (auto& [lhs, v] : updates) {
    if (const SemType* t = scope.find(lhs); t && !t->contains(v))
      throw DomainViolation("assignment to " + lhs + " leaves its domain (event " +
                            ev.name + ")");
    out[lhs] = std::move(v);
  }
  return out;
}

struct StepResult {
  Env env;
  std::optional<std::string> fired;  // transition name, absent on skip
};

using GateDecisions = std::map<std::string, bool>;  // transition name -> gate open

/// One evaluation of a state-machine: the first outgoing transition (in
/// declaration order) of the current state whose guard holds, and whose gate
/// (when present) is open, fires. Otherwise skip: the env is unchanged.
inline StepResult step_statemachine(const StateMachine& sm, const Env& env,
                                    const Scope& scope,
                                    const GateDecisions* gates = nullptr) {
  auto it = env.find(sm.state_var());
  if (it == env.end()) throw UnboundVariable(sm.state_var());
  const std::string& current = std::get<EnumLit>(it->second).name;
  for (const auto& t : sm.transitions) {
    if (t.source != current) continue;
    if (!event_enabled(t.event, env)) continue;
    if (gates) {
      auto g = gates->find(t.name);
      if (g != gates->end() && !g->second) continue;
    }
    return {apply_event(t.event, env, scope), t.name};
  }
  return {env, std::nullopt};
}

/// Initial environment from the declarations: every variable and constant at
/// its initializer, every state variable at its machine's initial state.
inline Env initial_env(const Model& m) {
  Env env;
  for (const auto& v : m.variables) env[v.name] = v.init;
  for (const auto& sm : m.statemachines) env[sm.state_var()] = EnumLit{sm.initial};
  return env;
}

}  // namespace ebsm
