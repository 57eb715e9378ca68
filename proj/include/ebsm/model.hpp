// Domain model: machines, typed variables, state-machines, store bindings,
// the task body, and the guidance configuration.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebsm/expr.hpp"
#include "ebsm/value.hpp"

namespace ebsm {

struct VarDecl {
  std::string name;
  SemType type;
  Value init{false};
  bool is_const = false;
  int line = 1;
};

struct Event {
  std::string name;
  ExprPtr guard;               // boolean; never null (literal true if absent)
  std::vector<Assign> action;  // parallel product
};

struct Transition {
  std::string name;
  std::string source;
  std::string target;
  // What the user wrote; elaboration builds `event` from these.
  ExprPtr user_guard;                // may be null (no extra guard)
  std::vector<Assign> user_actions;  // extra parallel assignments
  Event event;                       // full guard incl. state test, full action
  int line = 1;
};

enum class MachineKind { Controller, Environment };

struct StateMachine {
  std::string name;  // also the implicit state variable's name
  MachineKind kind = MachineKind::Controller;
  std::vector<std::string> states;  // the enumeration partition, ordered
  std::string initial;
  std::vector<Transition> transitions;  // declaration order is normative

  const std::string& state_var() const { return name; }
  std::string states_type_name() const { return name + "_STATES"; }

  std::vector<const Transition*> outgoing(const std::string& state) const {
    std::vector<const Transition*> out;
    for (const auto& t : transitions)
      if (t.source == state) out.push_back(&t);
    return out;
  }
};

struct OutputSpec {
  std::string label;              // leading-dots label, padded on render
  std::vector<std::string> vars;  // variables appended after the label
};

struct TaskBody {
  bool periodic = true;
  std::vector<std::string> init_phase;  // event names (initial sends)
  std::vector<std::string> eval_phase;  // state-machine names, each once
  std::vector<std::string> send_phase;  // event names
  std::vector<std::string> read_phase;  // event names
  std::vector<OutputSpec> outputs;
};

struct StoreBinding {
  std::string store_var;
  std::string module_var;
};

// Declared types of everything an expression can reference: variables,
// constants, and the implicit state variable of each machine.
struct Scope {
  std::map<std::string, SemType> types;

  const SemType* find(const std::string& name) const {
    auto it = types.find(name);
    return it == types.end() ? nullptr : &it->second;
  }
};

struct Model {
  std::string name;
  std::vector<VarDecl> variables;  // constants included, flagged
  std::vector<StateMachine> statemachines;
  std::vector<StoreBinding> store_bindings;
  std::vector<Event> events;  // send/recv events
  TaskBody taskbody;

  const StateMachine* find_machine(const std::string& n) const {
    for (const auto& sm : statemachines)
      if (sm.name == n) return &sm;
    return nullptr;
  }
  const Event* find_event(const std::string& n) const {
    for (const auto& e : events)
      if (e.name == n) return &e;
    return nullptr;
  }
  const VarDecl* find_var(const std::string& n) const {
    for (const auto& v : variables)
      if (v.name == n) return &v;
    return nullptr;
  }
  const Transition* find_transition(const std::string& machine,
                                    const std::string& transition) const {
    const auto* sm = find_machine(machine);
    if (!sm) return nullptr;
    for (const auto& t : sm->transitions)
      if (t.name == transition) return &t;
    return nullptr;
  }

  Scope scope() const {
    Scope s;
    for (const auto& v : variables) s.types[v.name] = v.type;
    for (const auto& sm : statemachines)
      s.types[sm.state_var()] = SemType::enumeration(sm.states);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Guidance: per-transition gating of generated branch conditions.

enum class GateMode { Exact, Threshold };

struct Gate {
  GateMode mode = GateMode::Exact;
  std::int64_t q = 0;
};

struct GuidanceConfig {
  std::int64_t n = 4000;  // range bound for the per-evaluation random draw
  std::map<std::string, Gate> gates;  // key "<Machine>.<transition>"

  std::optional<Gate> gate_for(const std::string& key) const {
    auto it = gates.find(key);
    if (it == gates.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace ebsm
