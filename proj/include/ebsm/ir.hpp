// Translated program form: per-machine procedures as case-over-state with
// if/elsif/else-null branches, plus the task-body main loop.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebsm/model.hpp"

namespace ebsm {

struct BranchIR {
  // Condition as written inside the case arm: the event guard minus the
  // auto-generated state test (the arm already establishes it).
  ExprPtr condition;                 // never null; literal true when ungated guard absent
  std::vector<Assign> body;          // includes the state update
  std::string comment;               // transition name, rendered as "-- <t>"
  std::string transition_key;        // "<Machine>.<transition>"
  std::optional<Gate> gate;          // guidance gate, conjoined at render/eval time
};

struct CaseArm {
  std::string state;
  std::vector<BranchIR> branches;  // terminal null-branch is implicit
};

struct ProcedureIR {
  std::string name;       // "<Machine>stateMachine"
  std::string machine;    // source machine name
  std::string state_var;
  std::vector<CaseArm> arms;  // one per state, in declared order
};

struct ProgramIR {
  std::string model_name;
  std::vector<VarDecl> variables;            // constants included
  std::vector<StateMachine> machines;        // for enum types + initial states
  std::vector<ProcedureIR> procedures;       // in eval-phase order
  std::vector<Event> init_events;
  std::vector<Event> send_events;
  std::vector<Event> read_events;
  std::vector<OutputSpec> outputs;
  // Guidance instrumentation
  bool instrumented = false;
  std::int64_t random_bound = 4000;  // n: draws are uniform over 0..n
  std::string random_var() const { return model_name + "_random"; }

  const ProcedureIR* find_procedure(const std::string& machine) const {
    for (const auto& p : procedures)
      if (p.machine == machine) return &p;
    return nullptr;
  }
};

}  // namespace ebsm
