#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebsm/analyzer.hpp"
#include "test_util.hpp"

using namespace ebsm;
using ebsm_test::load_fixture;
using ebsm_test::parse_or_throw;

namespace {

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

// Independent enumeration oracle: nested loops over the full variable
// domains (not the analyzer's odometer), checking each guard pair for
// overlap and each point for cover. Deliberately coded apart from
// check_disjoint_complete.
struct OracleResult {
  bool disjoint = true;
  bool complete = true;
};

void oracle_rec(const Model& m, const StateMachine& sm,
                const std::vector<const Transition*>& outgoing,
                const std::vector<std::pair<std::string, SemType>>& vars, size_t i,
                Env& env, OracleResult& res) {
  if (i == vars.size()) {
    std::vector<bool> holds;
    for (const auto* t : outgoing)
      holds.push_back(!t->user_guard || std::get<bool>(eval_expr(t->user_guard, env)));
    bool any = false;
    for (size_t a = 0; a < holds.size(); ++a) {
      if (holds[a]) any = true;
      for (size_t b = a + 1; b < holds.size(); ++b)
        if (holds[a] && holds[b]) res.disjoint = false;
    }
    if (!any) res.complete = false;
    return;
  }
  const auto& [name, type] = vars[i];
  for (std::uint64_t k = 0; k < type.cardinality(); ++k) {
    env[name] = type.nth(k);
    oracle_rec(m, sm, outgoing, vars, i + 1, env, res);
  }
}

OracleResult oracle(const Model& m, const std::string& machine, const std::string& state) {
  const StateMachine* sm = m.find_machine(machine);
  auto outgoing = sm->outgoing(state);
  std::vector<std::string> names;
  for (const auto* t : outgoing)
    if (t->user_guard) free_vars(t->user_guard, names);
  Scope scope = m.scope();
  std::vector<std::pair<std::string, SemType>> vars;
  for (const auto& n : names) {
    if (n == sm->state_var()) continue;
    if (const VarDecl* vd = m.find_var(n); vd && vd->is_const) continue;
    vars.emplace_back(n, *scope.find(n));
  }
  Env env;
  for (const auto& v : m.variables)
    if (v.is_const) env[v.name] = v.init;
  env[sm->state_var()] = EnumLit{state};
  OracleResult res;
  if (outgoing.empty()) {
    res.complete = false;
    return res;
  }
  oracle_rec(m, *sm, outgoing, vars, 0, env, res);
  return res;
}

}  // namespace

TEST_CASE("check_partition: fixture is clean") {
  Model m = load_fixture();
  auto ds = check_partition(m);
  CHECK(!has_errors(ds));
  CHECK(ds.empty());
}

TEST_CASE("check_partition: duplicate state and unreachable state") {
  StateMachine sm;
  sm.name = "M";
  sm.states = {"A", "A"};
  sm.initial = "A";
  Model m;
  m.name = "X";
  m.statemachines.push_back(sm);
  CHECK(has_code(check_partition(m), "duplicate-state"));

  Model m2 = parse_or_throw(R"(machine M
statemachine S kind controller initial A
  state A
  state Z
  transition t from A to A
end
taskbody
  eval S
end
)");
  auto ds = check_partition(m2);
  CHECK(!has_errors(ds));
  CHECK(has_code(ds, "unreachable-state"));
}

TEST_CASE("ENG_STOPPING guards are neither disjoint nor complete") {
  Model m = load_fixture();
  auto rep = check_disjoint_complete(m, "EngMode", "ENG_STOPPING");
  CHECK(!rep.disjoint);
  CHECK(!rep.complete);
  REQUIRE(!rep.disjoint_witnesses.empty());
  REQUIRE(!rep.completeness_witnesses.empty());
  // witness soundness: re-evaluating the guards reproduces the violation
  const auto* s5 = m.find_transition("EngMode", "s5");
  const auto* s6 = m.find_transition("EngMode", "s6");
  for (const auto& w : rep.disjoint_witnesses) {
    CHECK(std::get<bool>(eval_expr(s5->user_guard, w)));
    CHECK(std::get<bool>(eval_expr(s6->user_guard, w)));
  }
  for (const auto& w : rep.completeness_witnesses) {
    CHECK(!std::get<bool>(eval_expr(s5->user_guard, w)));
    CHECK(!std::get<bool>(eval_expr(s6->user_guard, w)));
  }
}

TEST_CASE("single true-guarded transition is disjoint and complete") {
  Model m = parse_or_throw(R"(machine M
statemachine S kind controller initial A
  state A
  transition t from A to A
end
taskbody
  eval S
end
)");
  auto rep = check_disjoint_complete(m, "S", "A");
  CHECK(rep.disjoint);
  CHECK(rep.complete);
}

TEST_CASE("g and not g over one boolean: disjoint and complete") {
  Model m = parse_or_throw(R"(machine M
var x : bool := false
statemachine S kind controller initial A
  state A
  state B
  transition t1 from A to B when x = true
  transition t2 from A to A when not (x = true)
  transition back from B to A
end
taskbody
  eval S
end
)");
  auto rep = check_disjoint_complete(m, "S", "A");
  CHECK(rep.disjoint);
  CHECK(rep.complete);
  CHECK(rep.disjoint_witnesses.empty());
  CHECK(rep.completeness_witnesses.empty());
}

TEST_CASE("analyzer agrees with the independent enumeration oracle") {
  Model fixture = load_fixture();
  for (const auto& sm : fixture.statemachines) {
    for (const auto& state : sm.states) {
      auto rep = check_disjoint_complete(fixture, sm.name, state);
      REQUIRE(!rep.domain_too_large.has_value());
      auto ora = oracle(fixture, sm.name, state);
      CHECK(rep.disjoint == ora.disjoint);
      CHECK(rep.complete == ora.complete);
    }
  }
}

TEST_CASE("monotonicity: adding a true-guarded transition completes a state") {
  std::string src = R"(machine M
var x : bool := false
statemachine S kind environment initial A
  state A
  state B
  transition t1 from A to B when x = true
end
taskbody
  eval S
end
)";
  Model before = parse_or_throw(src);
  auto rep0 = check_disjoint_complete(before, "S", "A");
  CHECK(!rep0.complete);
  std::string with_true = src;
  with_true.insert(with_true.find("end"), "  transition t2 from A to A\n");
  Model after = parse_or_throw(with_true);
  auto rep1 = check_disjoint_complete(after, "S", "A");
  CHECK(rep1.complete);
  CHECK(!rep1.disjoint);  // t1 is satisfiable, so it overlaps the new catch-all
}

TEST_CASE("domain bound: oversized spaces are reported, not enumerated") {
  Model m = load_fixture();
  auto rep = check_disjoint_complete(m, "EngMode", "ENG_STOPPING", /*bound=*/10);
  REQUIRE(rep.domain_too_large.has_value());
  CHECK(*rep.domain_too_large == 2002);  // speed 0..1000 x Start_Order bool
}

TEST_CASE("check_guidance: duplicate exact q within one state") {
  Model m = load_fixture();
  GuidanceConfig g;
  g.n = 4000;
  g.gates["EngMode.s5"] = {GateMode::Exact, 3990};
  g.gates["EngMode.s6"] = {GateMode::Exact, 3990};
  auto ds = check_guidance(m, g);
  CHECK(has_code(ds, "duplicate-q"));
  CHECK(has_errors(ds));
}

TEST_CASE("check_guidance: empty config and unknown transition") {
  Model m = load_fixture();
  CHECK(check_guidance(m, GuidanceConfig{}).empty());
  GuidanceConfig g;
  g.gates["EngMode.nonexistent"] = {GateMode::Exact, 1};
  auto ds = check_guidance(m, g);
  CHECK(has_code(ds, "unknown-transition"));
  CHECK(!has_errors(ds));  // warning only
}

TEST_CASE("analyze_model severity: controller failures error, environment warn") {
  Model m = load_fixture();
  auto rep = analyze_model(m);
  CHECK(!has_errors(rep.diagnostics));  // fixture controllers are clean
  // flip EngMode to controller kind: its guard gaps must now be errors
  Model m2 = load_fixture();
  for (auto& sm : m2.statemachines)
    if (sm.name == "EngMode") sm.kind = MachineKind::Controller;
  CHECK(has_errors(analyze_model(m2).diagnostics));
}
