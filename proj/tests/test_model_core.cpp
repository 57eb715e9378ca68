#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ebsm/prng.hpp"
#include "ebsm/semantics.hpp"
#include "test_util.hpp"

using namespace ebsm;
using ebsm_test::load_fixture;

namespace {

ExprPtr cmp(Expr::Op op, const std::string& var, Value v) {
  return Expr::binary(op, Expr::variable(var), Expr::literal(std::move(v)));
}

const Transition& transition(const Model& m, const std::string& machine,
                             const std::string& name) {
  const Transition* t = m.find_transition(machine, name);
  REQUIRE(t != nullptr);
  return *t;
}

}  // namespace

TEST_CASE("eval_expr: s1 guard over the engine-off environment") {
  Model m = load_fixture();
  Env env = initial_env(m);
  env["ENG_Start_Order"] = true;
  const auto& s1 = transition(m, "EngMode", "s1");
  CHECK(std::get<bool>(eval_expr(s1.event.guard, env)) == true);
  env["ENG_Start_Order"] = false;
  CHECK(std::get<bool>(eval_expr(s1.event.guard, env)) == false);
}

TEST_CASE("eval_expr: tautology true and x = x") {
  Env env{{"x", Value{std::int64_t{7}}}};
  auto e = Expr::conjunction(Expr::literal(Value{true}),
                             Expr::binary(Expr::Op::Eq, Expr::variable("x"),
                                          Expr::variable("x")));
  CHECK(std::get<bool>(eval_expr(e, env)) == true);
}

TEST_CASE("eval_expr: integer comparison below the idle threshold") {
  Env env{{"speed", Value{std::int64_t{699}}}, {"idle", Value{std::int64_t{700}}}};
  auto e = Expr::binary(Expr::Op::Ge, Expr::variable("speed"), Expr::variable("idle"));
  CHECK(std::get<bool>(eval_expr(e, env)) == false);
}

TEST_CASE("eval_expr errors") {
  Env env;
  CHECK_THROWS_AS(eval_expr(Expr::variable("nope"), env), UnboundVariable);
  env["b"] = true;
  auto bad = Expr::binary(Expr::Op::Lt, Expr::variable("b"), Expr::literal(Value{std::int64_t{1}}));
  CHECK_THROWS_AS(eval_expr(bad, env), TypeMismatch);
}

TEST_CASE("apply_event: Eng_send copies engine state into the store") {
  Model m = load_fixture();
  Scope scope = m.scope();
  Env env = initial_env(m);
  env["ENG_EngineSpeed"] = std::int64_t{0};
  const Event* send = m.find_event("Eng_send");
  REQUIRE(send != nullptr);
  Env out = apply_event(*send, env, scope);
  CHECK(out.at("STO_EngMode") == Value{EnumLit{"ENG_OFF"}});
  CHECK(out.at("STO_EngineSpeed") == Value{std::int64_t{0}});
}

TEST_CASE("apply_event: parallel product reads the pre-state") {
  Scope scope;
  scope.types["x"] = SemType::bounded_int(0, 10);
  scope.types["y"] = SemType::bounded_int(0, 10);
  Event swap{"swap", Expr::literal(Value{true}),
             {{"x", Expr::variable("y")}, {"y", Expr::variable("x")}}};
  Env env{{"x", Value{std::int64_t{1}}}, {"y", Value{std::int64_t{2}}}};
  Env out = apply_event(swap, env, scope);
  CHECK(out.at("x") == Value{std::int64_t{2}});
  CHECK(out.at("y") == Value{std::int64_t{1}});
}

TEST_CASE("apply_event: t7 issues the stop order") {
  Model m = load_fixture();
  Scope scope = m.scope();
  Env env = initial_env(m);
  env["SSEMode"] = EnumLit{"SSE_OPERATION"};
  env["SSE_Stop_Req"] = true;
  env["SSE_EngMode"] = EnumLit{"ENG_RUNNING"};
  env["SSE_Stop_Ena"] = true;
  const auto& t7 = transition(m, "SSEMode", "t7");
  Env out = apply_event(t7.event, env, scope);
  CHECK(out.at("SSEMode") == Value{EnumLit{"SSE_STOPPING"}});
  CHECK(out.at("SSE_Stop_Order") == Value{true});
  CHECK(out.at("SSE_Start_Order") == Value{false});
}

TEST_CASE("apply_event errors: disabled guard and domain violation") {
  Scope scope;
  scope.types["x"] = SemType::bounded_int(0, 5);
  Event bump{"bump", cmp(Expr::Op::Eq, "x", Value{std::int64_t{5}}),
             {{"x", Expr::literal(Value{std::int64_t{6}})}}};
  Env env{{"x", Value{std::int64_t{0}}}};
  CHECK_THROWS_AS(apply_event(bump, env, scope), GuardFalse);
  env["x"] = std::int64_t{5};
  CHECK_THROWS_AS(apply_event(bump, env, scope), DomainViolation);
}

TEST_CASE("event_enabled: s3 when cranking fast enough") {
  Model m = load_fixture();
  Env env = initial_env(m);
  env["EngMode"] = EnumLit{"ENG_CRANKING"};
  env["ENG_EngineSpeed"] = std::int64_t{800};
  const auto& s3 = transition(m, "EngMode", "s3");
  CHECK(event_enabled(s3.event, env) == true);

  Event trivial{"t", Expr::literal(Value{true}), {}};
  CHECK(event_enabled(trivial, env) == true);

  Event s5like{"s5", cmp(Expr::Op::Eq, "ENG_EngineSpeed", Value{std::int64_t{0}}), {}};
  env["ENG_EngineSpeed"] = std::int64_t{1};
  CHECK(event_enabled(s5like, env) == false);
}

TEST_CASE("step_statemachine: stopping with zero speed fires s5") {
  Model m = load_fixture();
  Scope scope = m.scope();
  const StateMachine* eng = m.find_machine("EngMode");
  Env env = initial_env(m);
  env["EngMode"] = EnumLit{"ENG_STOPPING"};
  env["ENG_EngineSpeed"] = std::int64_t{0};
  auto res = step_statemachine(*eng, env, scope);
  CHECK(res.fired == "s5");
  CHECK(res.env.at("EngMode") == Value{EnumLit{"ENG_OFF"}});
}

TEST_CASE("step_statemachine: skip leaves the environment untouched") {
  Model m = load_fixture();
  Scope scope = m.scope();
  const StateMachine* eng = m.find_machine("EngMode");
  Env env = initial_env(m);
  env["EngMode"] = EnumLit{"ENG_RUNNING"};  // Stop_Order false: no guard holds
  auto res = step_statemachine(*eng, env, scope);
  CHECK(!res.fired.has_value());
  CHECK(res.env == env);
}

TEST_CASE("step_statemachine: declaration order breaks guard overlap") {
  Model m = load_fixture();
  Scope scope = m.scope();
  const StateMachine* eng = m.find_machine("EngMode");
  Env env = initial_env(m);
  env["EngMode"] = EnumLit{"ENG_STOPPING"};
  env["ENG_EngineSpeed"] = std::int64_t{0};
  env["ENG_Start_Order"] = true;  // both s5 and s6 are enabled
  auto res = step_statemachine(*eng, env, scope);
  CHECK(res.fired == "s5");
}

TEST_CASE("step_statemachine: closed gate skips to the next branch") {
  Model m = load_fixture();
  Scope scope = m.scope();
  const StateMachine* eng = m.find_machine("EngMode");
  Env env = initial_env(m);
  env["EngMode"] = EnumLit{"ENG_STOPPING"};
  env["ENG_EngineSpeed"] = std::int64_t{0};
  env["ENG_Start_Order"] = true;
  GateDecisions gates{{"s5", false}};
  auto res = step_statemachine(*eng, env, scope, &gates);
  CHECK(res.fired == "s6");
  gates["s6"] = false;
  res = step_statemachine(*eng, env, scope, &gates);
  CHECK(!res.fired.has_value());
}

// ---- properties -----------------------------------------------------------

TEST_CASE("property: parallel assignment is order independent") {
  Model m = load_fixture();
  Scope scope = m.scope();
  Prng rng(42);
  for (const auto& ev : m.events) {
    Env env = initial_env(m);
    // randomize a little so the copies are not all defaults
    env["ENG_EngineSpeed"] = std::int64_t(rng.draw_in_range(1000));
    env["SSE_Stop_Order"] = (rng.next() & 1) != 0;
    Env expected = apply_event(ev, env, scope);
    Event shuffled = ev;
    for (int k = 0; k < 5; ++k) {
      for (size_t i = shuffled.action.size(); i > 1; --i)
        std::swap(shuffled.action[i - 1],
                  shuffled.action[rng.next() % i]);
      CHECK(apply_event(shuffled, env, scope) == expected);
    }
  }
}

TEST_CASE("property: events only write their action's targets") {
  Model m = load_fixture();
  Scope scope = m.scope();
  Env env = initial_env(m);
  for (const auto& ev : m.events) {
    if (!event_enabled(ev, env)) continue;
    Env out = apply_event(ev, env, scope);
    std::set<std::string> targets;
    for (const auto& a : ev.action) targets.insert(a.lhs);
    for (const auto& [k, v] : out)
      if (!targets.count(k)) CHECK(v == env.at(k));
  }
}

TEST_CASE("property: partition safety under random stepping") {
  Model m = load_fixture();
  Scope scope = m.scope();
  Env env = initial_env(m);
  Prng rng(7);
  for (int step = 0; step < 2000; ++step) {
    const auto& sm = m.statemachines[rng.next() % m.statemachines.size()];
    // random gate decisions exercise the skip path too
    GateDecisions gates;
    for (const auto& t : sm.transitions) gates[t.name] = (rng.next() & 1) != 0;
    auto res = step_statemachine(sm, env, scope, &gates);
    env = res.env;
    for (const auto& machine : m.statemachines) {
      const auto& v = env.at(machine.state_var());
      REQUIRE(is_enum(v));
      const auto& s = std::get<EnumLit>(v).name;
      CHECK(std::find(machine.states.begin(), machine.states.end(), s) !=
            machine.states.end());
    }
  }
}
