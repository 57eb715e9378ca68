#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ebsm/guidance.hpp"
#include "test_util.hpp"

using namespace ebsm;
using ebsm_test::load_fixture;
using ebsm_test::read_file;

namespace {

const char* kTinyModel = R"(machine Tiny
var x : bool := false
statemachine M kind controller initial A
  state A
  state B
  transition t1 from A to B when x = true
  transition t2 from B to A
end
taskbody periodic
  eval M
end
)";

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("fixture parses into the stop-start model") {
  Model m = load_fixture();
  CHECK(m.name == "StopStart01b");
  CHECK(m.statemachines.size() == 6);
  const StateMachine* eng = m.find_machine("EngMode");
  REQUIRE(eng != nullptr);
  CHECK(eng->kind == MachineKind::Environment);
  CHECK(eng->states == std::vector<std::string>{"ENG_STOPPING", "ENG_CRANKING",
                                                "ENG_RUNNING", "ENG_OFF"});
  CHECK(eng->initial == "ENG_OFF");
  std::set<std::string> names;
  for (const auto& t : eng->transitions) names.insert(t.name);
  for (const char* t : {"s1", "s2", "s3", "s5", "s6", "userStart"})
    CHECK(names.count(t) == 1);
  // elaboration injected the state update as the first action
  const Transition* s5 = m.find_transition("EngMode", "s5");
  REQUIRE(s5 != nullptr);
  REQUIRE(!s5->event.action.empty());
  CHECK(s5->event.action[0].lhs == "EngMode");
  CHECK(s5->event.action[0].rhs->lit == Value{EnumLit{"ENG_OFF"}});
}

TEST_CASE("empty input is rejected with a clear diagnostic") {
  auto res = parse_model("");
  CHECK(!res.ok());
  REQUIRE(!res.diagnostics.empty());
  CHECK(res.diagnostics[0].severity == Diagnostic::Severity::Error);
  CHECK(res.diagnostics[0].message.find("expected 'machine'") != std::string::npos);
}

TEST_CASE("transition from an undeclared state is diagnosed with its line") {
  std::string src = kTinyModel;
  src.insert(src.find("end"), "  transition bad from X to A\n");
  auto res = parse_model(src);
  CHECK(!res.ok());
  bool found = false;
  for (const auto& d : res.diagnostics)
    if (d.code == "unknown-state" && d.message.find("'X'") != std::string::npos) {
      found = true;
      CHECK(d.line == 8);  // the inserted line
    }
  CHECK(found);
}

TEST_CASE("duplicate identifiers, bad guards, missing initial") {
  auto dup = parse_model("machine M\nvar x : bool := false\nvar x : bool := true\n");
  CHECK(has_code(dup.diagnostics, "duplicate-identifier"));

  std::string bad_guard = kTinyModel;
  bad_guard.replace(bad_guard.find("x = true"), 8, "x = 3");
  CHECK(has_code(parse_model(bad_guard).diagnostics, "type-mismatch"));

  std::string bad_init = kTinyModel;
  bad_init.replace(bad_init.find("initial A"), 9, "initial Z");
  CHECK(has_code(parse_model(bad_init).diagnostics, "missing-initial"));

  auto bad_domain = parse_model("machine M\nvar n : int 0..5 := 9\n");
  CHECK(has_code(bad_domain.diagnostics, "init-out-of-domain"));
}

TEST_CASE("parsing is total: many errors, no aborts") {
  auto res = parse_model("machine M\n???\nvar : := \ntransition nowhere\nend end end\n");
  CHECK(!res.ok());
  CHECK(res.diagnostics.size() >= 2);
  for (const auto& d : res.diagnostics) {
    CHECK(d.line >= 1);
    CHECK(d.line <= 5);
    CHECK(d.column >= 1);
  }
}

TEST_CASE("round-trip: pretty-print reparses to a structurally equal model") {
  for (const std::string src :
       {std::string(kTinyModel), read_file(ebsm_test::models_dir() + "/stop_start.ebsm")}) {
    Model m = ebsm_test::parse_or_throw(src);
    std::string printed = pretty_print(m);
    auto re = parse_model(printed);
    REQUIRE(re.ok());
    CHECK(pretty_print(*re.model) == printed);
  }
}

TEST_CASE("determinism: identical bytes give identical results") {
  std::string src = read_file(ebsm_test::models_dir() + "/stop_start.ebsm");
  auto a = parse_model(src);
  auto b = parse_model(src);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(pretty_print(*a.model) == pretty_print(*b.model));
}

// ---- guidance -------------------------------------------------------------

TEST_CASE("guidance: exact gate at q=3990") {
  auto res = parse_guidance(
      R"({"n": 4000, "transitions": {"EngMode.s5": {"mode":"exact","q":3990}}})");
  REQUIRE(res.ok());
  CHECK(res.config->n == 4000);
  auto g = res.config->gate_for("EngMode.s5");
  REQUIRE(g.has_value());
  CHECK(g->mode == GateMode::Exact);
  CHECK(g->q == 3990);
  CHECK(!res.config->gate_for("EngMode.s6").has_value());  // defaults ungated
}

TEST_CASE("guidance: empty transitions leaves everything ungated") {
  auto res = parse_guidance(R"({"n": 1, "transitions": {}})");
  REQUIRE(res.ok());
  CHECK(res.config->gates.empty());
}

TEST_CASE("guidance: threshold q covering the full range") {
  auto res = parse_guidance(
      R"({"n": 100, "transitions": {"EngMode.s1": {"mode":"threshold","q":99}}})");
  REQUIRE(res.ok());
  auto g = res.config->gate_for("EngMode.s1");
  REQUIRE(g.has_value());
  // threshold q=99 over 0..100 admits every r but 100
  CHECK(g->mode == GateMode::Threshold);
  CHECK(g->q == 99);
}

TEST_CASE("guidance errors") {
  CHECK(!parse_guidance(R"({"n": 10, "transitions": {"M.t": {"mode":"exact","q":11}}})").ok());
  CHECK(!parse_guidance(R"({"n": 0})").ok());
  CHECK(!parse_guidance("not json").ok());
  auto dup = parse_guidance(
      R"({"n": 10, "transitions": {"M.t": {"mode":"exact","q":1}, "M.t": {"mode":"exact","q":2}}})");
  CHECK(!dup.ok());
  CHECK(has_code(dup.diagnostics, "duplicate-key"));
  // malformed key: warning, entry ignored, config still produced
  auto mal = parse_guidance(R"({"n": 10, "transitions": {"nodot": {"mode":"exact","q":1}}})");
  REQUIRE(mal.ok());
  CHECK(mal.config->gates.empty());
  CHECK(has_code(mal.diagnostics, "unknown-transition"));
}
