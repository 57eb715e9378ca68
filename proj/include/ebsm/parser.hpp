// Recursive-descent parser for the .ebsm modeling DSL.
//
// Parsing is total: malformed input never aborts, it accumulates diagnostics
// and resynchronizes at the next line. A Model is produced only when no error
// diagnostic was emitted.
#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ebsm/diagnostics.hpp"
#include "ebsm/model.hpp"

namespace ebsm {

struct ParseResult {
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

namespace parse_detail {

struct Token {
  enum class Kind { Ident, Int, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t ival = 0;
  int col = 1;
};

// Strip a -- comment, respecting string literals.
inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i + 1 < line.size() || i < line.size(); ++i) {
    if (i >= line.size()) break;
    char c = line[i];
    if (c == '"') in_str = !in_str;
    if (!in_str && c == '-' && i + 1 < line.size() && line[i + 1] == '-')
      return line.substr(0, i);
  }
  return line;
}

inline bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

inline bool tokenize(const std::string& raw, int line_no,
                     std::vector<Token>& out, std::vector<Diagnostic>& diags) {
  std::string line = strip_comment(raw);
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
    int col = static_cast<int>(i) + 1;
    if (ident_start(c)) {
      size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Token::Kind::Ident, line.substr(i, j - i), 0, col});
      i = j;
    } else if (std::isdigit((unsigned char)c) ||
               (c == '-' && i + 1 < line.size() && std::isdigit((unsigned char)line[i + 1]))) {
      size_t j = i + 1;
      while (j < line.size() && std::isdigit((unsigned char)line[j])) ++j;
      Token t{Token::Kind::Int, line.substr(i, j - i), 0, col};
      t.ival = std::stoll(t.text);
      out.push_back(t);
      i = j;
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < line.size() && line[j] != '"') ++j;
      if (j >= line.size()) {
        diags.push_back(Diagnostic::error(line_no, col, "syntax", "unterminated string"));
        return false;
      }
      out.push_back({Token::Kind::String, line.substr(i + 1, j - i - 1), 0, col});
      i = j + 1;
    } else {
      // multi-char puncts first
      auto two = line.substr(i, 2);
      auto three = line.substr(i, 3);
      if (three == "<->") {
        out.push_back({Token::Kind::Punct, three, 0, col});
        i += 3;
      } else if (two == ":=" || two == ".." || two == "/=" || two == "<=" || two == ">=") {
        out.push_back({Token::Kind::Punct, two, 0, col});
        i += 2;
      } else if (std::string("(),:=<>{}").find(c) != std::string::npos) {
        out.push_back({Token::Kind::Punct, std::string(1, c), 0, col});
        ++i;
      } else {
        diags.push_back(Diagnostic::error(line_no, col, "syntax",
                                          std::string("unexpected character '") + c + "'"));
        return false;
      }
    }
  }
  out.push_back({Token::Kind::End, "", 0, static_cast<int>(line.size()) + 1});
  return true;
}

// Cursor over one line's tokens.
struct Cursor {
  const std::vector<Token>* toks;
  size_t pos = 0;
  int line = 1;
  std::vector<Diagnostic>* diags;
  bool failed = false;

  const Token& peek() const { return (*toks)[pos]; }
  const Token& next() { return (*toks)[pos < toks->size() - 1 ? pos++ : pos]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool is_ident(const char* kw) const {
    return peek().kind == Token::Kind::Ident && peek().text == kw;
  }
  bool accept_ident(const char* kw) {
    if (is_ident(kw)) { ++pos; return true; }
    return false;
  }
  bool accept_punct(const char* p) {
    if (peek().kind == Token::Kind::Punct && peek().text == p) { ++pos; return true; }
    return false;
  }
  void fail(const std::string& msg) {
    if (!failed)
      diags->push_back(Diagnostic::error(line, peek().col, "syntax", msg));
    failed = true;
  }
  std::string expect_name(const char* what) {
    if (peek().kind == Token::Kind::Ident) return next().text;
    fail(std::string("expected ") + what);
    return "";
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }
};

// Expression grammar (identifiers stay unresolved Var nodes here):
//   or   := and ('or' and)*
//   and  := not ('and' not)*
//   not  := 'not' not | cmp
//   cmp  := atom (relop atom)?
//   atom := '(' or ')' | INT | true | false | TRUE | FALSE | IDENT
inline ExprPtr parse_or(Cursor& c);

inline ExprPtr parse_atom(Cursor& c) {
  if (c.accept_punct("(")) {
    ExprPtr e = parse_or(c);
    c.expect_punct(")");
    return e;
  }
  const Token& t = c.peek();
  if (t.kind == Token::Kind::Int) { c.next(); return Expr::literal(Value{t.ival}); }
  if (t.kind == Token::Kind::Ident) {
    if (t.text == "true" || t.text == "TRUE") { c.next(); return Expr::literal(Value{true}); }
    if (t.text == "false" || t.text == "FALSE") { c.next(); return Expr::literal(Value{false}); }
    c.next();
    return Expr::variable(t.text);
  }
  c.fail("expected expression");
  return Expr::literal(Value{false});
}

inline ExprPtr parse_cmp(Cursor& c) {
  ExprPtr l = parse_atom(c);
  static const std::pair<const char*, Expr::Op> relops[] = {
      {"=", Expr::Op::Eq}, {"/=", Expr::Op::Ne}, {"<=", Expr::Op::Le},
      {">=", Expr::Op::Ge}, {"<", Expr::Op::Lt}, {">", Expr::Op::Gt}};
  for (auto& [p, op] : relops)
    if (c.accept_punct(p)) return Expr::binary(op, l, parse_atom(c));
  return l;
}

inline ExprPtr parse_not(Cursor& c) {
  if (c.accept_ident("not")) return Expr::negation(parse_not(c));
  return parse_cmp(c);
}

inline ExprPtr parse_and(Cursor& c) {
  ExprPtr l = parse_not(c);
  while (c.accept_ident("and")) l = Expr::binary(Expr::Op::And, l, parse_not(c));
  return l;
}

inline ExprPtr parse_or(Cursor& c) {
  ExprPtr l = parse_and(c);
  while (c.accept_ident("or")) l = Expr::binary(Expr::Op::Or, l, parse_and(c));
  return l;
}

inline std::vector<Assign> parse_action(Cursor& c) {
  std::vector<Assign> out;
  do {
    Assign a;
    a.lhs = c.expect_name("assignment target");
    c.expect_punct(":=");
    a.rhs = parse_or(c);
    out.push_back(std::move(a));
  } while (c.accept_ident("par"));
  return out;
}

inline std::optional<SemType> parse_type(Cursor& c) {
  if (c.accept_ident("bool")) return SemType::boolean();
  if (c.accept_ident("int")) {
    if (c.peek().kind != Token::Kind::Int) { c.fail("expected lower bound"); return std::nullopt; }
    std::int64_t lo = c.next().ival;
    c.expect_punct("..");
    if (c.peek().kind != Token::Kind::Int) { c.fail("expected upper bound"); return std::nullopt; }
    std::int64_t hi = c.next().ival;
    return SemType::bounded_int(lo, hi);
  }
  if (c.accept_ident("enum")) {
    c.expect_punct("{");
    std::vector<std::string> lits;
    do {
      lits.push_back(c.expect_name("enum literal"));
    } while (c.accept_punct(","));
    c.expect_punct("}");
    return SemType::enumeration(std::move(lits));
  }
  c.fail("expected type (bool, int LO..HI, or enum {...})");
  return std::nullopt;
}

// --- resolution & type checking -------------------------------------------

// Rewrite unresolved Var nodes naming enum literals into literal nodes.
inline ExprPtr resolve(const ExprPtr& e, const std::set<std::string>& literal_pool) {
  if (!e) return e;
  switch (e->op) {
    case Expr::Op::Lit: return e;
    case Expr::Op::Var:
      if (literal_pool.count(e->var)) return Expr::literal(Value{EnumLit{e->var}});
      return e;
    case Expr::Op::Not: {
      auto l = resolve(e->lhs, literal_pool);
      return l == e->lhs ? e : Expr::negation(l);
    }
    default: {
      auto l = resolve(e->lhs, literal_pool);
      auto r = resolve(e->rhs, literal_pool);
      return (l == e->lhs && r == e->rhs) ? e : Expr::binary(e->op, l, r);
    }
  }
}

// Infers a type for an expression; diagnostics on mismatch. Enum inference
// is structural (set of possible literals).
inline std::optional<SemType> infer(const ExprPtr& e, const Scope& scope, int line,
                                    std::vector<Diagnostic>& diags) {
  using Op = Expr::Op;
  auto err = [&](const std::string& m) {
    diags.push_back(Diagnostic::error(line, 1, "type-mismatch", m));
    return std::nullopt;
  };
  switch (e->op) {
    case Op::Lit:
      if (is_bool(e->lit)) return SemType::boolean();
      if (is_int(e->lit)) {
        auto v = std::get<std::int64_t>(e->lit);
        return SemType::bounded_int(v, v);
      }
      return SemType::enumeration({std::get<EnumLit>(e->lit).name});
    case Op::Var: {
      const SemType* t = scope.find(e->var);
      if (!t) {
        diags.push_back(Diagnostic::error(line, 1, "unknown-identifier",
                                          "unknown identifier '" + e->var + "'"));
        return std::nullopt;
      }
      return *t;
    }
    case Op::Not: {
      auto t = infer(e->lhs, scope, line, diags);
      if (t && t->kind != SemType::Kind::Bool) return err("'not' needs a boolean operand");
      return SemType::boolean();
    }
    case Op::And:
    case Op::Or: {
      auto l = infer(e->lhs, scope, line, diags);
      auto r = infer(e->rhs, scope, line, diags);
      if ((l && l->kind != SemType::Kind::Bool) || (r && r->kind != SemType::Kind::Bool))
        return err("'and'/'or' need boolean operands");
      return SemType::boolean();
    }
    default: {
      auto l = infer(e->lhs, scope, line, diags);
      auto r = infer(e->rhs, scope, line, diags);
      if (!l || !r) return SemType::boolean();
      if (l->kind != r->kind) return err("comparison of unlike types");
      bool ordered = e->op == Op::Lt || e->op == Op::Le || e->op == Op::Gt || e->op == Op::Ge;
      if (ordered && l->kind != SemType::Kind::Int)
        return err("ordered comparison needs bounded-int operands");
      if (l->kind == SemType::Kind::Enum) {
        bool overlap = false;
        for (const auto& a : l->literals)
          for (const auto& b : r->literals)
            if (a == b) overlap = true;
        if (!overlap) return err("enum comparison over disjoint literal sets");
      }
      return SemType::boolean();
    }
  }
}

inline void check_assigns(const std::vector<Assign>& as, const Scope& scope,
                          const Model& m, int line, const std::string& ctx,
                          std::vector<Diagnostic>& diags) {
  std::set<std::string> seen;
  for (const auto& a : as) {
    if (!seen.insert(a.lhs).second)
      diags.push_back(Diagnostic::error(line, 1, "duplicate-assignment",
                                        "variable '" + a.lhs + "' assigned twice in " + ctx));
    const SemType* lt = scope.find(a.lhs);
    if (!lt) {
      diags.push_back(Diagnostic::error(line, 1, "unknown-identifier",
                                        "assignment to undeclared '" + a.lhs + "' in " + ctx));
      continue;
    }
    if (const VarDecl* vd = m.find_var(a.lhs); vd && vd->is_const)
      diags.push_back(Diagnostic::error(line, 1, "assign-const",
                                        "assignment to constant '" + a.lhs + "'"));
    auto rt = infer(a.rhs, scope, line, diags);
    if (!rt) continue;
    if (rt->kind != lt->kind) {
      diags.push_back(Diagnostic::error(line, 1, "type-mismatch",
                                        "type mismatch assigning '" + a.lhs + "' in " + ctx));
    } else if (rt->kind == SemType::Kind::Enum) {
      for (const auto& lit : rt->literals)
        if (!lt->contains(Value{EnumLit{lit}}))
          diags.push_back(Diagnostic::error(line, 1, "type-mismatch",
                                            "literal '" + lit + "' outside domain of '" +
                                                a.lhs + "'"));
    }
  }
}

}  // namespace parse_detail

inline ParseResult parse_model(const std::string& src) {
  using namespace parse_detail;
  ParseResult res;
  auto& diags = res.diagnostics;

  Model m;
  bool saw_machine = false, saw_taskbody = false;
  StateMachine* cur_sm = nullptr;
  enum class Ctx { Top, InMachine, InTask } ctx = Ctx::Top;

  // line records we keep for post-pass diagnostics
  struct EventLine { size_t index; int line; };
  std::vector<int> event_lines;
  int taskbody_line = 1;

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : src) {
      if (c == '\n') { lines.push_back(cur); cur.clear(); }
      else cur.push_back(c);
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  for (size_t li = 0; li < lines.size(); ++li) {
    int line_no = static_cast<int>(li) + 1;
    std::vector<Token> toks;
    if (!tokenize(lines[li], line_no, toks, diags)) continue;
    Cursor c{&toks, 0, line_no, &diags};
    if (c.at_end()) continue;

    if (ctx == Ctx::InMachine) {
      if (c.accept_ident("state")) {
        cur_sm->states.push_back(c.expect_name("state name"));
        if (!c.at_end() && !c.failed) c.fail("trailing tokens after state");
        continue;
      }
      if (c.accept_ident("transition")) {
        Transition t;
        t.line = line_no;
        t.name = c.expect_name("transition name");
        if (!c.accept_ident("from")) c.fail("expected 'from'");
        t.source = c.expect_name("source state");
        if (!c.accept_ident("to")) c.fail("expected 'to'");
        t.target = c.expect_name("target state");
        if (c.accept_ident("when")) t.user_guard = parse_or(c);
        if (c.accept_ident("then")) t.user_actions = parse_action(c);
        if (!c.at_end() && !c.failed) c.fail("trailing tokens after transition");
        cur_sm->transitions.push_back(std::move(t));
        continue;
      }
      if (c.accept_ident("end")) { ctx = Ctx::Top; cur_sm = nullptr; continue; }
      c.fail("expected 'state', 'transition', or 'end'");
      continue;
    }

    if (ctx == Ctx::InTask) {
      auto name_list = [&](std::vector<std::string>& out) {
        do {
          out.push_back(c.expect_name("name"));
        } while (c.accept_punct(","));
      };
      if (c.accept_ident("init")) { name_list(m.taskbody.init_phase); continue; }
      if (c.accept_ident("eval")) { name_list(m.taskbody.eval_phase); continue; }
      if (c.accept_ident("send")) { name_list(m.taskbody.send_phase); continue; }
      if (c.accept_ident("read")) { name_list(m.taskbody.read_phase); continue; }
      if (c.accept_ident("output")) {
        OutputSpec o;
        if (c.peek().kind != Token::Kind::String) { c.fail("expected format string"); continue; }
        o.label = c.next().text;
        while (c.peek().kind == Token::Kind::Ident) {
          o.vars.push_back(c.next().text);
          c.accept_punct(",");
        }
        m.taskbody.outputs.push_back(std::move(o));
        continue;
      }
      if (c.accept_ident("end")) { ctx = Ctx::Top; continue; }
      c.fail("expected taskbody clause or 'end'");
      continue;
    }

    // top level
    if (c.accept_ident("machine")) {
      if (saw_machine) c.fail("duplicate 'machine' header");
      m.name = c.expect_name("model name");
      saw_machine = true;
      continue;
    }
    if (!saw_machine) {
      diags.push_back(Diagnostic::error(line_no, c.peek().col, "syntax", "expected 'machine'"));
      saw_machine = true;  // report once, keep parsing
    }
    if (c.is_ident("const") || c.is_ident("var")) {
      VarDecl v;
      v.is_const = c.accept_ident("const");
      if (!v.is_const) c.accept_ident("var");
      v.line = line_no;
      v.name = c.expect_name("variable name");
      c.expect_punct(":");
      auto t = parse_type(c);
      if (!t) continue;
      v.type = *t;
      c.expect_punct(":=");
      ExprPtr init = parse_atom(c);
      // resolved later; stash literal-or-ident as a value
      if (init->op == Expr::Op::Lit) v.init = init->lit;
      else if (init->op == Expr::Op::Var) v.init = Value{EnumLit{init->var}};
      else c.fail("initializer must be a literal");
      m.variables.push_back(std::move(v));
      continue;
    }
    if (c.accept_ident("statemachine")) {
      StateMachine sm;
      sm.name = c.expect_name("state-machine name");
      if (!c.accept_ident("kind")) c.fail("expected 'kind'");
      if (c.accept_ident("controller")) sm.kind = MachineKind::Controller;
      else if (c.accept_ident("environment")) sm.kind = MachineKind::Environment;
      else c.fail("expected 'controller' or 'environment'");
      if (!c.accept_ident("initial")) c.fail("expected 'initial'");
      sm.initial = c.expect_name("initial state");
      m.statemachines.push_back(std::move(sm));
      cur_sm = &m.statemachines.back();
      ctx = Ctx::InMachine;
      continue;
    }
    if (c.accept_ident("event")) {
      Event e;
      e.name = c.expect_name("event name");
      if (c.accept_ident("when")) e.guard = parse_or(c);
      else e.guard = Expr::literal(Value{true});
      if (c.accept_ident("then")) e.action = parse_action(c);
      m.events.push_back(std::move(e));
      event_lines.push_back(line_no);
      continue;
    }
    if (c.accept_ident("store")) {
      c.accept_ident("bind");
      StoreBinding b;
      b.store_var = c.expect_name("store variable");
      c.expect_punct("<->");
      b.module_var = c.expect_name("module variable");
      m.store_bindings.push_back(std::move(b));
      continue;
    }
    if (c.accept_ident("taskbody")) {
      if (saw_taskbody) c.fail("duplicate taskbody");
      saw_taskbody = true;
      taskbody_line = line_no;
      m.taskbody.periodic = c.accept_ident("periodic");
      ctx = Ctx::InTask;
      continue;
    }
    c.fail("unexpected top-level construct");
  }

  if (!saw_machine)
    diags.push_back(Diagnostic::error(1, 1, "syntax", "expected 'machine'"));

  // ---- validation & elaboration ----
  // identifier namespaces
  {
    std::set<std::string> vars;
    for (const auto& v : m.variables)
      if (!vars.insert(v.name).second)
        diags.push_back(Diagnostic::error(v.line, 1, "duplicate-identifier",
                                          "duplicate variable '" + v.name + "'"));
    std::set<std::string> machines;
    for (const auto& sm : m.statemachines) {
      if (!machines.insert(sm.name).second)
        diags.push_back(Diagnostic::error(1, 1, "duplicate-identifier",
                                          "duplicate state-machine '" + sm.name + "'"));
      if (vars.count(sm.name))
        diags.push_back(Diagnostic::error(1, 1, "duplicate-identifier",
                                          "state variable '" + sm.name +
                                              "' collides with a declared variable"));
    }
    std::set<std::string> events;
    for (size_t i = 0; i < m.events.size(); ++i)
      if (!events.insert(m.events[i].name).second)
        diags.push_back(Diagnostic::error(event_lines[i], 1, "duplicate-identifier",
                                          "duplicate event '" + m.events[i].name + "'"));
  }

  // literal pool: machine states + declared enum literals
  std::set<std::string> literal_pool;
  for (const auto& sm : m.statemachines)
    for (const auto& s : sm.states) literal_pool.insert(s);
  for (const auto& v : m.variables)
    if (v.type.kind == SemType::Kind::Enum)
      for (const auto& l : v.type.literals) literal_pool.insert(l);
  for (const auto& v : m.variables)
    if (literal_pool.count(v.name))
      diags.push_back(Diagnostic::error(v.line, 1, "duplicate-identifier",
                                        "'" + v.name +
                                            "' is both a variable and an enum literal"));

  Scope scope = m.scope();

  // variable declarations
  for (auto& v : m.variables) {
    if (v.type.kind == SemType::Kind::Int && v.type.lo > v.type.hi)
      diags.push_back(Diagnostic::error(v.line, 1, "bad-bounds",
                                        "bounds of '" + v.name + "' have lo > hi"));
    if (!v.type.contains(v.init))
      diags.push_back(Diagnostic::error(v.line, 1, "init-out-of-domain",
                                        "initializer of '" + v.name +
                                            "' is outside its declared domain"));
  }

  // state machines: states, initial, transitions; elaborate events
  for (auto& sm : m.statemachines) {
    std::set<std::string> states(sm.states.begin(), sm.states.end());
    if (states.size() != sm.states.size())
      diags.push_back(Diagnostic::error(1, 1, "duplicate-state",
                                        "duplicate state in '" + sm.name + "'"));
    if (!states.count(sm.initial))
      diags.push_back(Diagnostic::error(1, 1, "missing-initial",
                                        "initial state '" + sm.initial +
                                            "' not declared in '" + sm.name + "'"));
    std::set<std::string> tnames;
    for (auto& t : sm.transitions) {
      if (!tnames.insert(t.name).second)
        diags.push_back(Diagnostic::error(t.line, 1, "duplicate-identifier",
                                          "duplicate transition '" + t.name + "'"));
      for (const std::string* s : {&t.source, &t.target})
        if (!states.count(*s))
          diags.push_back(Diagnostic::error(t.line, 1, "unknown-state",
                                            "transition '" + t.name +
                                                "' references undeclared state '" + *s + "'"));
      if (t.user_guard) t.user_guard = resolve(t.user_guard, literal_pool);
      for (auto& a : t.user_actions) {
        a.rhs = resolve(a.rhs, literal_pool);
        if (a.lhs == sm.state_var())
          diags.push_back(Diagnostic::error(t.line, 1, "explicit-state-update",
                                            "transition '" + t.name +
                                                "' must not assign the state variable; "
                                                "elaboration inserts it"));
      }
      if (t.user_guard) {
        auto g = infer(t.user_guard, scope, t.line, diags);
        if (g && g->kind != SemType::Kind::Bool)
          diags.push_back(Diagnostic::error(t.line, 1, "type-mismatch",
                                            "guard of '" + t.name + "' is not boolean"));
      }
      check_assigns(t.user_actions, scope, m, t.line, "transition '" + t.name + "'", diags);
      // elaboration: auto state test + auto state update
      ExprPtr state_test = Expr::binary(Expr::Op::Eq, Expr::variable(sm.state_var()),
                                        Expr::literal(Value{EnumLit{t.source}}));
      t.event.name = t.name;
      t.event.guard =
          t.user_guard ? Expr::conjunction(state_test, t.user_guard) : state_test;
      t.event.action.clear();
      t.event.action.push_back({sm.state_var(), Expr::literal(Value{EnumLit{t.target}})});
      for (const auto& a : t.user_actions) t.event.action.push_back(a);
    }
  }

  // events
  for (size_t i = 0; i < m.events.size(); ++i) {
    auto& e = m.events[i];
    int line = event_lines[i];
    e.guard = resolve(e.guard, literal_pool);
    for (auto& a : e.action) a.rhs = resolve(a.rhs, literal_pool);
    auto g = infer(e.guard, scope, line, diags);
    if (g && g->kind != SemType::Kind::Bool)
      diags.push_back(Diagnostic::error(line, 1, "type-mismatch",
                                        "guard of event '" + e.name + "' is not boolean"));
    check_assigns(e.action, scope, m, line, "event '" + e.name + "'", diags);
  }

  // store bindings
  for (const auto& b : m.store_bindings)
    for (const std::string* v : {&b.store_var, &b.module_var})
      if (!scope.find(*v))
        diags.push_back(Diagnostic::error(1, 1, "unknown-identifier",
                                          "store binding references undeclared '" + *v + "'"));

  // task body
  if (saw_taskbody) {
    for (const auto* phase :
         {&m.taskbody.init_phase, &m.taskbody.send_phase, &m.taskbody.read_phase})
      for (const auto& e : *phase)
        if (!m.find_event(e))
          diags.push_back(Diagnostic::error(taskbody_line, 1, "unknown-event",
                                            "task body references undeclared event '" + e + "'"));
    std::set<std::string> evald;
    for (const auto& sm_name : m.taskbody.eval_phase) {
      if (!m.find_machine(sm_name))
        diags.push_back(Diagnostic::error(taskbody_line, 1, "unknown-machine",
                                          "eval phase references undeclared machine '" +
                                              sm_name + "'"));
      else if (!evald.insert(sm_name).second)
        diags.push_back(Diagnostic::error(taskbody_line, 1, "duplicate-eval",
                                          "machine '" + sm_name + "' evaluated twice"));
    }
    for (const auto& sm : m.statemachines)
      if (!evald.count(sm.name))
        diags.push_back(Diagnostic::error(taskbody_line, 1, "missing-eval",
                                          "machine '" + sm.name +
                                              "' missing from the eval phase"));
    for (const auto& o : m.taskbody.outputs)
      for (const auto& v : o.vars)
        if (!scope.find(v))
          diags.push_back(Diagnostic::error(taskbody_line, 1, "unknown-identifier",
                                            "output references undeclared '" + v + "'"));
  }

  if (!has_errors(diags)) res.model = std::move(m);
  return res;
}

// ---------------------------------------------------------------------------
// Pretty-printer: renders a Model back to DSL text that reparses to a
// structurally equal Model.

namespace parse_detail {

inline std::string render_type(const SemType& t) {
  switch (t.kind) {
    case SemType::Kind::Bool: return "bool";
    case SemType::Kind::Int:
      return "int " + std::to_string(t.lo) + ".." + std::to_string(t.hi);
    case SemType::Kind::Enum: {
      std::string s = "enum {";
      for (size_t i = 0; i < t.literals.size(); ++i)
        s += (i ? ", " : "") + t.literals[i];
      return s + "}";
    }
  }
  return "";
}

inline std::string render_expr_dsl(const ExprPtr& e) {
  using Op = Expr::Op;
  auto paren = [](const std::string& s) { return "(" + s + ")"; };
  switch (e->op) {
    case Op::Lit:
      if (is_bool(e->lit)) return std::get<bool>(e->lit) ? "true" : "false";
      return render_value(e->lit);
    case Op::Var: return e->var;
    case Op::Not: return "not " + paren(render_expr_dsl(e->lhs));
    case Op::And: return paren(render_expr_dsl(e->lhs)) + " and " + paren(render_expr_dsl(e->rhs));
    case Op::Or: return paren(render_expr_dsl(e->lhs)) + " or " + paren(render_expr_dsl(e->rhs));
    default: {
      static const std::map<Op, std::string> ops = {
          {Op::Eq, "="}, {Op::Ne, "/="}, {Op::Lt, "<"},
          {Op::Le, "<="}, {Op::Gt, ">"}, {Op::Ge, ">="}};
      return render_expr_dsl(e->lhs) + " " + ops.at(e->op) + " " + render_expr_dsl(e->rhs);
    }
  }
}

inline std::string render_action_dsl(const std::vector<Assign>& as) {
  std::string s;
  for (size_t i = 0; i < as.size(); ++i) {
    if (i) s += " par ";
    s += as[i].lhs + " := " + render_expr_dsl(as[i].rhs);
  }
  return s;
}

}  // namespace parse_detail

inline std::string pretty_print(const Model& m) {
  using namespace parse_detail;
  std::string s = "machine " + m.name + "\n\n";
  for (const auto& v : m.variables)
    s += std::string(v.is_const ? "const " : "var ") + v.name + " : " +
         render_type(v.type) + " := " + render_value(v.init) + "\n";
  s += "\n";
  for (const auto& sm : m.statemachines) {
    s += "statemachine " + sm.name + " kind " +
         (sm.kind == MachineKind::Controller ? "controller" : "environment") +
         " initial " + sm.initial + "\n";
    for (const auto& st : sm.states) s += "  state " + st + "\n";
    for (const auto& t : sm.transitions) {
      s += "  transition " + t.name + " from " + t.source + " to " + t.target;
      if (t.user_guard) s += " when " + render_expr_dsl(t.user_guard);
      if (!t.user_actions.empty()) s += " then " + render_action_dsl(t.user_actions);
      s += "\n";
    }
    s += "end\n\n";
  }
  for (const auto& e : m.events) {
    s += "event " + e.name;
    if (!(e.guard->op == Expr::Op::Lit && e.guard->lit == Value{true}))
      s += " when " + render_expr_dsl(e.guard);
    if (!e.action.empty()) s += " then " + render_action_dsl(e.action);
    s += "\n";
  }
  for (const auto& b : m.store_bindings)
    s += "store bind " + b.store_var + " <-> " + b.module_var + "\n";
  s += "\ntaskbody";
  if (m.taskbody.periodic) s += " periodic";
  s += "\n";
  auto list = [&](const char* kw, const std::vector<std::string>& names) {
    if (names.empty()) return;
    s += std::string("  ") + kw + " ";
    for (size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    s += "\n";
  };
  list("init", m.taskbody.init_phase);
  list("eval", m.taskbody.eval_phase);
  list("send", m.taskbody.send_phase);
  list("read", m.taskbody.read_phase);
  for (const auto& o : m.taskbody.outputs) {
    s += "  output \"" + o.label + "\"";
    for (const auto& v : o.vars) s += " " + v;
    s += "\n";
  }
  s += "end\n";
  return s;
}

}  // namespace ebsm
