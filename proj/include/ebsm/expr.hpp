// Guard/action expression trees. Immutable, shared by pointer.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ebsm/value.hpp"

namespace ebsm {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Lit, Var, Eq, Ne, Lt, Le, Gt, Ge, Not, And, Or };

  Op op = Op::Lit;
  Value lit{false};   // Lit
  std::string var;    // Var
  ExprPtr lhs, rhs;   // binary ops; Not uses lhs only

  static ExprPtr literal(Value v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Lit;
    e->lit = std::move(v);
    return e;
  }
  static ExprPtr variable(std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->var = std::move(name);
    return e;
  }
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
  static ExprPtr negation(ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Not;
    e->lhs = std::move(x);
    return e;
  }
  static ExprPtr conjunction(ExprPtr l, ExprPtr r) {
    return binary(Op::And, std::move(l), std::move(r));
  }

  bool is_comparison() const {
    return op == Op::Eq || op == Op::Ne || op == Op::Lt || op == Op::Le ||
           op == Op::Gt || op == Op::Ge;
  }
};

struct Assign {
  std::string lhs;
  ExprPtr rhs;
};

/// Collect the free variables of an expression (enum literals are not
/// variables; resolution happened at parse time).
inline void free_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->op == Expr::Op::Var) {
    for (const auto& v : out)
      if (v == e->var) return;
    out.push_back(e->var);
    return;
  }
  free_vars(e->lhs, out);
  free_vars(e->rhs, out);
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Expr::Op::Lit: return a->lit == b->lit;
    case Expr::Op::Var: return a->var == b->var;
    case Expr::Op::Not: return expr_equal(a->lhs, b->lhs);
    default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

}  // namespace ebsm
