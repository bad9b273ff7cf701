// Copyright 2026 The sosmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sosmc/bltl.hpp"

#include <algorithm>

#include "parse_util.hpp"

namespace sosmc {

FormulaPtr make_formula(Formula f) {
  return std::make_shared<const Formula>(std::move(f));
}
FormulaPtr f_atom(ExprPtr e) { return make_formula(Formula{AtomNode{std::move(e)}}); }
FormulaPtr f_quant(bool universal, std::string binder, std::string type_name,
                   FormulaPtr body) {
  return make_formula(Formula{
      QuantNode{universal, std::move(binder), std::move(type_name), std::move(body)}});
}
FormulaPtr f_not(FormulaPtr f) { return make_formula(Formula{NotNode{std::move(f)}}); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return make_formula(Formula{AndNode{std::move(a), std::move(b)}});
}
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return make_formula(Formula{OrNode{std::move(a), std::move(b)}});
}
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return make_formula(Formula{ImpliesNode{std::move(a), std::move(b)}});
}
FormulaPtr f_next(FormulaPtr f) { return make_formula(Formula{NextNode{std::move(f)}}); }
FormulaPtr f_finally(std::uint64_t bound, FormulaPtr f) {
  return make_formula(Formula{FinallyNode{bound, std::move(f)}});
}
FormulaPtr f_globally(std::uint64_t bound, FormulaPtr f) {
  return make_formula(Formula{GloballyNode{bound, std::move(f)}});
}
FormulaPtr f_until(std::uint64_t bound, FormulaPtr lhs, FormulaPtr rhs) {
  return make_formula(Formula{UntilNode{bound, std::move(lhs), std::move(rhs)}});
}

// ---------------------------------------------------------------------------
// Verdicts (Kleene three-valued logic)
// ---------------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "true";
    case Verdict::fails: return "false";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

Verdict verdict_not(Verdict v) {
  if (v == Verdict::holds) return Verdict::fails;
  if (v == Verdict::fails) return Verdict::holds;
  return Verdict::undecided;
}

Verdict verdict_and(Verdict a, Verdict b) {
  if (a == Verdict::fails || b == Verdict::fails) return Verdict::fails;
  if (a == Verdict::holds && b == Verdict::holds) return Verdict::holds;
  return Verdict::undecided;
}

Verdict verdict_or(Verdict a, Verdict b) {
  if (a == Verdict::holds || b == Verdict::holds) return Verdict::holds;
  if (a == Verdict::fails && b == Verdict::fails) return Verdict::fails;
  return Verdict::undecided;
}

Verdict verdict_implies(Verdict a, Verdict b) {
  return verdict_or(verdict_not(a), b);
}

// ---------------------------------------------------------------------------
// Window rule
// ---------------------------------------------------------------------------

std::uint64_t required_window(const Formula& f) {
  struct Visitor {
    std::uint64_t operator()(const AtomNode&) const { return 0; }
    std::uint64_t operator()(const QuantNode& n) const {
      return required_window(*n.body);
    }
    std::uint64_t operator()(const NotNode& n) const { return required_window(*n.f); }
    std::uint64_t operator()(const AndNode& n) const {
      return std::max(required_window(*n.lhs), required_window(*n.rhs));
    }
    std::uint64_t operator()(const OrNode& n) const {
      return std::max(required_window(*n.lhs), required_window(*n.rhs));
    }
    std::uint64_t operator()(const ImpliesNode& n) const {
      return std::max(required_window(*n.lhs), required_window(*n.rhs));
    }
    std::uint64_t operator()(const NextNode& n) const {
      return 1 + required_window(*n.f);
    }
    std::uint64_t operator()(const FinallyNode& n) const {
      return n.bound + required_window(*n.f);
    }
    std::uint64_t operator()(const GloballyNode& n) const {
      return n.bound + required_window(*n.f);
    }
    std::uint64_t operator()(const UntilNode& n) const {
      return n.bound + std::max(required_window(*n.lhs), required_window(*n.rhs));
    }
  };
  return std::visit(Visitor{}, f.node);
}

// ---------------------------------------------------------------------------
// Static checks
// ---------------------------------------------------------------------------

namespace {

void check_walk(const Formula& f, const ModelSchema& schema,
                std::map<std::string, std::string>& binder_types) {
  if (const auto* atom = std::get_if<AtomNode>(&f.node)) {
    TypeEnv env = schema.env(/*allow_collections=*/true);
    env.binder_types = binder_types;
    ValueType t = infer_type(*atom->expr, env);
    if (t != ValueType::boolean)
      fail(ErrorKind::type_mismatch,
           "atom '" + print_expr(*atom->expr) + "' must be boolean, is " +
               value_type_name(t));
    return;
  }
  if (const auto* q = std::get_if<QuantNode>(&f.node)) {
    if (!schema.has_type(q->type_name))
      fail(ErrorKind::unknown_component_type,
           "unknown component type '" + q->type_name + "'");
    auto previous = binder_types.find(q->binder);
    if (previous != binder_types.end())
      fail(ErrorKind::unbound_binder, "binder '" + q->binder + "' is already bound");
    binder_types[q->binder] = q->type_name;
    check_walk(*q->body, schema, binder_types);
    binder_types.erase(q->binder);
    return;
  }
  if (const auto* n = std::get_if<NotNode>(&f.node))
    return check_walk(*n->f, schema, binder_types);
  if (const auto* a = std::get_if<AndNode>(&f.node)) {
    check_walk(*a->lhs, schema, binder_types);
    check_walk(*a->rhs, schema, binder_types);
    return;
  }
  if (const auto* o = std::get_if<OrNode>(&f.node)) {
    check_walk(*o->lhs, schema, binder_types);
    check_walk(*o->rhs, schema, binder_types);
    return;
  }
  if (const auto* i = std::get_if<ImpliesNode>(&f.node)) {
    check_walk(*i->lhs, schema, binder_types);
    check_walk(*i->rhs, schema, binder_types);
    return;
  }
  if (const auto* x = std::get_if<NextNode>(&f.node))
    return check_walk(*x->f, schema, binder_types);
  if (const auto* fi = std::get_if<FinallyNode>(&f.node))
    return check_walk(*fi->f, schema, binder_types);
  if (const auto* g = std::get_if<GloballyNode>(&f.node))
    return check_walk(*g->f, schema, binder_types);
  const auto& u = std::get<UntilNode>(f.node);
  check_walk(*u.lhs, schema, binder_types);
  check_walk(*u.rhs, schema, binder_types);
}

}  // namespace

void check_formula(const Formula& f, const ModelSchema& schema) {
  std::map<std::string, std::string> binder_types;
  check_walk(f, schema, binder_types);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string print_formula(const Formula& f) {
  struct Visitor {
    std::string operator()(const AtomNode& n) const { return print_expr(*n.expr); }
    std::string operator()(const QuantNode& n) const {
      return std::string(n.universal ? "forall " : "exists ") + n.binder + " in " +
             n.type_name + " : (" + print_formula(*n.body) + ")";
    }
    std::string operator()(const NotNode& n) const {
      return "not (" + print_formula(*n.f) + ")";
    }
    std::string operator()(const AndNode& n) const {
      return "(" + print_formula(*n.lhs) + ") and (" + print_formula(*n.rhs) + ")";
    }
    std::string operator()(const OrNode& n) const {
      return "(" + print_formula(*n.lhs) + ") or (" + print_formula(*n.rhs) + ")";
    }
    std::string operator()(const ImpliesNode& n) const {
      return "(" + print_formula(*n.lhs) + ") -> (" + print_formula(*n.rhs) + ")";
    }
    std::string operator()(const NextNode& n) const {
      return "X (" + print_formula(*n.f) + ")";
    }
    std::string operator()(const FinallyNode& n) const {
      return "F<=" + std::to_string(n.bound) + " (" + print_formula(*n.f) + ")";
    }
    std::string operator()(const GloballyNode& n) const {
      return "G<=" + std::to_string(n.bound) + " (" + print_formula(*n.f) + ")";
    }
    std::string operator()(const UntilNode& n) const {
      return "(" + print_formula(*n.lhs) + ") U<=" + std::to_string(n.bound) + " (" +
             print_formula(*n.rhs) + ")";
    }
  };
  return std::visit(Visitor{}, f.node);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

using detail::Tok;
using detail::TokenStream;

// `G`, `F`, `X`, `U`, `forall`, `exists`, `not`, `and`, `or` are reserved
// words of the property grammar. A parenthesized group is parsed as a
// state expression when it can be, as a sub-formula otherwise.
struct FormulaParser {
  TokenStream& ts;
  std::vector<std::string> binders;

  std::uint64_t expect_bound() {
    ts.expect_sym("<=");
    std::int64_t b = ts.expect_int("time bound");
    if (b < 0) detail::syntax_fail(ts.peek().loc, "time bound must be >= 0");
    return static_cast<std::uint64_t>(b);
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (ts.accept_sym("->")) return f_implies(lhs, parse_implies());
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (ts.at_ident("or") && !binder_shadows("or")) {
      ts.next();
      lhs = f_or(lhs, parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_until();
    while (ts.at_ident("and") && !binder_shadows("and")) {
      ts.next();
      lhs = f_and(lhs, parse_until());
    }
    return lhs;
  }

  FormulaPtr parse_until() {
    FormulaPtr lhs = parse_unary();
    if (ts.at_ident("U")) {
      ts.next();
      std::uint64_t bound = expect_bound();
      return f_until(bound, lhs, parse_unary());
    }
    return lhs;
  }

  bool binder_shadows(const std::string& name) const {
    return std::find(binders.begin(), binders.end(), name) != binders.end();
  }

  FormulaPtr parse_unary() {
    if (ts.at_ident("not") && !binder_shadows("not")) {
      ts.next();
      return f_not(parse_unary());
    }
    if (ts.at_ident("G") && ts.peek(1).kind == Tok::sym && ts.peek(1).text == "<=") {
      ts.next();
      std::uint64_t bound = expect_bound();
      return f_globally(bound, parse_unary());
    }
    if (ts.at_ident("F") && ts.peek(1).kind == Tok::sym && ts.peek(1).text == "<=") {
      ts.next();
      std::uint64_t bound = expect_bound();
      return f_finally(bound, parse_unary());
    }
    if (ts.at_ident("X")) {
      ts.next();
      return f_next(parse_unary());
    }
    if (ts.at_ident("forall") || ts.at_ident("exists")) {
      bool universal = ts.next().text == "forall";
      std::string binder = ts.expect_any_ident("binder name");
      ts.expect_ident("in");
      std::string type_name = ts.expect_any_ident("component type");
      ts.expect_sym(":");
      binders.push_back(binder);
      FormulaPtr body = parse_implies();
      binders.pop_back();
      return f_quant(universal, std::move(binder), std::move(type_name), std::move(body));
    }
    return parse_primary();
  }

  ExprPtr parse_atom_expr(bool comparison_level) {
    detail::ExprParserOptions opts;
    opts.allow_collections = true;
    detail::ExprParser ep(ts, opts);
    for (const auto& b : binders) ep.push_binder(b);
    return comparison_level ? ep.parse_comparison_level() : ep.parse();
  }

  static bool expr_continues(const TokenStream& ts) {
    static const char* ops[] = {"+", "-", "*", "/", "<", "<=",
                                ">", ">=", "=", "==", "!="};
    for (const char* op : ops)
      if (ts.at_sym(op)) return true;
    return false;
  }

  FormulaPtr parse_primary() {
    if (ts.at_sym("(")) {
      std::size_t mark = ts.position();
      // expression first: `(x + 1) > 0` and friends
      try {
        ExprPtr e = parse_atom_expr(/*comparison_level=*/false);
        if (!expr_continues(ts)) return f_atom(std::move(e));
      } catch (const Error&) {
      }
      ts.rewind(mark);
      // comparison that merely starts with a parenthesized operand
      try {
        ExprPtr e = parse_atom_expr(/*comparison_level=*/true);
        return f_atom(std::move(e));
      } catch (const Error&) {
      }
      ts.rewind(mark);
      ts.expect_sym("(");
      FormulaPtr f = parse_implies();
      ts.expect_sym(")");
      return f;
    }
    return f_atom(parse_atom_expr(/*comparison_level=*/true));
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  TokenStream ts(detail::tokenize(text));
  FormulaParser parser{ts, {}};
  FormulaPtr f = parser.parse_implies();
  if (!ts.at_end())
    detail::syntax_fail(ts.peek().loc,
                        "trailing input after formula: '" + ts.peek().text + "'");
  return f;
}

}  // namespace sosmc
