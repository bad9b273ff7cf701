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

#include "sosmc/expr.hpp"

#include <cmath>

namespace sosmc {

ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr expr_literal(Value v) { return make_expr(Expr{LiteralExpr{std::move(v)}, {}}); }
ExprPtr expr_path(Path p, bool anchored) {
  return make_expr(Expr{PathExpr{std::move(p), anchored}, {}});
}
ExprPtr expr_binder_path(std::string binder, Path attr_path) {
  return make_expr(Expr{BinderPathExpr{std::move(binder), std::move(attr_path)}, {}});
}
ExprPtr expr_time() { return make_expr(Expr{TimeExpr{}, {}}); }
ExprPtr expr_unary(UnaryOp op, ExprPtr e) {
  return make_expr(Expr{UnaryExpr{op, std::move(e)}, {}});
}
ExprPtr expr_binary(BinaryOp op, ExprPtr l, ExprPtr r) {
  return make_expr(Expr{BinaryExpr{op, std::move(l), std::move(r)}, {}});
}

// ---------------------------------------------------------------------------
// Binder scopes
// ---------------------------------------------------------------------------

BinderScopePtr BinderScope::extend(BinderScopePtr parent, std::string binder,
                                   Path component_path) {
  auto node = std::make_shared<BinderScope>();
  node->binder = std::move(binder);
  node->component_path = std::move(component_path);
  node->parent = std::move(parent);
  return node;
}

const Path* BinderScope::lookup(const BinderScope* scope, const std::string& binder) {
  for (; scope; scope = scope->parent.get())
    if (scope->binder == binder) return &scope->component_path;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Signed arithmetic through unsigned casts; wraparound instead of UB.
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}

bool both_int(const Value& a, const Value& b) {
  return a.is_integer() && b.is_integer();
}

Value arith(BinaryOp op, const Value& a, const Value& b) {
  if (!a.is_numeric() || !b.is_numeric())
    fail(ErrorKind::type_mismatch, "arithmetic on non-numeric operands");
  switch (op) {
    case BinaryOp::add:
      if (both_int(a, b)) return Value(wrap_add(a.as_integer(), b.as_integer()));
      return Value(a.as_real() + b.as_real());
    case BinaryOp::sub:
      if (both_int(a, b)) return Value(wrap_sub(a.as_integer(), b.as_integer()));
      return Value(a.as_real() - b.as_real());
    case BinaryOp::mul:
      if (both_int(a, b)) return Value(wrap_mul(a.as_integer(), b.as_integer()));
      return Value(a.as_real() * b.as_real());
    case BinaryOp::div:
      if (both_int(a, b)) {
        if (b.as_integer() == 0) fail(ErrorKind::division_by_zero, "integer division by zero");
        if (b.as_integer() == -1 && a.as_integer() == INT64_MIN)
          return Value(INT64_MIN);  // wraparound quotient
        return Value(a.as_integer() / b.as_integer());
      }
      if (b.as_real() == 0.0) fail(ErrorKind::division_by_zero, "division by zero");
      return Value(a.as_real() / b.as_real());
    case BinaryOp::fn_min:
      if (both_int(a, b)) return Value(std::min(a.as_integer(), b.as_integer()));
      return Value(std::min(a.as_real(), b.as_real()));
    case BinaryOp::fn_max:
      if (both_int(a, b)) return Value(std::max(a.as_integer(), b.as_integer()));
      return Value(std::max(a.as_real(), b.as_real()));
    case BinaryOp::fn_mod: {
      if (!both_int(a, b))
        fail(ErrorKind::type_mismatch, "mod expects integer operands");
      if (b.as_integer() == 0) fail(ErrorKind::division_by_zero, "mod by zero");
      if (b.as_integer() == -1) return Value(std::int64_t{0});
      return Value(a.as_integer() % b.as_integer());
    }
    default:
      fail(ErrorKind::internal_error, "arith: unexpected op");
  }
}

Value compare(BinaryOp op, const Value& a, const Value& b) {
  int cmp;
  if (a.is_numeric() && b.is_numeric()) {
    if (both_int(a, b)) {
      auto x = a.as_integer(), y = b.as_integer();
      cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else {
      auto x = a.as_real(), y = b.as_real();
      cmp = x < y ? -1 : (x > y ? 1 : 0);
    }
  } else if (a.is_string() && b.is_string()) {
    cmp = a.as_string().compare(b.as_string());
    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
  } else if (a.is_boolean() && b.is_boolean()) {
    if (op != BinaryOp::eq && op != BinaryOp::ne)
      fail(ErrorKind::type_mismatch, "booleans support only = and !=");
    cmp = a.as_boolean() == b.as_boolean() ? 0 : 1;
  } else {
    fail(ErrorKind::type_mismatch,
         std::string("cannot compare ") + value_type_name(a.type()) + " with " +
             value_type_name(b.type()));
  }
  switch (op) {
    case BinaryOp::lt: return Value(cmp < 0);
    case BinaryOp::le: return Value(cmp <= 0);
    case BinaryOp::gt: return Value(cmp > 0);
    case BinaryOp::ge: return Value(cmp >= 0);
    case BinaryOp::eq: return Value(cmp == 0);
    case BinaryOp::ne: return Value(cmp != 0);
    default:
      fail(ErrorKind::internal_error, "compare: unexpected op");
  }
}

std::int64_t floor_to_int(const Value& v) {
  if (v.is_integer()) return v.as_integer();
  double f = std::floor(v.as_real());
  if (!(f >= -9.3e18 && f <= 9.2e18))
    fail(ErrorKind::domain_error, "floor result out of integer range");
  return static_cast<std::int64_t>(f);
}

}  // namespace

Value apply_binary_op(BinaryOp op, const Value& lhs, const Value& rhs) {
  switch (op) {
    case BinaryOp::lt: case BinaryOp::le: case BinaryOp::gt:
    case BinaryOp::ge: case BinaryOp::eq: case BinaryOp::ne:
      return compare(op, lhs, rhs);
    case BinaryOp::logic_and:
      return Value(lhs.as_boolean() && rhs.as_boolean());
    case BinaryOp::logic_or:
      return Value(lhs.as_boolean() || rhs.as_boolean());
    default:
      return arith(op, lhs, rhs);
  }
}

Value apply_unary_op(UnaryOp op, const Value& v) {
  switch (op) {
    case UnaryOp::negate:
      if (v.is_integer()) return Value(wrap_sub(0, v.as_integer()));
      return Value(-v.as_real());
    case UnaryOp::logic_not:
      return Value(!v.as_boolean());
    case UnaryOp::fn_abs:
      if (v.is_integer())
        return Value(v.as_integer() < 0 ? wrap_sub(0, v.as_integer()) : v.as_integer());
      return Value(std::fabs(v.as_real()));
    case UnaryOp::fn_floor:
      return Value(floor_to_int(v));
  }
  fail(ErrorKind::internal_error, "unary: unexpected op");
}

Value eval_expr(const Expr& e, const EvalContext& ctx) {
  struct Visitor {
    const EvalContext& ctx;

    Value operator()(const LiteralExpr& n) const { return n.value; }

    Value operator()(const PathExpr& n) const {
      return resolve_attribute(*ctx.state, n.path);
    }

    Value operator()(const BinderPathExpr& n) const {
      const Path* base = BinderScope::lookup(ctx.binders.get(), n.binder);
      if (!base)
        fail(ErrorKind::unbound_binder, "binder '" + n.binder + "' is not in scope");
      return resolve_attribute(*ctx.state, n.attr_path.prefixed_with(*base));
    }

    Value operator()(const TimeExpr&) const {
      return Value(static_cast<std::int64_t>(ctx.state->time));
    }

    Value operator()(const USampleExpr&) const {
      if (!ctx.u_sample)
        fail(ErrorKind::unbound_binder,
             "'u' is only available inside custom observe functions");
      return Value(*ctx.u_sample);
    }

    Value operator()(const UnaryExpr& n) const {
      return apply_unary_op(n.op, eval_expr(*n.operand, ctx));
    }

    Value operator()(const BinaryExpr& n) const {
      // short-circuit connectives
      if (n.op == BinaryOp::logic_and) {
        if (!eval_expr(*n.lhs, ctx).as_boolean()) return Value(false);
        return Value(eval_expr(*n.rhs, ctx).as_boolean());
      }
      if (n.op == BinaryOp::logic_or) {
        if (eval_expr(*n.lhs, ctx).as_boolean()) return Value(true);
        return Value(eval_expr(*n.rhs, ctx).as_boolean());
      }
      return apply_binary_op(n.op, eval_expr(*n.lhs, ctx), eval_expr(*n.rhs, ctx));
    }

    Value operator()(const QuantifiedExpr& n) const {
      auto instances = instances_of_type(*ctx.state, n.type_name);
      for (const auto& inst : instances) {
        EvalContext inner = ctx;
        inner.binders = BinderScope::extend(ctx.binders, n.binder, inst.path);
        bool v = eval_expr(*n.body, inner).as_boolean();
        if (n.universal && !v) return Value(false);
        if (!n.universal && v) return Value(true);
      }
      return Value(n.universal);  // forAll over empty -> true, exists -> false
    }

    Value operator()(const CountExpr& n) const {
      auto instances = instances_of_type(*ctx.state, n.type_name);
      std::int64_t count = 0;
      for (const auto& inst : instances) {
        EvalContext inner = ctx;
        inner.binders = BinderScope::extend(ctx.binders, n.binder, inst.path);
        if (eval_expr(*n.predicate, inner).as_boolean()) ++count;
      }
      return Value(count);
    }
  };
  return std::visit(Visitor{ctx}, e.node);
}

Value eval_expr(const Expr& e, const SimulationState& state) {
  EvalContext ctx;
  ctx.state = &state;
  return eval_expr(e, ctx);
}

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

namespace {

bool numeric(ValueType t) {
  return t == ValueType::integer || t == ValueType::real;
}

ValueType promote(ValueType a, ValueType b) {
  return (a == ValueType::real || b == ValueType::real) ? ValueType::real
                                                        : ValueType::integer;
}

}  // namespace

ValueType infer_type(const Expr& e, const TypeEnv& env) {
  struct Visitor {
    const TypeEnv& env;

    ValueType operator()(const LiteralExpr& n) const { return n.value.type(); }

    ValueType operator()(const PathExpr& n) const {
      auto t = env.attribute_type ? env.attribute_type(n.path) : std::nullopt;
      if (!t)
        fail(ErrorKind::unknown_path, "no attribute at path '" + n.path.str() + "'");
      return *t;
    }

    ValueType operator()(const BinderPathExpr& n) const {
      auto it = env.binder_types.find(n.binder);
      if (it == env.binder_types.end())
        fail(ErrorKind::unbound_binder, "binder '" + n.binder + "' is not in scope");
      auto t = env.binder_attribute_type
                   ? env.binder_attribute_type(it->second, n.attr_path)
                   : std::nullopt;
      if (!t)
        fail(ErrorKind::unknown_path,
             "type '" + it->second + "' has no attribute '" + n.attr_path.str() + "'");
      return *t;
    }

    ValueType operator()(const TimeExpr&) const {
      if (!env.allow_time)
        fail(ErrorKind::type_mismatch, "'time' is not available in this context");
      return ValueType::integer;
    }

    ValueType operator()(const USampleExpr&) const {
      if (!env.allow_u)
        fail(ErrorKind::type_mismatch,
             "'u' is only available inside custom observe functions");
      return ValueType::real;
    }

    ValueType operator()(const UnaryExpr& n) const {
      ValueType t = infer_type(*n.operand, env);
      switch (n.op) {
        case UnaryOp::negate:
          if (!numeric(t)) fail(ErrorKind::type_mismatch, "unary '-' expects a number");
          return t;
        case UnaryOp::logic_not:
          if (t != ValueType::boolean)
            fail(ErrorKind::type_mismatch, "'not' expects a boolean");
          return ValueType::boolean;
        case UnaryOp::fn_abs:
          if (!numeric(t)) fail(ErrorKind::type_mismatch, "abs expects a number");
          return t;
        case UnaryOp::fn_floor:
          if (!numeric(t)) fail(ErrorKind::type_mismatch, "floor expects a number");
          return ValueType::integer;
      }
      fail(ErrorKind::internal_error, "unary type: unexpected op");
    }

    ValueType operator()(const BinaryExpr& n) const {
      ValueType a = infer_type(*n.lhs, env);
      ValueType b = infer_type(*n.rhs, env);
      switch (n.op) {
        case BinaryOp::add: case BinaryOp::sub: case BinaryOp::mul:
        case BinaryOp::div: case BinaryOp::fn_min: case BinaryOp::fn_max:
          if (!numeric(a) || !numeric(b))
            fail(ErrorKind::type_mismatch, "arithmetic on non-numeric operands");
          return promote(a, b);
        case BinaryOp::fn_mod:
          if (a != ValueType::integer || b != ValueType::integer)
            fail(ErrorKind::type_mismatch, "mod expects integer operands");
          return ValueType::integer;
        case BinaryOp::lt: case BinaryOp::le: case BinaryOp::gt: case BinaryOp::ge:
          if (!((numeric(a) && numeric(b)) ||
                (a == ValueType::string && b == ValueType::string)))
            fail(ErrorKind::type_mismatch, "ordering needs two numbers or two strings");
          return ValueType::boolean;
        case BinaryOp::eq: case BinaryOp::ne:
          if (!(a == b || (numeric(a) && numeric(b))))
            fail(ErrorKind::type_mismatch,
                 std::string("cannot compare ") + value_type_name(a) + " with " +
                     value_type_name(b));
          return ValueType::boolean;
        case BinaryOp::logic_and: case BinaryOp::logic_or:
          if (a != ValueType::boolean || b != ValueType::boolean)
            fail(ErrorKind::type_mismatch, "'and'/'or' expect booleans");
          return ValueType::boolean;
      }
      fail(ErrorKind::internal_error, "binary type: unexpected op");
    }

    ValueType operator()(const QuantifiedExpr& n) const {
      if (!env.allow_collections)
        fail(ErrorKind::type_mismatch,
             "collection expressions are not allowed in this context");
      if (env.has_component_type && !env.has_component_type(n.type_name))
        fail(ErrorKind::unknown_component_type,
             "unknown component type '" + n.type_name + "'");
      TypeEnv inner = env;
      inner.binder_types[n.binder] = n.type_name;
      if (infer_type(*n.body, inner) != ValueType::boolean)
        fail(ErrorKind::type_mismatch, "quantifier body must be boolean");
      return ValueType::boolean;
    }

    ValueType operator()(const CountExpr& n) const {
      if (!env.allow_collections)
        fail(ErrorKind::type_mismatch,
             "collection expressions are not allowed in this context");
      if (env.has_component_type && !env.has_component_type(n.type_name))
        fail(ErrorKind::unknown_component_type,
             "unknown component type '" + n.type_name + "'");
      TypeEnv inner = env;
      inner.binder_types[n.binder] = n.type_name;
      if (infer_type(*n.predicate, inner) != ValueType::boolean)
        fail(ErrorKind::type_mismatch, "select predicate must be boolean");
      return ValueType::integer;
    }
  };
  return std::visit(Visitor{env}, e.node);
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

ExprPtr ground_expr(const ExprPtr& e, const Path& instance_path) {
  struct Visitor {
    const Path& base;
    const ExprPtr& self;

    ExprPtr operator()(const LiteralExpr&) const { return self; }
    ExprPtr operator()(const TimeExpr&) const { return self; }
    ExprPtr operator()(const USampleExpr&) const { return self; }
    ExprPtr operator()(const BinderPathExpr&) const { return self; }

    ExprPtr operator()(const PathExpr& n) const {
      if (n.anchored) return make_expr(Expr{PathExpr{n.path, false}, self->loc});
      return make_expr(Expr{PathExpr{n.path.prefixed_with(base), false}, self->loc});
    }

    ExprPtr operator()(const UnaryExpr& n) const {
      return make_expr(Expr{UnaryExpr{n.op, ground_expr(n.operand, base)}, self->loc});
    }

    ExprPtr operator()(const BinaryExpr& n) const {
      return make_expr(Expr{
          BinaryExpr{n.op, ground_expr(n.lhs, base), ground_expr(n.rhs, base)},
          self->loc});
    }

    ExprPtr operator()(const QuantifiedExpr& n) const {
      return make_expr(Expr{
          QuantifiedExpr{n.universal, n.binder, n.type_name, ground_expr(n.body, base)},
          self->loc});
    }

    ExprPtr operator()(const CountExpr& n) const {
      return make_expr(Expr{
          CountExpr{n.binder, n.type_name, ground_expr(n.predicate, base)}, self->loc});
    }
  };
  return std::visit(Visitor{instance_path, e}, e->node);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

const char* binop_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "=";
    case BinaryOp::ne: return "!=";
    case BinaryOp::logic_and: return "and";
    case BinaryOp::logic_or: return "or";
    default: return "?";
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  struct Visitor {
    std::string operator()(const LiteralExpr& n) const { return n.value.str(); }
    std::string operator()(const PathExpr& n) const {
      return n.anchored ? "root." + n.path.str() : n.path.str();
    }
    std::string operator()(const BinderPathExpr& n) const {
      return n.binder + "." + n.attr_path.str();
    }
    std::string operator()(const TimeExpr&) const { return "time"; }
    std::string operator()(const USampleExpr&) const { return "u"; }
    std::string operator()(const UnaryExpr& n) const {
      switch (n.op) {
        case UnaryOp::negate: return "(-" + print_expr(*n.operand) + ")";
        case UnaryOp::logic_not: return "(not " + print_expr(*n.operand) + ")";
        case UnaryOp::fn_abs: return "abs(" + print_expr(*n.operand) + ")";
        case UnaryOp::fn_floor: return "floor(" + print_expr(*n.operand) + ")";
      }
      return "?";
    }
    std::string operator()(const BinaryExpr& n) const {
      switch (n.op) {
        case BinaryOp::fn_min:
          return "min(" + print_expr(*n.lhs) + ", " + print_expr(*n.rhs) + ")";
        case BinaryOp::fn_max:
          return "max(" + print_expr(*n.lhs) + ", " + print_expr(*n.rhs) + ")";
        case BinaryOp::fn_mod:
          return "mod(" + print_expr(*n.lhs) + ", " + print_expr(*n.rhs) + ")";
        default:
          return "(" + print_expr(*n.lhs) + " " + binop_text(n.op) + " " +
                 print_expr(*n.rhs) + ")";
      }
    }
    std::string operator()(const QuantifiedExpr& n) const {
      return n.type_name + ".allInstances()->" +
             (n.universal ? "forAll" : "exists") + "(" + n.binder + " | " +
             print_expr(*n.body) + ")";
    }
    std::string operator()(const CountExpr& n) const {
      return n.type_name + ".allInstances()->select(" + n.binder + " | " +
             print_expr(*n.predicate) + ")->size()";
    }
  };
  return std::visit(Visitor{}, e.node);
}

}  // namespace sosmc
