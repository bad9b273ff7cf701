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

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sosmc/model.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Expression AST. Model descriptors use the scalar core (literals, paths,
// time, arithmetic, comparisons, connectives, built-ins). Contract state
// expressions additionally use binder-relative paths and the collection
// primitives (allInstances + forAll / exists / select-size).
// ---------------------------------------------------------------------------

enum class BinaryOp {
  add, sub, mul, div,
  lt, le, gt, ge, eq, ne,
  logic_and, logic_or,
  fn_min, fn_max, fn_mod,
};

enum class UnaryOp { negate, logic_not, fn_abs, fn_floor };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LiteralExpr {
  Value value;
};

/// Reference to an attribute by path. Paths written in a component type's
/// commands are instance-relative until grounding prefixes them; a leading
/// `root.` anchor pins the path to the system root and survives grounding.
struct PathExpr {
  Path path;
  bool anchored = false;
};

/// Binder-relative attribute reference, e.g. `a.fuel` with binder `a`.
struct BinderPathExpr {
  std::string binder;
  Path attr_path;  // relative to the bound component
};

struct TimeExpr {};

/// The reserved uniform(0,1) sample symbol of custom observe functions.
struct USampleExpr {};

struct UnaryExpr {
  UnaryOp op;
  ExprPtr operand;
};

struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

/// `T.allInstances()->forAll(b | body)` / `->exists(b | body)`.
struct QuantifiedExpr {
  bool universal = true;
  std::string binder;
  std::string type_name;
  ExprPtr body;  // boolean
};

/// `T.allInstances()->select(b | pred)->size()`.
struct CountExpr {
  std::string binder;
  std::string type_name;
  ExprPtr predicate;  // boolean
};

struct Expr {
  std::variant<LiteralExpr, PathExpr, BinderPathExpr, TimeExpr, USampleExpr,
               UnaryExpr, BinaryExpr, QuantifiedExpr, CountExpr>
      node;
  SourceLoc loc;
};

ExprPtr make_expr(Expr e);

// Convenience constructors (used heavily by tests and the translators).
ExprPtr expr_literal(Value v);
ExprPtr expr_path(Path p, bool anchored = false);
ExprPtr expr_binder_path(std::string binder, Path attr_path);
ExprPtr expr_time();
ExprPtr expr_unary(UnaryOp op, ExprPtr e);
ExprPtr expr_binary(BinaryOp op, ExprPtr l, ExprPtr r);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Immutable chain of binder -> component-path bindings.
struct BinderScope {
  std::string binder;
  Path component_path;
  std::shared_ptr<const BinderScope> parent;

  static std::shared_ptr<const BinderScope> extend(
      std::shared_ptr<const BinderScope> parent, std::string binder,
      Path component_path);
  static const Path* lookup(const BinderScope* scope, const std::string& binder);
};

using BinderScopePtr = std::shared_ptr<const BinderScope>;

struct EvalContext {
  const SimulationState* state = nullptr;
  BinderScopePtr binders;
  const double* u_sample = nullptr;  // bound inside custom observe functions
};

/// Pure, deterministic evaluation. `time` reads state.time. Throws
/// path_not_found, type_mismatch, division_by_zero or unbound_binder.
Value eval_expr(const Expr& e, const EvalContext& ctx);
Value eval_expr(const Expr& e, const SimulationState& state);

/// Scalar operator semantics, shared with the property VM. Integer pairs
/// stay integral; mixed operands promote to real. Throws type_mismatch or
/// division_by_zero.
Value apply_binary_op(BinaryOp op, const Value& lhs, const Value& rhs);
Value apply_unary_op(UnaryOp op, const Value& operand);

// ---------------------------------------------------------------------------
// Static typing
// ---------------------------------------------------------------------------

struct TypeEnv {
  /// Resolves an absolute attribute path to its declared type, or nullopt
  /// if the path does not exist in the schema.
  std::function<std::optional<ValueType>(const Path&)> attribute_type;
  /// Resolves (component type, attribute path) for binder-relative refs.
  std::function<std::optional<ValueType>(const std::string& type_name,
                                         const Path&)>
      binder_attribute_type;
  /// True if the component type exists.
  std::function<bool(const std::string& type_name)> has_component_type;

  std::map<std::string, std::string> binder_types;  // binder -> component type
  bool allow_u = false;
  bool allow_collections = false;
  bool allow_time = true;
};

/// Infers the expression's type. Throws Error with kind type_mismatch,
/// unknown_path, unknown_component_type or unbound_binder.
ValueType infer_type(const Expr& e, const TypeEnv& env);

// ---------------------------------------------------------------------------
// Rewriting and printing
// ---------------------------------------------------------------------------

/// Grounds an instance-relative expression: plain paths get the instance
/// prefix, `root.`-anchored paths are kept absolute (anchor dropped).
ExprPtr ground_expr(const ExprPtr& e, const Path& instance_path);

/// Canonical text form; parses back to a structurally identical AST.
std::string print_expr(const Expr& e);

struct ExprParseOptions {
  bool allow_u = false;
  bool allow_collections = false;
  std::vector<std::string> binders;  // binders already in scope
};

/// Parses an expression in isolation (tests, tools). Throws syntax_error.
ExprPtr parse_expr(const std::string& text, const ExprParseOptions& opts = {});

}  // namespace sosmc
