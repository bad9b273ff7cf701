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

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sosmc/descriptor.hpp"
#include "sosmc/expr.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Bounded LTL over simulation states. Temporal bounds count steps; one
// state is one time unit. Quantified atoms re-bind over the instance
// collection of the state they are evaluated at, so open systems with
// appearing/disappearing components are handled per state.
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct AtomNode { ExprPtr expr; };  // boolean state expression
struct QuantNode {
  bool universal = true;
  std::string binder;
  std::string type_name;
  FormulaPtr body;
};
struct NotNode { FormulaPtr f; };
struct AndNode { FormulaPtr lhs, rhs; };
struct OrNode { FormulaPtr lhs, rhs; };
struct ImpliesNode { FormulaPtr lhs, rhs; };
struct NextNode { FormulaPtr f; };
struct FinallyNode { std::uint64_t bound; FormulaPtr f; };
struct GloballyNode { std::uint64_t bound; FormulaPtr f; };
struct UntilNode { std::uint64_t bound; FormulaPtr lhs, rhs; };

struct Formula {
  std::variant<AtomNode, QuantNode, NotNode, AndNode, OrNode, ImpliesNode,
               NextNode, FinallyNode, GloballyNode, UntilNode>
      node;
};

FormulaPtr make_formula(Formula f);
FormulaPtr f_atom(ExprPtr e);
FormulaPtr f_quant(bool universal, std::string binder, std::string type_name,
                   FormulaPtr body);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_next(FormulaPtr f);
FormulaPtr f_finally(std::uint64_t bound, FormulaPtr f);
FormulaPtr f_globally(std::uint64_t bound, FormulaPtr f);
FormulaPtr f_until(std::uint64_t bound, FormulaPtr lhs, FormulaPtr rhs);

/// Three-valued verdict; the top-level verdict is monotone: once decided
/// it never changes on further states.
enum class Verdict : std::uint8_t { undecided = 0, holds = 1, fails = 2 };

const char* verdict_name(Verdict v);
Verdict verdict_not(Verdict v);
Verdict verdict_and(Verdict a, Verdict b);  // Kleene: false wins
Verdict verdict_or(Verdict a, Verdict b);   // Kleene: true wins
Verdict verdict_implies(Verdict a, Verdict b);
inline Verdict verdict_of(bool b) { return b ? Verdict::holds : Verdict::fails; }

/// Steps beyond the evaluation point a monitor may need: the maximum
/// nested sum of time bounds. A buffer of required_window(f)+1 states
/// decides f on stutter-extended traces.
std::uint64_t required_window(const Formula& f);

/// Type-checks every atom (boolean, against the schema) and binder.
/// Throws type_mismatch, unknown_path, unknown_component_type.
void check_formula(const Formula& f, const ModelSchema& schema);

/// Canonical text form, e.g. `G<=100 (forall a in Ambulance : (a.fuel > 0))`.
std::string print_formula(const Formula& f);

/// Parses the textual form. Grammar (loosest binding last):
///   f := 'forall' ID 'in' TYPE ':' f | 'exists' ID 'in' TYPE ':' f
///      | 'not' f | 'G' '<=' N f | 'F' '<=' N f | 'X' f
///      | f 'U' '<=' N f | f 'and' f | f 'or' f | f '->' f
///      | '(' f ')' | atom-expression
/// Throws syntax_error.
FormulaPtr parse_formula(const std::string& text);

}  // namespace sosmc
