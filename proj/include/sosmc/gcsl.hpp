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

#include <string>
#include <vector>

#include "sosmc/bltl.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Contract language: OCL-style quantifier prefixes wrapped around timed
// requirement patterns. Pattern keywords are case-insensitive. State
// expressions may use binder-relative paths and the collection
// primitives (allInstances + forAll / exists / select-size).
//
//   P1  whenever [P] occurs [Q] holds during following [t]
//   P2  whenever [P] occurs [Q] occurs within [t]
//   P3  [P] holds during [t]
// ---------------------------------------------------------------------------

enum class PatternKind {
  response_hold,    // P1
  response_within,  // P2
  invariant,        // P3
};

struct GcslQuantifier {
  bool universal = true;
  std::string binder;
  std::string type_name;
};

struct GcslAst {
  std::vector<GcslQuantifier> prefix;  // outermost first
  PatternKind pattern = PatternKind::invariant;
  ExprPtr trigger;    // P
  ExprPtr response;   // Q (null for P3)
  std::uint64_t bound = 0;
};

/// Parses one contract. Throws syntax_error / unknown_pattern /
/// unbound_binder with source locations.
GcslAst parse_gcsl(const std::string& text);

/// Canonical contract text (parses back to an equal AST).
std::string print_gcsl(const GcslAst& ast);

/// Type-checks binders and state expressions against the schema.
void check_gcsl(const GcslAst& ast, const ModelSchema& schema);

/// Translation to bounded LTL over the analysis horizon:
///   P1 -> G<=(horizon-t) ( Q* ( P -> G<=t Q ) )
///   P2 -> G<=(horizon-t) ( Q* ( P -> F<=t Q ) )
///   P3 -> G<=t ( Q* P )
/// where Q* is the quantifier prefix, re-bound at every evaluation state
/// (instances may appear and disappear in open systems). Throws
/// horizon_too_small when horizon < t.
FormulaPtr translate_to_bltl(const GcslAst& ast, std::uint64_t horizon);

}  // namespace sosmc
