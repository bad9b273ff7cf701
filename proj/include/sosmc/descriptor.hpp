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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sosmc/expr.hpp"
#include "sosmc/stochastic.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Parsed `.sosd` system descriptor. Component types declare attributes,
// random variables and simple commands; the system block declares the
// instance tree, relations and the open/closed flag. Commands are written
// once per type and grounded once per instance at build time.
// ---------------------------------------------------------------------------

struct AttributeDecl {
  std::string name;
  ValueType declared_type = ValueType::integer;
  ExprPtr init;
  SourceLoc loc;
};

struct RandomVariableDecl {
  std::string name;
  DistributionSpec spec;
  SourceLoc loc;
};

// Action declarations; paths are instance-relative unless `root.`-anchored.
struct AssignDecl {
  Path target;
  bool target_anchored = false;
  ExprPtr rhs;
};
struct ObserveAssignDecl {
  Path target;
  bool target_anchored = false;
  std::string rv_name;
};
struct SpawnDecl {
  std::string base_name;
  std::string type_name;
  Path parent;                  // empty: spawn under the owning instance
  bool parent_anchored = false;
};
struct DespawnDecl {
  Path target;
  bool target_anchored = false;
};
using ActionDecl = std::variant<AssignDecl, ObserveAssignDecl, SpawnDecl, DespawnDecl>;

struct CommandDecl {
  std::string name;
  ExprPtr guard;
  ExprPtr rate;
  std::vector<ActionDecl> actions;
  SourceLoc loc;
};

struct TypeDecl {
  std::string name;
  std::vector<AttributeDecl> attributes;
  std::vector<RandomVariableDecl> random_variables;
  std::vector<CommandDecl> commands;
  SourceLoc loc;

  const AttributeDecl* find_attribute(const std::string& n) const;
  const RandomVariableDecl* find_random_variable(const std::string& n) const;
};

struct InstanceDecl {
  std::string name;
  std::string type_name;
  Path parent;  // empty: directly under the system root
  SourceLoc loc;
};

struct RelationDecl {
  std::string name;
  Path from;  // absolute instance paths; endpoints must be siblings
  Path to;
  SourceLoc loc;
};

struct ModelDefinition {
  std::vector<TypeDecl> types;
  std::vector<InstanceDecl> instances;
  std::vector<RelationDecl> relations;
  bool open = false;
  std::vector<Diagnostic> diagnostics;  // accumulated while parsing

  const TypeDecl* find_type(const std::string& name) const;
};

/// Parses descriptor text. Total: syntax problems become error
/// diagnostics on the returned definition, never exceptions.
ModelDefinition parse_descriptor(const std::string& text);

/// Type-checks declarations, expressions, guards, rates, relation
/// endpoints and action targets (per grounded instance). Pure.
std::vector<Diagnostic> validate(const ModelDefinition& def);

/// Canonical descriptor text; parsing it back yields an equal AST.
std::string pretty_print(const ModelDefinition& def);

// ---------------------------------------------------------------------------
// Schema: the statically known shape of a model. Used to type-check
// contract expressions and compile property programs.
// ---------------------------------------------------------------------------

class ModelSchema {
 public:
  ModelSchema() = default;
  explicit ModelSchema(const ModelDefinition& def);

  bool has_type(const std::string& type_name) const;
  std::optional<ValueType> attribute_at(const Path& path) const;
  std::optional<ValueType> type_attribute(const std::string& type_name,
                                          const Path& attr_path) const;

  /// TypeEnv wired to this schema (shared setup for all type checks).
  TypeEnv env(bool allow_collections) const;

  const SimulationState& skeleton() const { return skeleton_; }

 private:
  SimulationState skeleton_;  // instance tree with default attribute values
  std::map<std::string, std::map<std::string, ValueType>> type_attrs_;
};

// ---------------------------------------------------------------------------
// Built model
// ---------------------------------------------------------------------------

/// The unit of behavior: one guarded command grounded on one instance.
struct SimpleCommand {
  std::string id;        // "<instance path>.<command name>"
  ExprPtr guard;         // boolean
  ExprPtr rate;          // non-negative numeric selection weight
  struct Assign { Path target; ExprPtr rhs; };
  struct ObserveAssign { Path target; RandomVariable rv; };  // rv.id grounded
  struct Spawn { Path parent; std::string base_name; std::string type_name; };
  struct Despawn { Path target; };
  using Action = std::variant<Assign, ObserveAssign, Spawn, Despawn>;
  std::vector<Action> actions;
};

struct BuiltModel {
  SimulationState initial;  // step 0, all init expressions evaluated
  ModelDefinition definition;
  ModelSchema schema;
  std::vector<SimpleCommand> initial_commands;  // grounded against `initial`
};

/// Instantiates the required modules, interconnects them and configures
/// their parameters: evaluates attribute init expressions in declaration
/// order (earlier attributes and `time`=0 are visible) and grounds each
/// per-type command once per instance. Deterministic. Throws on type
/// errors or forward init references (cyclic_init).
BuiltModel build_model(const ModelDefinition& def, std::uint64_t global_seed);

/// Creates a fresh component of the given type with init expressions
/// evaluated at time `now` (used by build_model and by spawn actions).
ComponentPtr instantiate_type(const ModelDefinition& def,
                              const std::string& type_name, std::uint64_t now);

/// Grounds every per-type command for every instance in `state`, in
/// depth-first instance order. Re-run after structural changes.
std::vector<SimpleCommand> ground_commands(const SimulationState& state,
                                           const ModelDefinition& def);

}  // namespace sosmc
