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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sosmc/value.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Component tree. Snapshots are immutable values: every mutation builds a
// fresh tree that shares unchanged subtrees with its predecessor, so a
// monitor can hold a window of past states at low cost.
// ---------------------------------------------------------------------------

struct Component;
using ComponentPtr = std::shared_ptr<const Component>;

struct Attribute {
  std::string name;
  ValueType declared_type = ValueType::integer;
  Value value;
};

struct Subcomponent {
  std::string name;
  ComponentPtr component;
};

/// Named structural edge between two different sibling subcomponents.
struct Relation {
  std::string name;
  std::string from;
  std::string to;
};

struct AtomicComponent {
  std::string type_name;
  std::vector<Attribute> attributes;  // names unique

  const Attribute* find_attribute(const std::string& name) const;
};

struct HierarchicalComponent {
  std::string type_name;
  std::vector<Subcomponent> subcomponents;  // names unique
  std::vector<Relation> relations;          // endpoints name subcomponents

  const Subcomponent* find_subcomponent(const std::string& name) const;
};

struct Component {
  std::variant<AtomicComponent, HierarchicalComponent> node;

  bool is_atomic() const { return node.index() == 0; }
  bool is_hierarchical() const { return node.index() == 1; }
  const AtomicComponent& atomic() const { return std::get<0>(node); }
  const HierarchicalComponent& hierarchical() const { return std::get<1>(node); }
  const std::string& type_name() const;
};

ComponentPtr make_atomic(std::string type_name, std::vector<Attribute> attrs);
ComponentPtr make_hierarchical(std::string type_name,
                               std::vector<Subcomponent> subs,
                               std::vector<Relation> relations = {});

/// Type name of the synthetic root component. Not a valid descriptor
/// identifier, so it can never collide with a declared type.
inline constexpr const char* kRootTypeName = "$root";

struct System {
  ComponentPtr root;  // always hierarchical
  bool open = false;
  std::uint64_t structure_version = 0;  // bumped on every structural change
  std::uint64_t spawn_seq = 0;          // monotonic suffix for spawned names
};

using SystemPtr = std::shared_ptr<const System>;

/// Timestamped projection of the model: what property monitors read.
struct SimulationState {
  std::uint64_t step_index = 0;
  std::uint64_t time = 0;  // discrete ticks; equals step_index
  SystemPtr system;
};

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

/// Dot-separated address of a subcomponent or attribute, e.g.
/// "city.amb1.fuel". Resolution starts at the system root.
struct Path {
  std::vector<std::string> segments;

  Path() = default;
  explicit Path(std::vector<std::string> segs) : segments(std::move(segs)) {}

  static Path parse(const std::string& text);  // throws syntax_error

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }
  std::string str() const;

  Path prefixed_with(const Path& prefix) const;
  Path appended(const std::string& segment) const;
  Path parent() const;  // all but the last segment
  const std::string& leaf() const { return segments.back(); }

  bool operator==(const Path& other) const { return segments == other.segments; }
  bool operator<(const Path& other) const { return segments < other.segments; }
};

/// Reference to a component inside a specific snapshot.
struct ComponentRef {
  Path path;
  const Component* component = nullptr;  // borrowed from the snapshot
};

using Resolved = std::variant<Value, ComponentRef>;

/// Resolves a path to an attribute value or a component reference.
/// Throws path_not_found or type_mismatch.
Resolved resolve_path(const SimulationState& state, const Path& path);

/// Resolution that requires the target to be an attribute.
Value resolve_attribute(const SimulationState& state, const Path& path);

/// Resolution that requires the target to be a component.
ComponentRef resolve_component(const SimulationState& state, const Path& path);

/// All components of the given type, any depth, in deterministic
/// depth-first declaration order. Unknown types yield an empty list.
std::vector<ComponentRef> instances_of_type(const SimulationState& state,
                                            const std::string& type_name);

// ---------------------------------------------------------------------------
// Structural changes (open systems)
// ---------------------------------------------------------------------------

struct AddComponent {
  Path parent;
  Subcomponent subcomponent;
};
struct RemoveComponent {
  Path path;
};
struct AddRelation {
  Path parent;
  Relation relation;
};
struct RemoveRelation {
  Path parent;
  std::string name;
};

using StructuralChange =
    std::variant<AddComponent, RemoveComponent, AddRelation, RemoveRelation>;

/// Returns a new snapshot with the change applied and the structure
/// version bumped (the change flag quantifiers re-bind on). The input
/// snapshot is not modified. Removing a subcomponent also drops the
/// parent relations that referenced it, keeping endpoints valid.
/// Throws closed_system, path_not_found or duplicate_name.
SimulationState apply_structural_change(const SimulationState& state,
                                        const StructuralChange& change);

/// Returns a new snapshot with one attribute replaced. Structure version
/// is unchanged. Committed reals must be finite.
SimulationState with_attribute(const SimulationState& state, const Path& path,
                               const Value& value);

/// Full-tree invariant check: unique names, relation endpoints resolve to
/// two different siblings, value tags match declared types, reals finite.
/// Returns human-readable violations; empty means valid.
std::vector<std::string> validate_system(const System& system);

}  // namespace sosmc
