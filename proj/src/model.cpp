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

#include "sosmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace sosmc {

const char* value_type_name(ValueType t) {
  switch (t) {
    case ValueType::boolean: return "bool";
    case ValueType::integer: return "int";
    case ValueType::real: return "real";
    case ValueType::string: return "string";
  }
  return "?";
}

bool Value::as_boolean() const {
  if (!is_boolean()) fail(ErrorKind::type_mismatch, "expected bool, got " + str());
  return std::get<bool>(v_);
}

std::int64_t Value::as_integer() const {
  if (!is_integer()) fail(ErrorKind::type_mismatch, "expected int, got " + str());
  return std::get<std::int64_t>(v_);
}

double Value::as_real() const {
  if (is_integer()) return static_cast<double>(std::get<std::int64_t>(v_));
  if (!is_real()) fail(ErrorKind::type_mismatch, "expected real, got " + str());
  return std::get<double>(v_);
}

const std::string& Value::as_string() const {
  if (!is_string()) fail(ErrorKind::type_mismatch, "expected string, got " + str());
  return std::get<std::string>(v_);
}

std::string Value::str() const {
  switch (type()) {
    case ValueType::boolean:
      return std::get<bool>(v_) ? "true" : "false";
    case ValueType::integer:
      return std::to_string(std::get<std::int64_t>(v_));
    case ValueType::real: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v_));
      std::string s(buf);
      // canonical real form always shows a decimal point or exponent
      if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
      return s;
    }
    case ValueType::string:
      return "\"" + std::get<std::string>(v_) + "\"";
  }
  return "?";
}

Value default_value(ValueType t) {
  switch (t) {
    case ValueType::boolean: return Value(false);
    case ValueType::integer: return Value(std::int64_t{0});
    case ValueType::real: return Value(0.0);
    case ValueType::string: return Value(std::string());
  }
  return Value(false);
}

ValueType parse_value_type(const std::string& name) {
  if (name == "bool") return ValueType::boolean;
  if (name == "int") return ValueType::integer;
  if (name == "real") return ValueType::real;
  if (name == "string") return ValueType::string;
  fail(ErrorKind::syntax_error, "unknown type name '" + name + "'");
}

// ---------------------------------------------------------------------------
// diagnostics.cpp content is small enough to live here
// ---------------------------------------------------------------------------

std::string SourceLoc::str() const {
  if (!valid()) return "";
  return std::to_string(line) + ":" + std::to_string(column);
}

std::string Diagnostic::str() const {
  std::string out = severity == Severity::error ? "error" : "warning";
  if (loc.valid()) out += " at " + loc.str();
  out += ": " + message;
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Severity::error;
  });
}

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.str();
  }
  return out;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::path_not_found: return "PathNotFound";
    case ErrorKind::type_mismatch: return "TypeMismatch";
    case ErrorKind::division_by_zero: return "DivisionByZero";
    case ErrorKind::closed_system: return "ClosedSystem";
    case ErrorKind::duplicate_name: return "DuplicateName";
    case ErrorKind::invalid_parameters: return "InvalidParameters";
    case ErrorKind::negative_rate: return "NegativeRate";
    case ErrorKind::all_rates_zero: return "AllRatesZero";
    case ErrorKind::cyclic_init: return "CyclicInit";
    case ErrorKind::horizon_too_small: return "HorizonTooSmall";
    case ErrorKind::unknown_path: return "UnknownPath";
    case ErrorKind::unknown_component_type: return "UnknownComponentType";
    case ErrorKind::unbound_binder: return "UnboundBinder";
    case ErrorKind::unknown_pattern: return "UnknownPattern";
    case ErrorKind::domain_error: return "DomainError";
    case ErrorKind::max_samples_exceeded: return "MaxSamplesExceeded";
    case ErrorKind::out_of_order_state: return "OutOfOrderState";
    case ErrorKind::trace_too_short: return "TraceTooShort";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::model_error: return "ModelError";
    case ErrorKind::internal_error: return "InternalError";
  }
  return "Error";
}

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

const Attribute* AtomicComponent::find_attribute(const std::string& name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a;
  return nullptr;
}

const Subcomponent* HierarchicalComponent::find_subcomponent(
    const std::string& name) const {
  for (const auto& s : subcomponents)
    if (s.name == name) return &s;
  return nullptr;
}

const std::string& Component::type_name() const {
  return is_atomic() ? atomic().type_name : hierarchical().type_name;
}

ComponentPtr make_atomic(std::string type_name, std::vector<Attribute> attrs) {
  return std::make_shared<const Component>(
      Component{AtomicComponent{std::move(type_name), std::move(attrs)}});
}

ComponentPtr make_hierarchical(std::string type_name,
                               std::vector<Subcomponent> subs,
                               std::vector<Relation> relations) {
  return std::make_shared<const Component>(Component{HierarchicalComponent{
      std::move(type_name), std::move(subs), std::move(relations)}});
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

Path Path::parse(const std::string& text) {
  Path p;
  std::string seg;
  for (char c : text) {
    if (c == '.') {
      if (seg.empty()) fail(ErrorKind::syntax_error, "empty path segment in '" + text + "'");
      p.segments.push_back(seg);
      seg.clear();
    } else {
      seg += c;
    }
  }
  if (seg.empty()) fail(ErrorKind::syntax_error, "empty path '" + text + "'");
  p.segments.push_back(seg);
  return p;
}

std::string Path::str() const {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty()) out += '.';
    out += s;
  }
  return out;
}

Path Path::prefixed_with(const Path& prefix) const {
  Path out = prefix;
  out.segments.insert(out.segments.end(), segments.begin(), segments.end());
  return out;
}

Path Path::appended(const std::string& segment) const {
  Path out = *this;
  out.segments.push_back(segment);
  return out;
}

Path Path::parent() const {
  Path out = *this;
  if (!out.segments.empty()) out.segments.pop_back();
  return out;
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

namespace {

// Walks as many segments as name components; the final segment may be an
// attribute of the reached atomic component.
Resolved resolve_in(const Component* node, const Path& full, std::size_t idx) {
  if (idx == full.size()) {
    return ComponentRef{full, node};
  }
  const std::string& seg = full.segments[idx];
  if (node->is_hierarchical()) {
    const Subcomponent* sub = node->hierarchical().find_subcomponent(seg);
    if (!sub)
      fail(ErrorKind::path_not_found,
           "'" + seg + "' is not a subcomponent (in path " + full.str() + ")");
    return resolve_in(sub->component.get(), full, idx + 1);
  }
  // atomic: only a final attribute segment is allowed
  const Attribute* attr = node->atomic().find_attribute(seg);
  if (!attr)
    fail(ErrorKind::path_not_found,
         "'" + seg + "' is not an attribute of " + node->type_name() +
             " (in path " + full.str() + ")");
  if (idx + 1 != full.size())
    fail(ErrorKind::type_mismatch,
         "attribute '" + seg + "' used as a component (in path " + full.str() + ")");
  return attr->value;
}

}  // namespace

Resolved resolve_path(const SimulationState& state, const Path& path) {
  if (path.empty()) fail(ErrorKind::syntax_error, "empty path");
  return resolve_in(state.system->root.get(), path, 0);
}

Value resolve_attribute(const SimulationState& state, const Path& path) {
  Resolved r = resolve_path(state, path);
  if (auto* v = std::get_if<Value>(&r)) return *v;
  fail(ErrorKind::type_mismatch, "component '" + path.str() + "' used as a value");
}

ComponentRef resolve_component(const SimulationState& state, const Path& path) {
  Resolved r = resolve_path(state, path);
  if (auto* c = std::get_if<ComponentRef>(&r)) return *c;
  fail(ErrorKind::type_mismatch, "attribute '" + path.str() + "' used as a component");
}

namespace {

void collect_instances(const Component* node, const std::string& type_name,
                       Path& here, std::vector<ComponentRef>& out) {
  if (node->type_name() == type_name) out.push_back(ComponentRef{here, node});
  if (node->is_hierarchical()) {
    for (const auto& sub : node->hierarchical().subcomponents) {
      here.segments.push_back(sub.name);
      collect_instances(sub.component.get(), type_name, here, out);
      here.segments.pop_back();
    }
  }
}

}  // namespace

std::vector<ComponentRef> instances_of_type(const SimulationState& state,
                                            const std::string& type_name) {
  std::vector<ComponentRef> out;
  Path here;
  collect_instances(state.system->root.get(), type_name, here, out);
  return out;
}

// ---------------------------------------------------------------------------
// Persistent updates
// ---------------------------------------------------------------------------

namespace {

using EditFn = std::function<ComponentPtr(const Component&)>;

// Rebuilds the spine from the root to `path`, applying `edit` to the node
// at the end of the path. Untouched subtrees are shared.
ComponentPtr edit_at(const ComponentPtr& node, const Path& path, std::size_t idx,
                     const EditFn& edit) {
  if (idx == path.size()) return edit(*node);
  if (!node->is_hierarchical())
    fail(ErrorKind::path_not_found,
         "'" + path.segments[idx] + "' is not a subcomponent (in path " +
             path.str() + ")");
  const auto& h = node->hierarchical();
  const std::string& seg = path.segments[idx];
  std::vector<Subcomponent> subs = h.subcomponents;
  bool found = false;
  for (auto& sub : subs) {
    if (sub.name == seg) {
      sub.component = edit_at(sub.component, path, idx + 1, edit);
      found = true;
      break;
    }
  }
  if (!found)
    fail(ErrorKind::path_not_found,
         "'" + seg + "' is not a subcomponent (in path " + path.str() + ")");
  return make_hierarchical(h.type_name, std::move(subs), h.relations);
}

SimulationState replace_root(const SimulationState& state, ComponentPtr root,
                             bool bump_version, std::uint64_t spawn_seq_delta = 0) {
  auto sys = std::make_shared<System>(*state.system);
  sys->root = std::move(root);
  if (bump_version) sys->structure_version += 1;
  sys->spawn_seq += spawn_seq_delta;
  SimulationState out = state;
  out.system = std::move(sys);
  return out;
}

}  // namespace

SimulationState apply_structural_change(const SimulationState& state,
                                        const StructuralChange& change) {
  if (!state.system->open)
    fail(ErrorKind::closed_system, "structural change on a closed system");

  if (const auto* add = std::get_if<AddComponent>(&change)) {
    ComponentPtr root = edit_at(
        state.system->root, add->parent, 0, [&](const Component& c) {
          if (!c.is_hierarchical())
            fail(ErrorKind::type_mismatch,
                 "cannot add a subcomponent under atomic component '" +
                     add->parent.str() + "'");
          const auto& h = c.hierarchical();
          if (h.find_subcomponent(add->subcomponent.name))
            fail(ErrorKind::duplicate_name,
                 "subcomponent '" + add->subcomponent.name +
                     "' already exists under '" + add->parent.str() + "'");
          std::vector<Subcomponent> subs = h.subcomponents;
          subs.push_back(add->subcomponent);
          return make_hierarchical(h.type_name, std::move(subs), h.relations);
        });
    return replace_root(state, std::move(root), true);
  }

  if (const auto* rem = std::get_if<RemoveComponent>(&change)) {
    if (rem->path.empty())
      fail(ErrorKind::path_not_found, "cannot remove the system root");
    const std::string victim = rem->path.leaf();
    ComponentPtr root = edit_at(
        state.system->root, rem->path.parent(), 0, [&](const Component& c) {
          if (!c.is_hierarchical() || !c.hierarchical().find_subcomponent(victim))
            fail(ErrorKind::path_not_found,
                 "no subcomponent '" + victim + "' at '" + rem->path.str() + "'");
          const auto& h = c.hierarchical();
          std::vector<Subcomponent> subs;
          for (const auto& s : h.subcomponents)
            if (s.name != victim) subs.push_back(s);
          // relations to a removed endpoint go with it
          std::vector<Relation> rels;
          for (const auto& r : h.relations)
            if (r.from != victim && r.to != victim) rels.push_back(r);
          return make_hierarchical(h.type_name, std::move(subs), std::move(rels));
        });
    return replace_root(state, std::move(root), true);
  }

  if (const auto* addr = std::get_if<AddRelation>(&change)) {
    ComponentPtr root = edit_at(
        state.system->root, addr->parent, 0, [&](const Component& c) {
          if (!c.is_hierarchical())
            fail(ErrorKind::type_mismatch,
                 "relations require a hierarchical component at '" +
                     addr->parent.str() + "'");
          const auto& h = c.hierarchical();
          const Relation& rel = addr->relation;
          if (rel.from == rel.to)
            fail(ErrorKind::invalid_parameters,
                 "relation '" + rel.name + "' must connect two different subcomponents");
          if (!h.find_subcomponent(rel.from) || !h.find_subcomponent(rel.to))
            fail(ErrorKind::path_not_found,
                 "relation '" + rel.name + "' endpoint missing under '" +
                     addr->parent.str() + "'");
          for (const auto& r : h.relations)
            if (r.name == rel.name)
              fail(ErrorKind::duplicate_name, "relation '" + rel.name + "' already exists");
          std::vector<Relation> rels = h.relations;
          rels.push_back(rel);
          return make_hierarchical(h.type_name, h.subcomponents, std::move(rels));
        });
    return replace_root(state, std::move(root), true);
  }

  const auto& remr = std::get<RemoveRelation>(change);
  ComponentPtr root = edit_at(
      state.system->root, remr.parent, 0, [&](const Component& c) {
        if (!c.is_hierarchical())
          fail(ErrorKind::path_not_found,
               "relation '" + remr.name + "' not found under '" + remr.parent.str() + "'");
        const auto& h = c.hierarchical();
        std::vector<Relation> rels;
        bool found = false;
        for (const auto& r : h.relations) {
          if (r.name == remr.name)
            found = true;
          else
            rels.push_back(r);
        }
        if (!found)
          fail(ErrorKind::path_not_found,
               "relation '" + remr.name + "' not found under '" + remr.parent.str() + "'");
        return make_hierarchical(h.type_name, h.subcomponents, std::move(rels));
      });
  return replace_root(state, std::move(root), true);
}

SimulationState with_attribute(const SimulationState& state, const Path& path,
                               const Value& value) {
  if (path.empty()) fail(ErrorKind::syntax_error, "empty attribute path");
  if (value.is_real() && !std::isfinite(value.as_real()))
    fail(ErrorKind::model_error,
         "non-finite value committed to '" + path.str() + "'");
  const std::string attr_name = path.leaf();
  ComponentPtr root = edit_at(
      state.system->root, path.parent(), 0, [&](const Component& c) {
        if (!c.is_atomic())
          fail(ErrorKind::type_mismatch,
               "'" + path.str() + "' does not address an attribute");
        const auto& a = c.atomic();
        std::vector<Attribute> attrs = a.attributes;
        for (auto& attr : attrs) {
          if (attr.name != attr_name) continue;
          Value coerced = value;
          if (attr.declared_type == ValueType::real && value.is_integer())
            coerced = Value(static_cast<double>(value.as_integer()));
          if (coerced.type() != attr.declared_type)
            fail(ErrorKind::type_mismatch,
                 "cannot assign " + std::string(value_type_name(value.type())) +
                     " to " + std::string(value_type_name(attr.declared_type)) +
                     " attribute '" + path.str() + "'");
          attr.value = std::move(coerced);
          return make_atomic(a.type_name, std::move(attrs));
        }
        fail(ErrorKind::path_not_found,
             "no attribute '" + attr_name + "' at '" + path.str() + "'");
      });
  return replace_root(state, std::move(root), false);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void validate_node(const Component* node, const std::string& where,
                   std::vector<std::string>& out) {
  if (node->is_atomic()) {
    const auto& a = node->atomic();
    std::set<std::string> seen;
    for (const auto& attr : a.attributes) {
      if (!seen.insert(attr.name).second)
        out.push_back("duplicate attribute '" + attr.name + "' in " + where);
      if (attr.value.type() != attr.declared_type)
        out.push_back("attribute '" + attr.name + "' in " + where +
                      " holds a " + value_type_name(attr.value.type()) +
                      " but declares " + value_type_name(attr.declared_type));
      if (attr.value.is_real() && !std::isfinite(attr.value.as_real()))
        out.push_back("attribute '" + attr.name + "' in " + where + " is non-finite");
    }
    return;
  }
  const auto& h = node->hierarchical();
  std::set<std::string> seen;
  for (const auto& sub : h.subcomponents) {
    if (sub.name.empty()) out.push_back("unnamed subcomponent in " + where);
    if (!seen.insert(sub.name).second)
      out.push_back("duplicate subcomponent '" + sub.name + "' in " + where);
  }
  std::set<std::string> rel_names;
  for (const auto& rel : h.relations) {
    if (!rel_names.insert(rel.name).second)
      out.push_back("duplicate relation '" + rel.name + "' in " + where);
    if (rel.from == rel.to)
      out.push_back("relation '" + rel.name + "' in " + where + " is a self-loop");
    if (!h.find_subcomponent(rel.from) || !h.find_subcomponent(rel.to))
      out.push_back("relation '" + rel.name + "' in " + where +
                    " references a missing subcomponent");
  }
  for (const auto& sub : h.subcomponents)
    validate_node(sub.component.get(), where + "." + sub.name, out);
}

}  // namespace

std::vector<std::string> validate_system(const System& system) {
  std::vector<std::string> out;
  if (!system.root) {
    out.push_back("system has no root");
    return out;
  }
  if (!system.root->is_hierarchical())
    out.push_back("system root must be hierarchical");
  validate_node(system.root.get(), "<root>", out);
  return out;
}

}  // namespace sosmc
