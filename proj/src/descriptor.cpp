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

#include "sosmc/descriptor.hpp"

#include <algorithm>
#include <set>

#include "parse_util.hpp"

namespace sosmc {

using detail::Tok;
using detail::Token;
using detail::TokenStream;

const AttributeDecl* TypeDecl::find_attribute(const std::string& n) const {
  for (const auto& a : attributes)
    if (a.name == n) return &a;
  return nullptr;
}

const RandomVariableDecl* TypeDecl::find_random_variable(const std::string& n) const {
  for (const auto& r : random_variables)
    if (r.name == n) return &r;
  return nullptr;
}

const TypeDecl* ModelDefinition::find_type(const std::string& name) const {
  for (const auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct DescriptorParser {
  TokenStream& ts;
  ModelDefinition& def;

  void error_here(const SourceLoc& loc, const std::string& msg) {
    def.diagnostics.push_back(Diagnostic{Severity::error, loc, msg});
  }

  ExprPtr parse_expr_here(bool allow_u = false) {
    detail::ExprParserOptions opts;
    opts.allow_u = allow_u;
    opts.allow_collections = false;
    return detail::parse_expr_tokens(ts, opts, {});
  }

  // path with optional `root.` anchor; returns (path, anchored)
  std::pair<Path, bool> parse_path() {
    Path p;
    p.segments.push_back(ts.expect_any_ident("path"));
    while (ts.at_sym(".") && ts.peek(1).kind == Tok::ident) {
      ts.next();
      p.segments.push_back(ts.expect_any_ident("path segment"));
    }
    bool anchored = false;
    if (p.segments.size() > 1 && p.segments.front() == "root") {
      anchored = true;
      p.segments.erase(p.segments.begin());
    }
    return {std::move(p), anchored};
  }

  DistributionSpec parse_distribution() {
    SourceLoc loc = ts.peek().loc;
    std::string kind = ts.expect_any_ident("distribution kind");
    ts.expect_sym("(");
    DistributionSpec spec;
    if (kind == "uniform_real" || kind == "uniform_int") {
      ExprPtr lo = parse_expr_here();
      ts.expect_sym(",");
      ExprPtr hi = parse_expr_here();
      if (kind == "uniform_real")
        spec.dist = UniformRealDist{lo, hi};
      else
        spec.dist = UniformIntDist{lo, hi};
    } else if (kind == "normal_real" || kind == "normal_int") {
      ExprPtr mean = parse_expr_here();
      ts.expect_sym(",");
      ExprPtr sd = parse_expr_here();
      if (kind == "normal_real")
        spec.dist = NormalRealDist{mean, sd};
      else
        spec.dist = NormalIntDist{mean, sd};
    } else if (kind == "custom_real" || kind == "custom_int") {
      ExprPtr body = parse_expr_here(/*allow_u=*/true);
      if (kind == "custom_real")
        spec.dist = CustomRealDist{body};
      else
        spec.dist = CustomIntDist{body};
    } else {
      detail::syntax_fail(loc, "unknown distribution '" + kind +
                                   "' (expected uniform_real, uniform_int, "
                                   "normal_real, normal_int, custom_real, custom_int)");
    }
    ts.expect_sym(")");
    return spec;
  }

  ActionDecl parse_action() {
    if (ts.accept_ident("spawn")) {
      SpawnDecl s;
      s.base_name = ts.expect_any_ident("spawned instance base name");
      ts.expect_sym(":");
      s.type_name = ts.expect_any_ident("component type");
      if (ts.accept_ident("in")) {
        auto [p, anchored] = parse_path();
        s.parent = std::move(p);
        s.parent_anchored = anchored;
      }
      return s;
    }
    if (ts.accept_ident("despawn")) {
      DespawnDecl d;
      auto [p, anchored] = parse_path();
      d.target = std::move(p);
      d.target_anchored = anchored;
      return d;
    }
    auto [target, anchored] = parse_path();
    ts.expect_sym(":=");
    if (ts.at_ident("observe") && ts.peek(1).kind == Tok::sym &&
        ts.peek(1).text == "(") {
      ts.next();
      ts.next();
      ObserveAssignDecl o;
      o.target = std::move(target);
      o.target_anchored = anchored;
      o.rv_name = ts.expect_any_ident("random variable name");
      ts.expect_sym(")");
      return o;
    }
    AssignDecl a;
    a.target = std::move(target);
    a.target_anchored = anchored;
    a.rhs = parse_expr_here();
    return a;
  }

  void parse_type_member(TypeDecl& type) {
    SourceLoc loc = ts.peek().loc;
    if (ts.accept_ident("attr")) {
      AttributeDecl a;
      a.loc = loc;
      a.name = ts.expect_any_ident("attribute name");
      ts.expect_sym(":");
      std::string tn = ts.expect_any_ident("attribute type");
      a.declared_type = parse_value_type(tn);
      ts.expect_sym("=");
      a.init = parse_expr_here();
      ts.expect_sym(";");
      type.attributes.push_back(std::move(a));
      return;
    }
    if (ts.accept_ident("rv")) {
      RandomVariableDecl r;
      r.loc = loc;
      r.name = ts.expect_any_ident("random variable name");
      ts.expect_sym("~");
      r.spec = parse_distribution();
      ts.expect_sym(";");
      type.random_variables.push_back(std::move(r));
      return;
    }
    if (ts.accept_ident("cmd")) {
      CommandDecl c;
      c.loc = loc;
      c.name = ts.expect_any_ident("command name");
      ts.expect_sym(":");
      ts.expect_ident("when");
      c.guard = parse_expr_here();
      ts.expect_ident("rate");
      c.rate = parse_expr_here();
      if (ts.accept_ident("do")) {
        c.actions.push_back(parse_action());
        while (ts.accept_sym(",")) c.actions.push_back(parse_action());
      }
      ts.expect_sym(";");
      type.commands.push_back(std::move(c));
      return;
    }
    detail::syntax_fail(loc, "expected attr, rv or cmd, got '" + ts.peek().text + "'");
  }

  void parse_type_decl() {
    TypeDecl type;
    type.loc = ts.peek().loc;
    ts.expect_ident("type");
    type.name = ts.expect_any_ident("type name");
    ts.expect_sym("{");
    while (!ts.at_sym("}") && !ts.at_end()) {
      try {
        parse_type_member(type);
      } catch (const Error& e) {
        error_here(ts.peek().loc, e.what());
        ts.synchronize({";", "}"}, false);
        if (!ts.accept_sym(";")) break;
      }
    }
    ts.expect_sym("}");
    def.types.push_back(std::move(type));
  }

  void parse_system_member() {
    SourceLoc loc = ts.peek().loc;
    if (ts.accept_ident("open")) {
      ts.expect_sym(";");
      def.open = true;
      return;
    }
    if (ts.accept_ident("closed")) {
      ts.expect_sym(";");
      def.open = false;
      return;
    }
    if (ts.accept_ident("instance")) {
      InstanceDecl inst;
      inst.loc = loc;
      inst.name = ts.expect_any_ident("instance name");
      ts.expect_sym(":");
      inst.type_name = ts.expect_any_ident("component type");
      if (ts.accept_ident("in")) {
        auto [p, anchored] = parse_path();
        (void)anchored;  // instance parents are always root-relative
        inst.parent = std::move(p);
      }
      ts.expect_sym(";");
      def.instances.push_back(std::move(inst));
      return;
    }
    if (ts.accept_ident("relation")) {
      RelationDecl rel;
      rel.loc = loc;
      rel.name = ts.expect_any_ident("relation name");
      ts.expect_sym(":");
      rel.from = parse_path().first;
      ts.expect_sym("--");
      rel.to = parse_path().first;
      ts.expect_sym(";");
      def.relations.push_back(std::move(rel));
      return;
    }
    detail::syntax_fail(loc, "expected open, closed, instance or relation, got '" +
                                 ts.peek().text + "'");
  }

  void parse_system_block() {
    ts.expect_ident("system");
    ts.expect_sym("{");
    while (!ts.at_sym("}") && !ts.at_end()) {
      try {
        parse_system_member();
      } catch (const Error& e) {
        error_here(ts.peek().loc, e.what());
        ts.synchronize({";", "}"}, false);
        if (!ts.accept_sym(";")) break;
      }
    }
    ts.expect_sym("}");
  }

  void run() {
    while (!ts.at_end()) {
      try {
        if (ts.at_ident("type")) {
          parse_type_decl();
        } else if (ts.at_ident("system")) {
          parse_system_block();
        } else {
          detail::syntax_fail(ts.peek().loc, "expected a type declaration or the "
                                             "system block, got '" +
                                                 ts.peek().text + "'");
        }
      } catch (const Error& e) {
        error_here(ts.peek().loc, e.what());
        ts.synchronize({"}"}, true);
      }
    }
  }
};

}  // namespace

ModelDefinition parse_descriptor(const std::string& text) {
  ModelDefinition def;
  std::vector<Token> tokens;
  try {
    tokens = detail::tokenize(text);
  } catch (const Error& e) {
    def.diagnostics.push_back(Diagnostic{Severity::error, {}, e.what()});
    return def;
  }
  TokenStream ts(std::move(tokens));
  DescriptorParser parser{ts, def};
  parser.run();
  return def;
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

namespace {

// Mutable instance-tree node used while assembling the system.
struct TreeNode {
  std::string type_name;
  bool atomic = true;
  std::vector<Attribute> attributes;
  std::vector<std::pair<std::string, std::unique_ptr<TreeNode>>> children;
  std::vector<Relation> relations;

  TreeNode* find(const std::string& name) {
    for (auto& [n, c] : children)
      if (n == name) return c.get();
    return nullptr;
  }

  TreeNode* resolve(const Path& p) {
    TreeNode* node = this;
    for (const auto& seg : p.segments) {
      node = node->find(seg);
      if (!node) return nullptr;
    }
    return node;
  }

  ComponentPtr freeze() const {
    if (atomic) return make_atomic(type_name, attributes);
    std::vector<Subcomponent> subs;
    subs.reserve(children.size());
    for (const auto& [n, c] : children) subs.push_back(Subcomponent{n, c->freeze()});
    return make_hierarchical(type_name, std::move(subs), relations);
  }
};

bool type_is_atomic(const TypeDecl& t) { return !t.attributes.empty(); }

// Assembles the instance tree. Instances whose type declares attributes
// become atomic; others become hierarchical containers. `fill` supplies
// the attribute values (defaults for the schema skeleton, evaluated inits
// for the real build).
std::unique_ptr<TreeNode> assemble_tree(
    const ModelDefinition& def,
    const std::function<std::vector<Attribute>(const TypeDecl&)>& fill) {
  auto root = std::make_unique<TreeNode>();
  root->type_name = kRootTypeName;
  root->atomic = false;
  for (const auto& inst : def.instances) {
    const TypeDecl* type = def.find_type(inst.type_name);
    if (!type)
      fail(ErrorKind::unknown_component_type,
           "instance '" + inst.name + "' uses undeclared type '" + inst.type_name + "'");
    TreeNode* parent = root->resolve(inst.parent);
    if (!parent)
      fail(ErrorKind::path_not_found,
           "instance '" + inst.name + "': parent '" + inst.parent.str() + "' not found");
    if (parent->atomic)
      fail(ErrorKind::type_mismatch,
           "instance '" + inst.name + "': parent '" + inst.parent.str() +
               "' is atomic and cannot contain subcomponents");
    if (parent->find(inst.name))
      fail(ErrorKind::duplicate_name,
           "duplicate instance '" + inst.name + "' under '" +
               (inst.parent.empty() ? "<root>" : inst.parent.str()) + "'");
    auto node = std::make_unique<TreeNode>();
    node->type_name = inst.type_name;
    node->atomic = type_is_atomic(*type);
    if (node->atomic) node->attributes = fill(*type);
    parent->children.emplace_back(inst.name, std::move(node));
  }
  for (const auto& rel : def.relations) {
    if (rel.from.empty() || rel.to.empty())
      fail(ErrorKind::path_not_found, "relation '" + rel.name + "' has an empty endpoint");
    Path from_parent = rel.from.parent();
    if (from_parent != rel.to.parent())
      fail(ErrorKind::invalid_parameters,
           "relation '" + rel.name + "' endpoints must be siblings");
    TreeNode* parent = root->resolve(from_parent);
    if (!parent || parent->atomic || !parent->find(rel.from.leaf()) ||
        !parent->find(rel.to.leaf()))
      fail(ErrorKind::path_not_found,
           "relation '" + rel.name + "' references a missing instance");
    if (rel.from.leaf() == rel.to.leaf())
      fail(ErrorKind::invalid_parameters,
           "relation '" + rel.name + "' must connect two different subcomponents");
    for (const auto& r : parent->relations)
      if (r.name == rel.name)
        fail(ErrorKind::duplicate_name, "duplicate relation '" + rel.name + "'");
    parent->relations.push_back(Relation{rel.name, rel.from.leaf(), rel.to.leaf()});
  }
  return root;
}

SimulationState freeze_tree(const TreeNode& root, bool open) {
  auto sys = std::make_shared<System>();
  sys->root = root.freeze();
  sys->open = open;
  SimulationState state;
  state.system = std::move(sys);
  return state;
}

std::vector<Attribute> default_attributes(const TypeDecl& type) {
  std::vector<Attribute> out;
  out.reserve(type.attributes.size());
  for (const auto& a : type.attributes)
    out.push_back(Attribute{a.name, a.declared_type, default_value(a.declared_type)});
  return out;
}

}  // namespace

ModelSchema::ModelSchema(const ModelDefinition& def) {
  auto tree = assemble_tree(def, default_attributes);
  skeleton_ = freeze_tree(*tree, def.open);
  for (const auto& t : def.types) {
    auto& attrs = type_attrs_[t.name];
    for (const auto& a : t.attributes) attrs[a.name] = a.declared_type;
  }
}

bool ModelSchema::has_type(const std::string& type_name) const {
  return type_attrs_.count(type_name) != 0;
}

std::optional<ValueType> ModelSchema::attribute_at(const Path& path) const {
  if (!skeleton_.system) return std::nullopt;
  try {
    Resolved r = resolve_path(skeleton_, path);
    if (auto* v = std::get_if<Value>(&r)) return v->type();
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<ValueType> ModelSchema::type_attribute(const std::string& type_name,
                                                     const Path& attr_path) const {
  auto it = type_attrs_.find(type_name);
  if (it == type_attrs_.end()) return std::nullopt;
  if (attr_path.size() != 1) return std::nullopt;  // atomic types are flat
  auto jt = it->second.find(attr_path.segments[0]);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

TypeEnv ModelSchema::env(bool allow_collections) const {
  TypeEnv env;
  env.allow_collections = allow_collections;
  env.attribute_type = [this](const Path& p) { return attribute_at(p); };
  env.binder_attribute_type = [this](const std::string& t, const Path& p) {
    return type_attribute(t, p);
  };
  env.has_component_type = [this](const std::string& t) { return has_type(t); };
  return env;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct Validator {
  const ModelDefinition& def;
  std::vector<Diagnostic> out;
  std::optional<ModelSchema> schema;  // absent if the tree cannot assemble

  void error(const SourceLoc& loc, const std::string& msg) {
    out.push_back(Diagnostic{Severity::error, loc, msg});
  }
  void warning(const SourceLoc& loc, const std::string& msg) {
    out.push_back(Diagnostic{Severity::warning, loc, msg});
  }

  // Type environment for attribute init expressions: only attributes
  // declared earlier in the same type are visible.
  std::optional<ValueType> check_init(const TypeDecl& type, std::size_t upto,
                                      const ExprPtr& e, const SourceLoc& loc) {
    TypeEnv env;
    env.allow_time = true;
    env.attribute_type = [&](const Path& p) -> std::optional<ValueType> {
      if (p.size() != 1) return std::nullopt;
      for (std::size_t i = 0; i < type.attributes.size(); ++i) {
        if (type.attributes[i].name != p.segments[0]) continue;
        if (i >= upto)
          fail(ErrorKind::cyclic_init,
               "init references the later-declared attribute '" + p.segments[0] + "'");
        return type.attributes[i].declared_type;
      }
      return std::nullopt;
    };
    try {
      return infer_type(*e, env);
    } catch (const Error& err) {
      error(loc, err.what());
      return std::nullopt;
    }
  }

  // Checks an instance-relative expression after grounding on `inst`.
  std::optional<ValueType> check_grounded(const ExprPtr& e, const Path& inst,
                                          bool allow_u, const SourceLoc& loc) {
    if (!schema) return std::nullopt;
    try {
      ExprPtr g = ground_expr(e, inst);
      TypeEnv env = schema->env(false);
      env.allow_u = allow_u;
      return infer_type(*g, env);
    } catch (const Error& err) {
      error(loc, err.what());
      return std::nullopt;
    }
  }

  void check_rv(const RandomVariableDecl& rv, const Path& inst) {
    auto expect_numeric = [&](const ExprPtr& e, const char* what) {
      auto t = check_grounded(e, inst, false, rv.loc);
      if (t && *t != ValueType::integer && *t != ValueType::real)
        error(rv.loc, std::string("rv '") + rv.name + "': " + what + " must be numeric");
      return t;
    };
    if (auto* u = std::get_if<UniformRealDist>(&rv.spec.dist)) {
      expect_numeric(u->min, "min");
      expect_numeric(u->max, "max");
    } else if (auto* ui = std::get_if<UniformIntDist>(&rv.spec.dist)) {
      auto a = check_grounded(ui->min, inst, false, rv.loc);
      auto b = check_grounded(ui->max, inst, false, rv.loc);
      if ((a && *a != ValueType::integer) || (b && *b != ValueType::integer))
        error(rv.loc, "rv '" + rv.name + "': uniform_int bounds must be integers");
    } else if (auto* n = std::get_if<NormalRealDist>(&rv.spec.dist)) {
      expect_numeric(n->mean, "mean");
      expect_numeric(n->stddev, "stddev");
    } else if (auto* ni = std::get_if<NormalIntDist>(&rv.spec.dist)) {
      expect_numeric(ni->mean, "mean");
      expect_numeric(ni->stddev, "stddev");
    } else if (auto* cr = std::get_if<CustomRealDist>(&rv.spec.dist)) {
      auto t = check_grounded(cr->observe, inst, true, rv.loc);
      if (t && *t != ValueType::integer && *t != ValueType::real)
        error(rv.loc, "rv '" + rv.name + "': observe function must be numeric");
    } else if (auto* ci = std::get_if<CustomIntDist>(&rv.spec.dist)) {
      auto t = check_grounded(ci->observe, inst, true, rv.loc);
      if (t && *t != ValueType::integer)
        error(rv.loc, "rv '" + rv.name + "': observe function must yield an integer");
    }
  }

  std::optional<ValueType> target_type(const Path& target, bool anchored,
                                       const Path& inst) {
    if (!schema) return std::nullopt;
    Path abs = anchored ? target : target.prefixed_with(inst);
    return schema->attribute_at(abs);
  }

  void check_command(const TypeDecl& type, const CommandDecl& cmd, const Path& inst) {
    auto gt = check_grounded(cmd.guard, inst, false, cmd.loc);
    if (gt && *gt != ValueType::boolean)
      error(cmd.loc, "command '" + type.name + "." + cmd.name + "': guard must be boolean");
    auto rt = check_grounded(cmd.rate, inst, false, cmd.loc);
    if (rt && *rt != ValueType::integer && *rt != ValueType::real)
      error(cmd.loc, "command '" + type.name + "." + cmd.name + "': rate must be numeric");
    // constant negative rate is a latent runtime error
    if (auto* lit = std::get_if<LiteralExpr>(&cmd.rate->node)) {
      if (lit->value.is_numeric() && lit->value.as_real() < 0)
        warning(cmd.loc, "command '" + type.name + "." + cmd.name +
                             "': constant negative rate fails at runtime if enabled");
    } else if (auto* un = std::get_if<UnaryExpr>(&cmd.rate->node)) {
      if (un->op == UnaryOp::negate) {
        if (auto* l2 = std::get_if<LiteralExpr>(&un->operand->node)) {
          if (l2->value.is_numeric() && l2->value.as_real() > 0)
            warning(cmd.loc, "command '" + type.name + "." + cmd.name +
                                 "': constant negative rate fails at runtime if enabled");
        }
      }
    }

    for (const auto& action : cmd.actions) {
      if (const auto* a = std::get_if<AssignDecl>(&action)) {
        auto tt = target_type(a->target, a->target_anchored, inst);
        if (!tt) {
          error(cmd.loc, "command '" + cmd.name + "': assignment target '" +
                             a->target.str() + "' does not resolve to an attribute");
          continue;
        }
        auto vt = check_grounded(a->rhs, inst, false, cmd.loc);
        if (vt && !(*vt == *tt || (*tt == ValueType::real && *vt == ValueType::integer)))
          error(cmd.loc, "command '" + cmd.name + "': cannot assign " +
                             std::string(value_type_name(*vt)) + " to " +
                             value_type_name(*tt) + " attribute '" + a->target.str() + "'");
      } else if (const auto* o = std::get_if<ObserveAssignDecl>(&action)) {
        const RandomVariableDecl* rv = type.find_random_variable(o->rv_name);
        if (!rv) {
          error(cmd.loc, "command '" + cmd.name + "': unknown random variable '" +
                             o->rv_name + "'");
          continue;
        }
        auto tt = target_type(o->target, o->target_anchored, inst);
        if (!tt) {
          error(cmd.loc, "command '" + cmd.name + "': assignment target '" +
                             o->target.str() + "' does not resolve to an attribute");
          continue;
        }
        ValueType vt = rv->spec.result_type();
        if (!(vt == *tt || (*tt == ValueType::real && vt == ValueType::integer)))
          error(cmd.loc, "command '" + cmd.name + "': observe(" + o->rv_name +
                             ") yields " + value_type_name(vt) + " but target is " +
                             value_type_name(*tt));
      } else if (const auto* s = std::get_if<SpawnDecl>(&action)) {
        const TypeDecl* st = def.find_type(s->type_name);
        if (!st)
          error(cmd.loc, "command '" + cmd.name + "': spawn of undeclared type '" +
                             s->type_name + "'");
        if (!def.open)
          warning(cmd.loc, "command '" + cmd.name +
                               "': spawn in a closed system fails at runtime");
        if (schema) {
          Path parent = s->parent.empty()
                            ? inst
                            : (s->parent_anchored ? s->parent
                                                  : s->parent.prefixed_with(inst));
          try {
            ComponentRef ref = resolve_component(schema->skeleton(), parent);
            if (!ref.component->is_hierarchical())
              error(cmd.loc, "command '" + cmd.name + "': spawn parent '" +
                                 parent.str() + "' is atomic");
          } catch (const Error& err) {
            error(cmd.loc, "command '" + cmd.name + "': spawn parent: " + err.what());
          }
        }
      } else if (const auto* d = std::get_if<DespawnDecl>(&action)) {
        if (!def.open)
          warning(cmd.loc, "command '" + cmd.name +
                               "': despawn in a closed system fails at runtime");
        if (schema) {
          Path abs = d->target_anchored ? d->target : d->target.prefixed_with(inst);
          try {
            resolve_component(schema->skeleton(), abs);
          } catch (const Error& err) {
            // despawn targets may legitimately be spawned later; only the
            // clearly wrong shapes are flagged
            if (err.kind() == ErrorKind::type_mismatch)
              error(cmd.loc, "command '" + cmd.name + "': despawn target '" +
                                 abs.str() + "' is an attribute");
          }
        }
      }
    }
  }

  void run() {
    // declaration-level checks
    std::set<std::string> type_names;
    for (const auto& t : def.types) {
      if (!type_names.insert(t.name).second)
        error(t.loc, "duplicate type '" + t.name + "'");
      std::set<std::string> attr_names, rv_names, cmd_names;
      for (const auto& a : t.attributes)
        if (!attr_names.insert(a.name).second)
          error(a.loc, "duplicate attribute '" + a.name + "' in type '" + t.name + "'");
      for (const auto& r : t.random_variables)
        if (!rv_names.insert(r.name).second)
          error(r.loc, "duplicate random variable '" + r.name + "' in type '" + t.name + "'");
      for (const auto& c : t.commands)
        if (!cmd_names.insert(c.name).second)
          error(c.loc, "duplicate command '" + c.name + "' in type '" + t.name + "'");
      // init expressions: earlier attributes only
      for (std::size_t i = 0; i < t.attributes.size(); ++i) {
        const auto& a = t.attributes[i];
        auto vt = check_init(t, i, a.init, a.loc);
        if (vt && !(*vt == a.declared_type ||
                    (a.declared_type == ValueType::real && *vt == ValueType::integer)))
          error(a.loc, "attribute '" + a.name + "': init is " +
                           std::string(value_type_name(*vt)) + " but declared " +
                           value_type_name(a.declared_type));
      }
    }

    // instance tree assembles?
    try {
      schema.emplace(def);
    } catch (const Error& err) {
      error({}, err.what());
    }

    // per-instance grounded checks
    if (schema) {
      for (const auto& t : def.types) {
        if (t.random_variables.empty() && t.commands.empty()) continue;
        auto instances = instances_of_type(schema->skeleton(), t.name);
        for (const auto& inst : instances) {
          for (const auto& rv : t.random_variables) check_rv(rv, inst.path);
          for (const auto& cmd : t.commands) check_command(t, cmd, inst.path);
        }
      }
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate(const ModelDefinition& def) {
  Validator v{def, {}, std::nullopt};
  v.run();
  return v.out;
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

namespace {

// True when the expression mentions any of the given attribute names via
// a single-segment path.
bool references_attr(const Expr& e, const std::set<std::string>& names) {
  if (const auto* p = std::get_if<PathExpr>(&e.node))
    return !p->anchored && p->path.size() == 1 && names.count(p->path.segments[0]) != 0;
  if (const auto* u = std::get_if<UnaryExpr>(&e.node))
    return references_attr(*u->operand, names);
  if (const auto* b = std::get_if<BinaryExpr>(&e.node))
    return references_attr(*b->lhs, names) || references_attr(*b->rhs, names);
  if (const auto* q = std::get_if<QuantifiedExpr>(&e.node))
    return references_attr(*q->body, names);
  if (const auto* c = std::get_if<CountExpr>(&e.node))
    return references_attr(*c->predicate, names);
  return false;
}

// Evaluates one type's attribute inits in declaration order. Earlier
// attributes are visible through a scratch snapshot holding the partial
// instance under a fixed name.
std::vector<Attribute> evaluate_inits(const TypeDecl& type,
                                      std::uint64_t now) {
  std::vector<Attribute> done;
  for (std::size_t idx = 0; idx < type.attributes.size(); ++idx) {
    const auto& decl = type.attributes[idx];
    std::set<std::string> later;
    for (std::size_t j = idx; j < type.attributes.size(); ++j)
      later.insert(type.attributes[j].name);
    if (references_attr(*decl.init, later))
      fail(ErrorKind::cyclic_init,
           "attribute '" + type.name + "." + decl.name +
               "' init references a later-declared attribute");

    auto scratch_sys = std::make_shared<System>();
    scratch_sys->root = make_hierarchical(
        kRootTypeName, {Subcomponent{"self", make_atomic(type.name, done)}});
    SimulationState scratch;
    scratch.system = std::move(scratch_sys);
    scratch.time = now;

    ExprPtr grounded = ground_expr(decl.init, Path{{"self"}});
    Value v = eval_expr(*grounded, scratch);
    if (decl.declared_type == ValueType::real && v.is_integer())
      v = Value(static_cast<double>(v.as_integer()));
    if (v.type() != decl.declared_type)
      fail(ErrorKind::type_mismatch,
           "attribute '" + type.name + "." + decl.name + "': init evaluates to " +
               std::string(value_type_name(v.type())) + " but declared " +
               value_type_name(decl.declared_type));
    done.push_back(Attribute{decl.name, decl.declared_type, std::move(v)});
  }
  return done;
}

}  // namespace

ComponentPtr instantiate_type(const ModelDefinition& def, const std::string& type_name,
                              std::uint64_t now) {
  const TypeDecl* type = def.find_type(type_name);
  if (!type)
    fail(ErrorKind::unknown_component_type, "undeclared type '" + type_name + "'");
  if (type_is_atomic(*type)) return make_atomic(type_name, evaluate_inits(*type, now));
  return make_hierarchical(type_name, {});
}

BuiltModel build_model(const ModelDefinition& def, std::uint64_t global_seed) {
  (void)global_seed;  // streams are derived per trace at run time
  if (has_errors(def.diagnostics))
    fail(ErrorKind::syntax_error,
         "definition has parse errors:\n" + join_diagnostics(def.diagnostics));

  auto tree = assemble_tree(
      def, [&](const TypeDecl& t) { return evaluate_inits(t, 0); });
  BuiltModel model;
  model.initial = freeze_tree(*tree, def.open);
  model.definition = def;
  model.schema = ModelSchema(def);
  model.initial_commands = ground_commands(model.initial, def);
  return model;
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

namespace {

DistributionSpec ground_spec(const DistributionSpec& spec, const Path& inst) {
  DistributionSpec out;
  if (const auto* d = std::get_if<UniformRealDist>(&spec.dist))
    out.dist = UniformRealDist{ground_expr(d->min, inst), ground_expr(d->max, inst)};
  else if (const auto* d2 = std::get_if<UniformIntDist>(&spec.dist))
    out.dist = UniformIntDist{ground_expr(d2->min, inst), ground_expr(d2->max, inst)};
  else if (const auto* d3 = std::get_if<NormalRealDist>(&spec.dist))
    out.dist = NormalRealDist{ground_expr(d3->mean, inst), ground_expr(d3->stddev, inst)};
  else if (const auto* d4 = std::get_if<NormalIntDist>(&spec.dist))
    out.dist = NormalIntDist{ground_expr(d4->mean, inst), ground_expr(d4->stddev, inst)};
  else if (const auto* d5 = std::get_if<CustomRealDist>(&spec.dist))
    out.dist = CustomRealDist{ground_expr(d5->observe, inst)};
  else if (const auto* d6 = std::get_if<CustomIntDist>(&spec.dist))
    out.dist = CustomIntDist{ground_expr(d6->observe, inst)};
  return out;
}

void ground_instance(const TypeDecl& type, const Path& inst,
                     std::vector<SimpleCommand>& out) {
  for (const auto& cmd : type.commands) {
    SimpleCommand sc;
    sc.id = inst.empty() ? cmd.name : inst.str() + "." + cmd.name;
    sc.guard = ground_expr(cmd.guard, inst);
    sc.rate = ground_expr(cmd.rate, inst);
    for (const auto& action : cmd.actions) {
      if (const auto* a = std::get_if<AssignDecl>(&action)) {
        Path target = a->target_anchored ? a->target : a->target.prefixed_with(inst);
        sc.actions.push_back(
            SimpleCommand::Assign{std::move(target), ground_expr(a->rhs, inst)});
      } else if (const auto* o = std::get_if<ObserveAssignDecl>(&action)) {
        Path target = o->target_anchored ? o->target : o->target.prefixed_with(inst);
        const RandomVariableDecl* rv = type.find_random_variable(o->rv_name);
        if (!rv)
          fail(ErrorKind::unknown_path,
               "command '" + sc.id + "': unknown random variable '" + o->rv_name + "'");
        RandomVariable grounded;
        grounded.id = inst.empty() ? rv->name : inst.str() + "." + rv->name;
        grounded.spec = ground_spec(rv->spec, inst);
        sc.actions.push_back(
            SimpleCommand::ObserveAssign{std::move(target), std::move(grounded)});
      } else if (const auto* s = std::get_if<SpawnDecl>(&action)) {
        Path parent = s->parent.empty()
                          ? inst
                          : (s->parent_anchored ? s->parent : s->parent.prefixed_with(inst));
        sc.actions.push_back(
            SimpleCommand::Spawn{std::move(parent), s->base_name, s->type_name});
      } else if (const auto* d = std::get_if<DespawnDecl>(&action)) {
        Path target = d->target_anchored ? d->target : d->target.prefixed_with(inst);
        sc.actions.push_back(SimpleCommand::Despawn{std::move(target)});
      }
    }
    out.push_back(std::move(sc));
  }
}

void ground_walk(const Component* node, const ModelDefinition& def, Path& here,
                 std::vector<SimpleCommand>& out) {
  const TypeDecl* type = def.find_type(node->type_name());
  if (type && !type->commands.empty()) ground_instance(*type, here, out);
  if (node->is_hierarchical()) {
    for (const auto& sub : node->hierarchical().subcomponents) {
      here.segments.push_back(sub.name);
      ground_walk(sub.component.get(), def, here, out);
      here.segments.pop_back();
    }
  }
}

}  // namespace

std::vector<SimpleCommand> ground_commands(const SimulationState& state,
                                           const ModelDefinition& def) {
  std::vector<SimpleCommand> out;
  Path here;
  ground_walk(state.system->root.get(), def, here, out);
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

std::string print_distribution(const DistributionSpec& spec) {
  std::string out = spec.kind_name();
  out += "(";
  if (const auto* d = std::get_if<UniformRealDist>(&spec.dist))
    out += print_expr(*d->min) + ", " + print_expr(*d->max);
  else if (const auto* d2 = std::get_if<UniformIntDist>(&spec.dist))
    out += print_expr(*d2->min) + ", " + print_expr(*d2->max);
  else if (const auto* d3 = std::get_if<NormalRealDist>(&spec.dist))
    out += print_expr(*d3->mean) + ", " + print_expr(*d3->stddev);
  else if (const auto* d4 = std::get_if<NormalIntDist>(&spec.dist))
    out += print_expr(*d4->mean) + ", " + print_expr(*d4->stddev);
  else if (const auto* d5 = std::get_if<CustomRealDist>(&spec.dist))
    out += print_expr(*d5->observe);
  else if (const auto* d6 = std::get_if<CustomIntDist>(&spec.dist))
    out += print_expr(*d6->observe);
  out += ")";
  return out;
}

std::string print_target(const Path& p, bool anchored) {
  return anchored ? "root." + p.str() : p.str();
}

std::string print_action(const ActionDecl& action) {
  if (const auto* a = std::get_if<AssignDecl>(&action))
    return print_target(a->target, a->target_anchored) + " := " + print_expr(*a->rhs);
  if (const auto* o = std::get_if<ObserveAssignDecl>(&action))
    return print_target(o->target, o->target_anchored) + " := observe(" + o->rv_name + ")";
  if (const auto* s = std::get_if<SpawnDecl>(&action)) {
    std::string out = "spawn " + s->base_name + ":" + s->type_name;
    if (!s->parent.empty()) out += " in " + print_target(s->parent, s->parent_anchored);
    return out;
  }
  const auto& d = std::get<DespawnDecl>(action);
  return "despawn " + print_target(d.target, d.target_anchored);
}

}  // namespace

std::string pretty_print(const ModelDefinition& def) {
  std::string out;
  for (const auto& t : def.types) {
    out += "type " + t.name + " {\n";
    for (const auto& a : t.attributes)
      out += "  attr " + a.name + ": " + value_type_name(a.declared_type) + " = " +
             print_expr(*a.init) + ";\n";
    for (const auto& r : t.random_variables)
      out += "  rv " + r.name + " ~ " + print_distribution(r.spec) + ";\n";
    for (const auto& c : t.commands) {
      out += "  cmd " + c.name + ": when " + print_expr(*c.guard) + " rate " +
             print_expr(*c.rate);
      for (std::size_t i = 0; i < c.actions.size(); ++i)
        out += (i == 0 ? " do " : ", ") + print_action(c.actions[i]);
      out += ";\n";
    }
    out += "}\n\n";
  }
  out += "system {\n";
  out += def.open ? "  open;\n" : "  closed;\n";
  for (const auto& inst : def.instances) {
    out += "  instance " + inst.name + ": " + inst.type_name;
    if (!inst.parent.empty()) out += " in " + inst.parent.str();
    out += ";\n";
  }
  for (const auto& rel : def.relations)
    out += "  relation " + rel.name + ": " + rel.from.str() + " -- " + rel.to.str() + ";\n";
  out += "}\n";
  return out;
}

}  // namespace sosmc
