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

#include "sosmc/property_vm.hpp"

#include <algorithm>
#include <cmath>

namespace sosmc {

// ---------------------------------------------------------------------------
// Compiler
// ---------------------------------------------------------------------------

namespace {

class Compiler {
 public:
  explicit Compiler(const ModelSchema& schema) : schema_(schema) {}

  PropertyProgram take(const FormulaPtr& f) {
    check_formula(*f, schema_);
    prog_.root = compile_node(*f);
    prog_.window = required_window(*f);
    prog_.source = print_formula(*f);
    prog_.driver = {Instr{OpCode::await, -1, -1, -1},
                    Instr{OpCode::eval, -1, -1, -1},
                    Instr{OpCode::decide, prog_.root, -1, -1}};
    return std::move(prog_);
  }

 private:
  std::int32_t constant_index(const Value& v) {
    for (std::size_t i = 0; i < prog_.constants.size(); ++i)
      if (prog_.constants[i] == v) return static_cast<std::int32_t>(i);
    prog_.constants.push_back(v);
    return static_cast<std::int32_t>(prog_.constants.size() - 1);
  }

  std::int32_t path_index(const Path& p) {
    for (std::size_t i = 0; i < prog_.paths.size(); ++i)
      if (prog_.paths[i] == p) return static_cast<std::int32_t>(i);
    prog_.paths.push_back(p);
    return static_cast<std::int32_t>(prog_.paths.size() - 1);
  }

  std::int32_t name_index(const std::string& n) {
    for (std::size_t i = 0; i < prog_.names.size(); ++i)
      if (prog_.names[i] == n) return static_cast<std::int32_t>(i);
    prog_.names.push_back(n);
    return static_cast<std::int32_t>(prog_.names.size() - 1);
  }

  std::int32_t emit(Instr i) {
    prog_.code.push_back(i);
    return static_cast<std::int32_t>(prog_.code.size() - 1);
  }

  void emit_expr(const Expr& e) {
    if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
      emit(Instr{OpCode::push_const, constant_index(lit->value), -1, -1});
      return;
    }
    if (const auto* p = std::get_if<PathExpr>(&e.node)) {
      emit(Instr{OpCode::load_path, path_index(p->path), -1, -1});
      return;
    }
    if (const auto* b = std::get_if<BinderPathExpr>(&e.node)) {
      emit(Instr{OpCode::load_binder, name_index(b->binder),
                 path_index(b->attr_path), -1});
      return;
    }
    if (std::get_if<TimeExpr>(&e.node)) {
      emit(Instr{OpCode::load_time, -1, -1, -1});
      return;
    }
    if (std::get_if<USampleExpr>(&e.node))
      fail(ErrorKind::type_mismatch, "'u' cannot appear in a property atom");
    if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
      emit_expr(*u->operand);
      switch (u->op) {
        case UnaryOp::negate: emit(Instr{OpCode::op_neg, -1, -1, -1}); break;
        case UnaryOp::logic_not: emit(Instr{OpCode::op_not, -1, -1, -1}); break;
        case UnaryOp::fn_abs: emit(Instr{OpCode::op_abs, -1, -1, -1}); break;
        case UnaryOp::fn_floor: emit(Instr{OpCode::op_floor, -1, -1, -1}); break;
      }
      return;
    }
    if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
      if (bin->op == BinaryOp::logic_and || bin->op == BinaryOp::logic_or) {
        emit_expr(*bin->lhs);
        OpCode jump = bin->op == BinaryOp::logic_and ? OpCode::jump_false
                                                     : OpCode::jump_true;
        std::int32_t patch = emit(Instr{jump, -1, -1, -1});
        emit(Instr{OpCode::op_pop, -1, -1, -1});
        emit_expr(*bin->rhs);
        prog_.code[patch].a = static_cast<std::int32_t>(prog_.code.size());
        return;
      }
      emit_expr(*bin->lhs);
      emit_expr(*bin->rhs);
      switch (bin->op) {
        case BinaryOp::add: emit(Instr{OpCode::op_add, -1, -1, -1}); break;
        case BinaryOp::sub: emit(Instr{OpCode::op_sub, -1, -1, -1}); break;
        case BinaryOp::mul: emit(Instr{OpCode::op_mul, -1, -1, -1}); break;
        case BinaryOp::div: emit(Instr{OpCode::op_div, -1, -1, -1}); break;
        case BinaryOp::fn_min: emit(Instr{OpCode::op_min, -1, -1, -1}); break;
        case BinaryOp::fn_max: emit(Instr{OpCode::op_max, -1, -1, -1}); break;
        case BinaryOp::fn_mod: emit(Instr{OpCode::op_mod, -1, -1, -1}); break;
        case BinaryOp::lt: emit(Instr{OpCode::cmp_lt, -1, -1, -1}); break;
        case BinaryOp::le: emit(Instr{OpCode::cmp_le, -1, -1, -1}); break;
        case BinaryOp::gt: emit(Instr{OpCode::cmp_gt, -1, -1, -1}); break;
        case BinaryOp::ge: emit(Instr{OpCode::cmp_ge, -1, -1, -1}); break;
        case BinaryOp::eq: emit(Instr{OpCode::cmp_eq, -1, -1, -1}); break;
        case BinaryOp::ne: emit(Instr{OpCode::cmp_ne, -1, -1, -1}); break;
        default: fail(ErrorKind::internal_error, "emit: unexpected binary op");
      }
      return;
    }
    if (const auto* q = std::get_if<QuantifiedExpr>(&e.node)) {
      std::int32_t body = compile_block(*q->body);
      emit(Instr{q->universal ? OpCode::bind_all : OpCode::bind_some, body,
                 name_index(q->binder), name_index(q->type_name)});
      return;
    }
    const auto& c = std::get<CountExpr>(e.node);
    std::int32_t body = compile_block(*c.predicate);
    emit(Instr{OpCode::bind_count, body, name_index(c.binder),
               name_index(c.type_name)});
  }

  // Emits a self-contained block (collection bodies are emitted out of
  // line, before the block that binds them).
  std::int32_t compile_block(const Expr& e) {
    std::int32_t entry = static_cast<std::int32_t>(prog_.code.size());
    emit_expr(e);
    emit(Instr{OpCode::ret, -1, -1, -1});
    return entry;
  }

  std::int32_t add_node(PropertyProgram::Node n) {
    prog_.nodes.push_back(n);
    return static_cast<std::int32_t>(prog_.nodes.size() - 1);
  }

  std::int32_t compile_node(const Formula& f) {
    using Kind = PropertyProgram::NodeKind;
    if (const auto* atom = std::get_if<AtomNode>(&f.node)) {
      PropertyProgram::Node n{};
      n.kind = Kind::atom;
      n.atom_pc = compile_block(*atom->expr);
      return add_node(n);
    }
    if (const auto* q = std::get_if<QuantNode>(&f.node)) {
      std::int32_t child = compile_node(*q->body);
      PropertyProgram::Node n{};
      n.kind = q->universal ? Kind::quant_all : Kind::quant_some;
      n.child_a = child;
      n.binder = name_index(q->binder);
      n.type_name = name_index(q->type_name);
      return add_node(n);
    }
    if (const auto* nn = std::get_if<NotNode>(&f.node)) {
      std::int32_t child = compile_node(*nn->f);
      return add_node(PropertyProgram::Node{Kind::negate, 0, child, -1, -1, -1, -1});
    }
    if (const auto* a = std::get_if<AndNode>(&f.node)) {
      std::int32_t l = compile_node(*a->lhs);
      std::int32_t r = compile_node(*a->rhs);
      return add_node(PropertyProgram::Node{Kind::conj, 0, l, r, -1, -1, -1});
    }
    if (const auto* o = std::get_if<OrNode>(&f.node)) {
      std::int32_t l = compile_node(*o->lhs);
      std::int32_t r = compile_node(*o->rhs);
      return add_node(PropertyProgram::Node{Kind::disj, 0, l, r, -1, -1, -1});
    }
    if (const auto* i = std::get_if<ImpliesNode>(&f.node)) {
      std::int32_t l = compile_node(*i->lhs);
      std::int32_t r = compile_node(*i->rhs);
      return add_node(PropertyProgram::Node{Kind::implies, 0, l, r, -1, -1, -1});
    }
    if (const auto* x = std::get_if<NextNode>(&f.node)) {
      std::int32_t child = compile_node(*x->f);
      return add_node(PropertyProgram::Node{Kind::next, 0, child, -1, -1, -1, -1});
    }
    if (const auto* fi = std::get_if<FinallyNode>(&f.node)) {
      std::int32_t child = compile_node(*fi->f);
      return add_node(
          PropertyProgram::Node{Kind::eventually, fi->bound, child, -1, -1, -1, -1});
    }
    if (const auto* g = std::get_if<GloballyNode>(&f.node)) {
      std::int32_t child = compile_node(*g->f);
      return add_node(
          PropertyProgram::Node{Kind::always, g->bound, child, -1, -1, -1, -1});
    }
    const auto& u = std::get<UntilNode>(f.node);
    std::int32_t l = compile_node(*u.lhs);
    std::int32_t r = compile_node(*u.rhs);
    return add_node(PropertyProgram::Node{Kind::until, u.bound, l, r, -1, -1, -1});
  }

  const ModelSchema& schema_;
  PropertyProgram prog_;
};

}  // namespace

PropertyProgramPtr compile(const FormulaPtr& formula, const ModelSchema& schema) {
  Compiler c(schema);
  return std::make_shared<const PropertyProgram>(c.take(formula));
}

// ---------------------------------------------------------------------------
// Disassembler
// ---------------------------------------------------------------------------

namespace {

const char* opcode_name(OpCode op) {
  switch (op) {
    case OpCode::push_const: return "push";
    case OpCode::load_path: return "load";
    case OpCode::load_binder: return "loadb";
    case OpCode::load_time: return "time";
    case OpCode::op_add: return "add";
    case OpCode::op_sub: return "sub";
    case OpCode::op_mul: return "mul";
    case OpCode::op_div: return "div";
    case OpCode::op_neg: return "neg";
    case OpCode::op_abs: return "abs";
    case OpCode::op_floor: return "floor";
    case OpCode::op_mod: return "mod";
    case OpCode::op_min: return "min";
    case OpCode::op_max: return "max";
    case OpCode::cmp_lt: return "lt";
    case OpCode::cmp_le: return "le";
    case OpCode::cmp_gt: return "gt";
    case OpCode::cmp_ge: return "ge";
    case OpCode::cmp_eq: return "eq";
    case OpCode::cmp_ne: return "ne";
    case OpCode::op_not: return "not";
    case OpCode::jump_false: return "jfalse";
    case OpCode::jump_true: return "jtrue";
    case OpCode::op_pop: return "pop";
    case OpCode::bind_all: return "bindall";
    case OpCode::bind_some: return "bindsome";
    case OpCode::bind_count: return "bindcount";
    case OpCode::ret: return "ret";
    case OpCode::await: return "await";
    case OpCode::eval: return "eval";
    case OpCode::decide: return "decide";
  }
  return "?";
}

std::string node_text(const PropertyProgram& p, const PropertyProgram::Node& n) {
  using Kind = PropertyProgram::NodeKind;
  auto child = [](std::int32_t c) { return "n" + std::to_string(c); };
  switch (n.kind) {
    case Kind::atom: return "atom @" + std::to_string(n.atom_pc);
    case Kind::quant_all:
      return "forall " + p.names[n.binder] + " in " + p.names[n.type_name] + " " +
             child(n.child_a);
    case Kind::quant_some:
      return "exists " + p.names[n.binder] + " in " + p.names[n.type_name] + " " +
             child(n.child_a);
    case Kind::negate: return "not " + child(n.child_a);
    case Kind::conj: return "and " + child(n.child_a) + " " + child(n.child_b);
    case Kind::disj: return "or " + child(n.child_a) + " " + child(n.child_b);
    case Kind::implies: return "implies " + child(n.child_a) + " " + child(n.child_b);
    case Kind::next: return "next " + child(n.child_a);
    case Kind::eventually:
      return "finally<=" + std::to_string(n.bound) + " " + child(n.child_a);
    case Kind::always:
      return "globally<=" + std::to_string(n.bound) + " " + child(n.child_a);
    case Kind::until:
      return "until<=" + std::to_string(n.bound) + " " + child(n.child_a) + " " +
             child(n.child_b);
  }
  return "?";
}

}  // namespace

std::string disassemble(const PropertyProgram& p) {
  std::string out;
  out += "; property: " + p.source + "\n";
  out += "; window=" + std::to_string(p.window) +
         " capacity=" + std::to_string(p.capacity()) + " states\n";
  out += "driver:\n";
  for (const auto& i : p.driver) {
    out += std::string("  ") + opcode_name(i.op);
    if (i.op == OpCode::decide) out += " n" + std::to_string(i.a);
    out += "\n";
  }
  out += "nodes (root n" + std::to_string(p.root) + "):\n";
  for (std::size_t k = 0; k < p.nodes.size(); ++k)
    out += "  n" + std::to_string(k) + ": " + node_text(p, p.nodes[k]) + "\n";
  out += "code:\n";
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    const Instr& i = p.code[pc];
    char head[16];
    std::snprintf(head, sizeof head, "  %04zu ", pc);
    out += head;
    out += opcode_name(i.op);
    switch (i.op) {
      case OpCode::push_const: out += " " + p.constants[i.a].str(); break;
      case OpCode::load_path: out += " " + p.paths[i.a].str(); break;
      case OpCode::load_binder:
        out += " " + p.names[i.a] + "." + p.paths[i.b].str();
        break;
      case OpCode::jump_false:
      case OpCode::jump_true:
        out += " @" + std::to_string(i.a);
        break;
      case OpCode::bind_all:
      case OpCode::bind_some:
      case OpCode::bind_count:
        out += " @" + std::to_string(i.a) + " " + p.names[i.b] + " in " + p.names[i.c];
        break;
      default: break;
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Atom bytecode interpreter
// ---------------------------------------------------------------------------

namespace {

class AtomVm {
 public:
  AtomVm(const PropertyProgram& prog, const SimulationState& state)
      : prog_(prog), state_(state) {}

  Value run(std::int32_t entry, const BinderScopePtr& env) {
    std::vector<Value> stack;
    std::int32_t pc = entry;
    for (;;) {
      const Instr& i = prog_.code[pc];
      switch (i.op) {
        case OpCode::push_const:
          stack.push_back(prog_.constants[i.a]);
          break;
        case OpCode::load_path:
          stack.push_back(resolve_attribute(state_, prog_.paths[i.a]));
          break;
        case OpCode::load_binder: {
          const Path* base = BinderScope::lookup(env.get(), prog_.names[i.a]);
          if (!base)
            fail(ErrorKind::unbound_binder,
                 "binder '" + prog_.names[i.a] + "' is not in scope");
          stack.push_back(
              resolve_attribute(state_, prog_.paths[i.b].prefixed_with(*base)));
          break;
        }
        case OpCode::load_time:
          stack.push_back(Value(static_cast<std::int64_t>(state_.time)));
          break;
        case OpCode::jump_false:
          if (!stack.back().as_boolean()) {
            pc = i.a;
            continue;
          }
          break;
        case OpCode::jump_true:
          if (stack.back().as_boolean()) {
            pc = i.a;
            continue;
          }
          break;
        case OpCode::op_pop:
          stack.pop_back();
          break;
        case OpCode::op_not:
          stack.back() = Value(!stack.back().as_boolean());
          break;
        case OpCode::op_neg: case OpCode::op_abs: case OpCode::op_floor: {
          UnaryOp op = i.op == OpCode::op_neg
                           ? UnaryOp::negate
                           : (i.op == OpCode::op_abs ? UnaryOp::fn_abs
                                                     : UnaryOp::fn_floor);
          stack.back() = apply_unary_op(op, stack.back());
          break;
        }
        case OpCode::op_add: case OpCode::op_sub: case OpCode::op_mul:
        case OpCode::op_div: case OpCode::op_mod: case OpCode::op_min:
        case OpCode::op_max: case OpCode::cmp_lt: case OpCode::cmp_le:
        case OpCode::cmp_gt: case OpCode::cmp_ge: case OpCode::cmp_eq:
        case OpCode::cmp_ne: {
          Value rhs = std::move(stack.back());
          stack.pop_back();
          Value lhs = std::move(stack.back());
          stack.pop_back();
          stack.push_back(binary_result(i.op, lhs, rhs));
          break;
        }
        case OpCode::bind_all: case OpCode::bind_some: case OpCode::bind_count: {
          auto instances = instances_of_type(state_, prog_.names[i.c]);
          if (i.op == OpCode::bind_count) {
            std::int64_t count = 0;
            for (const auto& inst : instances) {
              BinderScopePtr inner =
                  BinderScope::extend(env, prog_.names[i.b], inst.path);
              if (run(i.a, inner).as_boolean()) ++count;
            }
            stack.push_back(Value(count));
          } else {
            bool universal = i.op == OpCode::bind_all;
            bool result = universal;
            for (const auto& inst : instances) {
              BinderScopePtr inner =
                  BinderScope::extend(env, prog_.names[i.b], inst.path);
              bool v = run(i.a, inner).as_boolean();
              if (universal && !v) { result = false; break; }
              if (!universal && v) { result = true; break; }
            }
            stack.push_back(Value(result));
          }
          break;
        }
        case OpCode::ret: {
          Value out = std::move(stack.back());
          return out;
        }
        case OpCode::await: case OpCode::eval: case OpCode::decide:
          fail(ErrorKind::internal_error, "driver op inside an atom block");
      }
      ++pc;
    }
  }

 private:
  static Value binary_result(OpCode op, const Value& a, const Value& b) {
    BinaryOp bop;
    switch (op) {
      case OpCode::op_add: bop = BinaryOp::add; break;
      case OpCode::op_sub: bop = BinaryOp::sub; break;
      case OpCode::op_mul: bop = BinaryOp::mul; break;
      case OpCode::op_div: bop = BinaryOp::div; break;
      case OpCode::op_mod: bop = BinaryOp::fn_mod; break;
      case OpCode::op_min: bop = BinaryOp::fn_min; break;
      case OpCode::op_max: bop = BinaryOp::fn_max; break;
      case OpCode::cmp_lt: bop = BinaryOp::lt; break;
      case OpCode::cmp_le: bop = BinaryOp::le; break;
      case OpCode::cmp_gt: bop = BinaryOp::gt; break;
      case OpCode::cmp_ge: bop = BinaryOp::ge; break;
      case OpCode::cmp_eq: bop = BinaryOp::eq; break;
      default: bop = BinaryOp::ne; break;
    }
    return apply_binary_op(bop, a, b);
  }

  const PropertyProgram& prog_;
  const SimulationState& state_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Monitor engine
// ---------------------------------------------------------------------------

// One obligation = one subformula instance anchored at a trace position
// (plus its binder environment). Children are created lazily as their
// start states arrive; a decided obligation drops its children.
struct MonitorSession::Oblig {
  std::int32_t node;
  std::uint64_t start;
  BinderScopePtr env;
  Verdict v = Verdict::undecided;
  std::vector<std::unique_ptr<Oblig>> kids_a;
  std::vector<std::unique_ptr<Oblig>> kids_b;  // until: rhs instances
  bool expanded = false;                       // quantifier: instances bound

  Oblig(std::int32_t node_, std::uint64_t start_, BinderScopePtr env_)
      : node(node_), start(start_), env(std::move(env_)) {}
};

MonitorSession::MonitorSession(PropertyProgramPtr program)
    : program_(std::move(program)) {
  root_ = std::make_unique<Oblig>(program_->root, 0, nullptr);
}

MonitorSession::~MonitorSession() = default;
MonitorSession::MonitorSession(MonitorSession&&) noexcept = default;
MonitorSession& MonitorSession::operator=(MonitorSession&&) noexcept = default;

Verdict MonitorSession::verdict() const { return root_->v; }

const SimulationState& MonitorSession::state_at(std::uint64_t position) const {
  if (window_.empty() || position > window_.back().step_index ||
      position < window_.front().step_index)
    fail(ErrorKind::internal_error,
         "monitor window does not hold state " + std::to_string(position));
  return window_[position - window_.front().step_index];
}

Verdict MonitorSession::feed_state(const SimulationState& state) {
  if (state.step_index != consumed_)
    fail(ErrorKind::out_of_order_state,
         "expected state " + std::to_string(consumed_) + ", got " +
             std::to_string(state.step_index));
  // the canonical driver cycle: await (a state just arrived) ...
  window_.push_back(state);
  while (window_.size() > capacity()) window_.pop_front();
  peak_retained_ = std::max(peak_retained_, window_.size());
  ++consumed_;
  // ... eval: refresh verdict registers bottom-up ...
  if (root_->v == Verdict::undecided) update(*root_, state.step_index);
  // ... decide: the top-level register, frozen once settled.
  return root_->v;
}

void MonitorSession::update(Oblig& o, std::uint64_t now) {
  using Kind = PropertyProgram::NodeKind;
  if (o.v != Verdict::undecided) return;
  const PropertyProgram::Node& n = program_->nodes[o.node];

  auto make_kid = [&](std::int32_t node, std::uint64_t start, BinderScopePtr env) {
    return std::make_unique<Oblig>(node, start, std::move(env));
  };
  auto settle = [&](Verdict v) {
    o.v = v;
    if (v != Verdict::undecided) {
      o.kids_a.clear();
      o.kids_b.clear();
    }
  };
  auto kid_verdict = [&](const std::vector<std::unique_ptr<Oblig>>& kids,
                         std::size_t idx) {
    return idx < kids.size() ? kids[idx]->v : Verdict::undecided;
  };

  switch (n.kind) {
    case Kind::atom: {
      if (now < o.start) return;
      AtomVm vm(*program_, state_at(o.start));
      settle(verdict_of(vm.run(n.atom_pc, o.env).as_boolean()));
      return;
    }
    case Kind::quant_all:
    case Kind::quant_some: {
      if (!o.expanded) {
        if (now < o.start) return;
        auto instances = instances_of_type(state_at(o.start), program_->names[n.type_name]);
        for (const auto& inst : instances)
          o.kids_a.push_back(make_kid(
              n.child_a, o.start,
              BinderScope::extend(o.env, program_->names[n.binder], inst.path)));
        o.expanded = true;
      }
      Verdict acc = n.kind == Kind::quant_all ? Verdict::holds : Verdict::fails;
      for (auto& kid : o.kids_a) {
        update(*kid, now);
        acc = n.kind == Kind::quant_all ? verdict_and(acc, kid->v)
                                        : verdict_or(acc, kid->v);
        if (acc == (n.kind == Kind::quant_all ? Verdict::fails : Verdict::holds))
          break;  // decided; later siblings need not be touched
      }
      settle(acc);
      return;
    }
    case Kind::negate: {
      if (o.kids_a.empty()) o.kids_a.push_back(make_kid(n.child_a, o.start, o.env));
      update(*o.kids_a[0], now);
      settle(verdict_not(o.kids_a[0]->v));
      return;
    }
    case Kind::conj:
    case Kind::disj:
    case Kind::implies: {
      if (o.kids_a.empty()) {
        o.kids_a.push_back(make_kid(n.child_a, o.start, o.env));
        o.kids_a.push_back(make_kid(n.child_b, o.start, o.env));
      }
      update(*o.kids_a[0], now);
      Verdict l = o.kids_a[0]->v;
      // a decisive left side settles without touching the right side
      if (n.kind == Kind::conj && l == Verdict::fails) return settle(Verdict::fails);
      if (n.kind == Kind::disj && l == Verdict::holds) return settle(Verdict::holds);
      if (n.kind == Kind::implies && l == Verdict::fails) return settle(Verdict::holds);
      update(*o.kids_a[1], now);
      Verdict r = o.kids_a[1]->v;
      settle(n.kind == Kind::conj
                 ? verdict_and(l, r)
                 : (n.kind == Kind::disj ? verdict_or(l, r) : verdict_implies(l, r)));
      return;
    }
    case Kind::next: {
      if (o.kids_a.empty()) {
        if (now < o.start + 1) return;
        o.kids_a.push_back(make_kid(n.child_a, o.start + 1, o.env));
      }
      update(*o.kids_a[0], now);
      settle(o.kids_a[0]->v);
      return;
    }
    case Kind::eventually:
    case Kind::always: {
      // one child instance per offset in [0, bound], created as states arrive
      while (o.kids_a.size() <= n.bound &&
             o.start + o.kids_a.size() <= now)
        o.kids_a.push_back(make_kid(n.child_a, o.start + o.kids_a.size(), o.env));
      for (auto& kid : o.kids_a) update(*kid, now);
      // Kleene fold over all bound+1 offsets; instances not yet created
      // count as undecided
      Verdict acc = n.kind == Kind::eventually ? Verdict::fails : Verdict::holds;
      for (std::size_t i = 0; i <= n.bound; ++i) {
        Verdict kv = kid_verdict(o.kids_a, i);
        acc = n.kind == Kind::eventually ? verdict_or(acc, kv) : verdict_and(acc, kv);
      }
      settle(acc);
      return;
    }
    case Kind::until: {
      // unrolling: b0 | (a0 & (b1 | (a1 & ( ... b_t))))
      while (o.kids_b.size() <= n.bound && o.start + o.kids_b.size() <= now) {
        std::uint64_t offset = o.kids_b.size();
        o.kids_b.push_back(make_kid(n.child_b, o.start + offset, o.env));
        if (offset < n.bound)
          o.kids_a.push_back(make_kid(n.child_a, o.start + offset, o.env));
      }
      for (auto& kid : o.kids_a) update(*kid, now);
      for (auto& kid : o.kids_b) update(*kid, now);
      Verdict acc = kid_verdict(o.kids_b, n.bound);
      for (std::size_t i = n.bound; i-- > 0;)
        acc = verdict_or(kid_verdict(o.kids_b, i),
                         verdict_and(kid_verdict(o.kids_a, i), acc));
      settle(acc);
      return;
    }
  }
}

}  // namespace sosmc
