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

#include "sosmc/bltl_reference.hpp"

namespace sosmc {

namespace {

bool ref_eval(const Formula& f, const std::vector<SimulationState>& trace,
              std::size_t pos, const BinderScopePtr& env) {
  if (const auto* atom = std::get_if<AtomNode>(&f.node)) {
    EvalContext ctx;
    ctx.state = &trace[pos];
    ctx.binders = env;
    return eval_expr(*atom->expr, ctx).as_boolean();
  }
  if (const auto* q = std::get_if<QuantNode>(&f.node)) {
    auto instances = instances_of_type(trace[pos], q->type_name);
    for (const auto& inst : instances) {
      BinderScopePtr inner = BinderScope::extend(env, q->binder, inst.path);
      bool v = ref_eval(*q->body, trace, pos, inner);
      if (q->universal && !v) return false;
      if (!q->universal && v) return true;
    }
    return q->universal;
  }
  if (const auto* n = std::get_if<NotNode>(&f.node))
    return !ref_eval(*n->f, trace, pos, env);
  if (const auto* a = std::get_if<AndNode>(&f.node))
    return ref_eval(*a->lhs, trace, pos, env) && ref_eval(*a->rhs, trace, pos, env);
  if (const auto* o = std::get_if<OrNode>(&f.node))
    return ref_eval(*o->lhs, trace, pos, env) || ref_eval(*o->rhs, trace, pos, env);
  if (const auto* i = std::get_if<ImpliesNode>(&f.node))
    return !ref_eval(*i->lhs, trace, pos, env) || ref_eval(*i->rhs, trace, pos, env);
  if (const auto* x = std::get_if<NextNode>(&f.node))
    return ref_eval(*x->f, trace, pos + 1, env);
  if (const auto* fi = std::get_if<FinallyNode>(&f.node)) {
    for (std::uint64_t i = 0; i <= fi->bound; ++i)
      if (ref_eval(*fi->f, trace, pos + i, env)) return true;
    return false;
  }
  if (const auto* g = std::get_if<GloballyNode>(&f.node)) {
    for (std::uint64_t i = 0; i <= g->bound; ++i)
      if (!ref_eval(*g->f, trace, pos + i, env)) return false;
    return true;
  }
  const auto& u = std::get<UntilNode>(f.node);
  for (std::uint64_t i = 0; i <= u.bound; ++i) {
    if (ref_eval(*u.rhs, trace, pos + i, env)) return true;
    if (!ref_eval(*u.lhs, trace, pos + i, env)) return false;
  }
  return false;
}

}  // namespace

Verdict reference_eval(const Formula& f, const std::vector<SimulationState>& trace) {
  std::uint64_t window = required_window(f);
  if (trace.size() < window + 1)
    fail(ErrorKind::trace_too_short,
         "need " + std::to_string(window + 1) + " states, got " +
             std::to_string(trace.size()));
  return verdict_of(ref_eval(f, trace, 0, nullptr));
}

}  // namespace sosmc
