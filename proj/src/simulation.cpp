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

#include "sosmc/simulation.hpp"

#include <cmath>

namespace sosmc {

RngStream& StreamSet::stream(const std::string& id) {
  auto it = streams_.find(id);
  if (it != streams_.end()) return it->second;
  auto [jt, _] = streams_.emplace(id, RngStream::derive(seed_, trace_index_, id));
  return jt->second;
}

std::vector<std::pair<const SimpleCommand*, double>> enabled_commands(
    const SimulationState& state, const std::vector<SimpleCommand>& commands) {
  std::vector<std::pair<const SimpleCommand*, double>> out;
  for (const auto& cmd : commands) {
    bool enabled;
    try {
      enabled = eval_expr(*cmd.guard, state).as_boolean();
    } catch (const Error& e) {
      throw Error(e.kind(), "command '" + cmd.id + "' guard: " + e.what());
    }
    if (!enabled) continue;
    double rate;
    try {
      Value v = eval_expr(*cmd.rate, state);
      rate = v.as_real();
    } catch (const Error& e) {
      throw Error(e.kind(), "command '" + cmd.id + "' rate: " + e.what());
    }
    if (!(rate >= 0.0) || !std::isfinite(rate))
      fail(ErrorKind::negative_rate,
           "command '" + cmd.id + "' has rate " + std::to_string(rate));
    out.emplace_back(&cmd, rate);
  }
  return out;
}

namespace {

const SimpleCommand& select_command(
    const std::vector<std::pair<const SimpleCommand*, double>>& enabled,
    RngStream& selection) {
  double total = 0.0;
  for (const auto& [cmd, rate] : enabled) total += rate;
  if (total <= 0.0)
    fail(ErrorKind::all_rates_zero,
         "all " + std::to_string(enabled.size()) + " enabled commands have rate 0");
  double r = selection.next_unit() * total;
  double acc = 0.0;
  for (const auto& [cmd, rate] : enabled) {
    acc += rate;
    if (r < acc) return *cmd;
  }
  return *enabled.back().first;  // numeric edge: r == total
}

SimulationState bump_time(SimulationState s) {
  s.step_index += 1;
  s.time += 1;
  return s;
}

// Spawns under `parent` with an auto-suffixed unique name drawn from the
// system's monotonic spawn counter.
SimulationState apply_spawn(const SimulationState& state, const SimpleCommand::Spawn& sp,
                            const ModelDefinition& def, const std::string& cmd_id) {
  if (!state.system->open)
    fail(ErrorKind::closed_system, "command '" + cmd_id + "': spawn in a closed system");
  std::uint64_t seq = state.system->spawn_seq + 1;
  std::string name = sp.base_name + "_" + std::to_string(seq);
  ComponentPtr fresh = instantiate_type(def, sp.type_name, state.time);
  SimulationState out = apply_structural_change(
      state, AddComponent{sp.parent, Subcomponent{name, std::move(fresh)}});
  auto sys = std::make_shared<System>(*out.system);
  sys->spawn_seq = seq;
  out.system = std::move(sys);
  return out;
}

}  // namespace

SimulationState step(const SimulationState& state,
                     const std::vector<SimpleCommand>& commands, StreamSet& streams,
                     const ModelDefinition& def) {
  auto enabled = enabled_commands(state, commands);
  if (enabled.empty()) return bump_time(state);  // stutter on deadlock

  const SimpleCommand& cmd = select_command(enabled, streams.selection_stream());

  // right-hand sides and observations read the pre-step state
  struct PendingWrite {
    Path target;
    Value value;
  };
  std::vector<PendingWrite> writes;
  std::vector<const SimpleCommand::Action*> structural;
  for (const auto& action : cmd.actions) {
    try {
      if (const auto* a = std::get_if<SimpleCommand::Assign>(&action)) {
        writes.push_back(PendingWrite{a->target, eval_expr(*a->rhs, state)});
      } else if (const auto* o = std::get_if<SimpleCommand::ObserveAssign>(&action)) {
        RngStream& stream = streams.stream(o->rv.id);
        writes.push_back(PendingWrite{o->target, observe(o->rv, state, stream)});
      } else {
        structural.push_back(&action);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "command '" + cmd.id + "': " + e.what());
    }
  }

  SimulationState next = state;
  try {
    for (auto& w : writes) next = with_attribute(next, w.target, w.value);
    for (const auto* action : structural) {
      if (const auto* sp = std::get_if<SimpleCommand::Spawn>(action)) {
        next = apply_spawn(next, *sp, def, cmd.id);
      } else {
        const auto& dp = std::get<SimpleCommand::Despawn>(*action);
        next = apply_structural_change(next, RemoveComponent{dp.target});
      }
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "command '" + cmd.id + "': " + e.what());
  }
  return bump_time(next);
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

Trace::Trace(const BuiltModel& model, std::uint64_t global_seed,
             std::uint64_t trace_index)
    : model_(&model), streams_(global_seed, trace_index) {
  states_.push_back(model.initial);
  next_step_ = 1;
  commands_ = model.initial_commands;
  commands_version_ = model.initial.system->structure_version;
}

const SimulationState& Trace::advance() {
  const SimulationState& current = states_.back();
  if (current.system->structure_version != commands_version_) {
    commands_ = ground_commands(current, model_->definition);
    commands_version_ = current.system->structure_version;
  }
  states_.push_back(step(current, commands_, streams_, model_->definition));
  ++next_step_;
  return states_.back();
}

void Trace::extend_to(std::uint64_t target_step) {
  while (last_step() < target_step) advance();
}

const SimulationState& Trace::state_at(std::uint64_t step_index) const {
  if (step_index < base_ || step_index >= next_step_)
    fail(ErrorKind::internal_error,
         "trace state " + std::to_string(step_index) + " not retained");
  return states_[step_index - base_];
}

void Trace::evict_below(std::uint64_t step_index) {
  while (base_ < step_index && states_.size() > 1) {
    states_.pop_front();
    ++base_;
  }
}

// ---------------------------------------------------------------------------
// Dump format
// ---------------------------------------------------------------------------

namespace {

void dump_attrs(const Component* node, Path& here, std::string& out) {
  if (node->is_atomic()) {
    for (const auto& a : node->atomic().attributes) {
      out += '\t';
      if (!here.empty()) out += here.str() + ".";
      out += a.name + "=" + a.value.str();
    }
    return;
  }
  for (const auto& sub : node->hierarchical().subcomponents) {
    here.segments.push_back(sub.name);
    dump_attrs(sub.component.get(), here, out);
    here.segments.pop_back();
  }
}

}  // namespace

std::string dump_state_line(const SimulationState& state) {
  std::string out = std::to_string(state.step_index) + "\t" + std::to_string(state.time);
  Path here;
  dump_attrs(state.system->root.get(), here, out);
  return out;
}

}  // namespace sosmc
