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

#include <deque>
#include <map>

#include "sosmc/descriptor.hpp"
#include "sosmc/rng.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Discrete-time stochastic execution. One enabled command fires per step,
// selected with probability rate_i / sum(rates); command actions apply
// atomically with right-hand sides read from the pre-step state. When no
// command is enabled the state stutters (bounded monitors always get the
// states they need).
// ---------------------------------------------------------------------------

/// Per-trace random streams, lazily derived by stream id. The command
/// selection stream uses a reserved id that cannot collide with grounded
/// random-variable ids.
class StreamSet {
 public:
  StreamSet() = default;
  StreamSet(std::uint64_t global_seed, std::uint64_t trace_index)
      : seed_(global_seed), trace_index_(trace_index) {}

  RngStream& stream(const std::string& id);
  RngStream& selection_stream() { return stream(kSelectionStreamId); }

  std::uint64_t global_seed() const { return seed_; }
  std::uint64_t trace_index() const { return trace_index_; }

  static constexpr const char* kSelectionStreamId = "$select";

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t trace_index_ = 0;
  std::map<std::string, RngStream> streams_;
};

/// Commands whose guard holds, paired with their evaluated rates, in
/// declaration order. Throws negative_rate; expression errors carry the
/// command id.
std::vector<std::pair<const SimpleCommand*, double>> enabled_commands(
    const SimulationState& state, const std::vector<SimpleCommand>& commands);

/// One simulation step. `def` supplies spawn templates. Throws
/// negative_rate, all_rates_zero, or action errors tagged with the
/// command id.
SimulationState step(const SimulationState& state,
                     const std::vector<SimpleCommand>& commands,
                     StreamSet& streams, const ModelDefinition& def);

/// Lazily extended simulation trace. States are produced on demand and
/// the prefix never changes; re-extension is bit-identical. Old states
/// can be evicted down to the window a monitor still needs.
class Trace {
 public:
  Trace(const BuiltModel& model, std::uint64_t global_seed, std::uint64_t trace_index);

  std::uint64_t global_seed() const { return streams_.global_seed(); }
  std::uint64_t trace_index() const { return streams_.trace_index(); }

  /// Index of the last simulated state (0 = initial state only).
  std::uint64_t last_step() const { return next_step_ - 1; }

  /// Simulates forward until last_step() >= target_step.
  void extend_to(std::uint64_t target_step);

  /// State at step index; the state must not have been evicted.
  const SimulationState& state_at(std::uint64_t step_index) const;

  /// Simulates one more state and returns it.
  const SimulationState& advance();

  /// Drops retained states below the given step index.
  void evict_below(std::uint64_t step_index);

  std::size_t retained_states() const { return states_.size(); }

 private:
  const BuiltModel* model_;
  StreamSet streams_;
  std::deque<SimulationState> states_;  // states_[i] has step_index base_ + i
  std::uint64_t base_ = 0;
  std::uint64_t next_step_ = 0;  // == base_ + states_.size()
  std::vector<SimpleCommand> commands_;
  std::uint64_t commands_version_ = 0;
};

/// Writes one line per state: `step<TAB>time<TAB>path=value...` with
/// attributes in depth-first order (the debug/oracle dump format).
std::string dump_state_line(const SimulationState& state);

}  // namespace sosmc
