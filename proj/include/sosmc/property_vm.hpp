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
#include <memory>

#include "sosmc/bltl.hpp"

namespace sosmc {

// ---------------------------------------------------------------------------
// Compiled property programs. Atoms become straight-line stack bytecode
// (with short-circuit jumps and collection-binding ops); the temporal
// structure becomes a node table the monitor drives with the canonical
// await / eval / decide cycle, keeping one verdict register per
// subformula instance.
// ---------------------------------------------------------------------------

enum class OpCode : std::uint8_t {
  // stack ops
  push_const,       // a: constant index
  load_path,        // a: path index (absolute attribute path)
  load_binder,      // a: name index (binder), b: path index (attribute)
  load_time,
  op_add, op_sub, op_mul, op_div, op_neg,
  op_abs, op_floor, op_mod, op_min, op_max,
  cmp_lt, cmp_le, cmp_gt, cmp_ge, cmp_eq, cmp_ne,
  op_not,
  jump_false,       // a: target pc; jumps if top is false (top stays)
  jump_true,        // a: target pc; jumps if top is true (top stays)
  op_pop,
  bind_all,         // a: body pc, b: binder name index, c: type name index
  bind_some,        // same operands; existential fold
  bind_count,       // same operands; pushes the number of satisfying instances
  ret,
  // monitor driver ops (temporal control)
  await,            // block until the next state arrives
  eval,             // update subformula verdict registers bottom-up
  decide,           // a: root node; yield verdict if settled, else loop
};

struct Instr {
  OpCode op;
  std::int32_t a = -1;
  std::int32_t b = -1;
  std::int32_t c = -1;
};

struct PropertyProgram {
  enum class NodeKind : std::uint8_t {
    atom, quant_all, quant_some, negate, conj, disj, implies,
    next, eventually, always, until,
  };
  struct Node {
    NodeKind kind;
    std::uint64_t bound = 0;
    std::int32_t child_a = -1;  // node index
    std::int32_t child_b = -1;
    std::int32_t atom_pc = -1;  // atom: entry into `code`
    std::int32_t binder = -1;   // quant_*: name index
    std::int32_t type_name = -1;
  };

  std::vector<Instr> driver;  // await / eval / decide cycle
  std::vector<Instr> code;    // atom blocks, each ending in ret
  std::vector<Node> nodes;    // children precede parents; root last
  std::int32_t root = -1;
  std::vector<Value> constants;
  std::vector<Path> paths;
  std::vector<std::string> names;  // binders and component types
  std::uint64_t window = 0;        // required_window of the source formula
  std::string source;              // printed formula

  std::uint64_t capacity() const { return window + 1; }
};

using PropertyProgramPtr = std::shared_ptr<const PropertyProgram>;

/// Deterministic compilation; the formula must type-check against the
/// schema (throws type_mismatch / unknown_path / unknown_component_type).
PropertyProgramPtr compile(const FormulaPtr& formula, const ModelSchema& schema);

/// Textual opcode listing (the `--disasm` output).
std::string disassemble(const PropertyProgram& program);

/// Incremental monitor for one trace. Feed states in consecutive step
/// order; the verdict is three-valued and monotone once decided. Retains
/// at most capacity() = required_window+1 states.
class MonitorSession {
 public:
  explicit MonitorSession(PropertyProgramPtr program);
  ~MonitorSession();
  MonitorSession(MonitorSession&&) noexcept;
  MonitorSession& operator=(MonitorSession&&) noexcept;

  Verdict feed_state(const SimulationState& state);

  Verdict verdict() const;
  std::uint64_t steps_consumed() const { return consumed_; }
  std::size_t capacity() const { return static_cast<std::size_t>(program_->capacity()); }
  std::size_t retained_states() const { return window_.size(); }
  std::size_t peak_retained() const { return peak_retained_; }

  const PropertyProgram& program() const { return *program_; }

 private:
  struct Oblig;
  void update(Oblig& o, std::uint64_t now);
  const SimulationState& state_at(std::uint64_t position) const;

  PropertyProgramPtr program_;
  std::deque<SimulationState> window_;
  std::uint64_t consumed_ = 0;
  std::size_t peak_retained_ = 0;
  std::unique_ptr<Oblig> root_;
};

}  // namespace sosmc
