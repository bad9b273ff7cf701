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

#include <vector>

#include "sosmc/bltl.hpp"

namespace sosmc {

/// Direct recursive bounded-LTL semantics over a fully materialized
/// trace. This is the verification oracle for the incremental property
/// VM: it never touches bytecode or monitor state. The trace must hold at
/// least required_window(f)+1 states (throws trace_too_short otherwise).
Verdict reference_eval(const Formula& f, const std::vector<SimulationState>& trace);

}  // namespace sosmc
