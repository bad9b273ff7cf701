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

#include <string>
#include <variant>

#include "sosmc/expr.hpp"
#include "sosmc/rng.hpp"

namespace sosmc {

// Distribution parameters are expressions, re-evaluated at every
// observation, so a distribution can depend on the model state and on
// `time` (e.g. traffic that varies over the day).

struct UniformRealDist { ExprPtr min, max; };
struct UniformIntDist  { ExprPtr min, max; };
struct NormalRealDist  { ExprPtr mean, stddev; };
struct NormalIntDist   { ExprPtr mean, stddev; };
/// Inverse-transform style user distribution: an expression over the
/// reserved symbol `u`, one fresh uniform(0,1) sample per observation.
struct CustomRealDist  { ExprPtr observe; };
struct CustomIntDist   { ExprPtr observe; };

struct DistributionSpec {
  std::variant<UniformRealDist, UniformIntDist, NormalRealDist, NormalIntDist,
               CustomRealDist, CustomIntDist>
      dist;

  const char* kind_name() const;
  ValueType result_type() const;
};

struct RandomVariable {
  std::string id;  // unique within the model's random-variable table
  DistributionSpec spec;
};

/// Draws one observation, advancing the stream. Uniform draws stay inside
/// [min, max] (integer uniform includes both endpoints); normal draws use
/// Box-Muller; the integer variants round to nearest. Throws
/// invalid_parameters when min > max or stddev < 0; expression errors
/// propagate.
Value observe(const RandomVariable& var, const SimulationState& state,
              RngStream& stream);

/// Same, with an explicit evaluation context (grounded binders etc.).
Value observe(const RandomVariable& var, const EvalContext& ctx, RngStream& stream);

}  // namespace sosmc
