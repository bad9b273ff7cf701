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

#include "sosmc/stochastic.hpp"

#include <cmath>

namespace sosmc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double eval_real_param(const ExprPtr& e, const EvalContext& ctx, const char* what) {
  Value v = eval_expr(*e, ctx);
  if (!v.is_numeric())
    fail(ErrorKind::invalid_parameters,
         std::string(what) + " parameter must be numeric, got " + v.str());
  return v.as_real();
}

std::int64_t eval_int_param(const ExprPtr& e, const EvalContext& ctx, const char* what) {
  Value v = eval_expr(*e, ctx);
  if (!v.is_integer())
    fail(ErrorKind::invalid_parameters,
         std::string(what) + " parameter must be an integer, got " + v.str());
  return v.as_integer();
}

/// Standard normal via Box-Muller; consumes exactly two uniforms.
double standard_normal(RngStream& stream) {
  double u1 = 1.0 - stream.next_unit();  // (0, 1], keeps log finite
  double u2 = stream.next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::int64_t round_to_int(double x, const char* what) {
  double r = std::nearbyint(x);
  if (!(r >= -9.2e18 && r <= 9.2e18))
    fail(ErrorKind::domain_error, std::string(what) + " draw out of integer range");
  return std::llround(x);
}

}  // namespace

const char* DistributionSpec::kind_name() const {
  switch (dist.index()) {
    case 0: return "uniform_real";
    case 1: return "uniform_int";
    case 2: return "normal_real";
    case 3: return "normal_int";
    case 4: return "custom_real";
    case 5: return "custom_int";
  }
  return "?";
}

ValueType DistributionSpec::result_type() const {
  switch (dist.index()) {
    case 0: case 2: case 4: return ValueType::real;
    default: return ValueType::integer;
  }
}

Value observe(const RandomVariable& var, const EvalContext& ctx, RngStream& stream) {
  struct Visitor {
    const RandomVariable& var;
    const EvalContext& ctx;
    RngStream& stream;

    Value operator()(const UniformRealDist& d) const {
      double lo = eval_real_param(d.min, ctx, "min");
      double hi = eval_real_param(d.max, ctx, "max");
      if (!(lo <= hi))
        fail(ErrorKind::invalid_parameters,
             "uniform '" + var.id + "': min > max");
      return Value(lo + (hi - lo) * stream.next_unit());
    }

    Value operator()(const UniformIntDist& d) const {
      std::int64_t lo = eval_int_param(d.min, ctx, "min");
      std::int64_t hi = eval_int_param(d.max, ctx, "max");
      if (lo > hi)
        fail(ErrorKind::invalid_parameters,
             "uniform '" + var.id + "': min > max");
      // inclusive span; wraps to 0 (full range) when covering all of int64
      std::uint64_t span =
          static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
      std::uint64_t off = stream.next_below(span);
      return Value(static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + off));
    }

    Value operator()(const NormalRealDist& d) const {
      double mean = eval_real_param(d.mean, ctx, "mean");
      double sd = eval_real_param(d.stddev, ctx, "stddev");
      if (sd < 0)
        fail(ErrorKind::invalid_parameters,
             "normal '" + var.id + "': stddev < 0");
      double z = standard_normal(stream);
      return Value(mean + sd * z);
    }

    Value operator()(const NormalIntDist& d) const {
      double mean = eval_real_param(d.mean, ctx, "mean");
      double sd = eval_real_param(d.stddev, ctx, "stddev");
      if (sd < 0)
        fail(ErrorKind::invalid_parameters,
             "normal '" + var.id + "': stddev < 0");
      double z = standard_normal(stream);
      return Value(round_to_int(mean + sd * z, "normal_int"));
    }

    Value operator()(const CustomRealDist& d) const {
      double u = stream.next_unit();
      EvalContext inner = ctx;
      inner.u_sample = &u;
      Value v = eval_expr(*d.observe, inner);
      if (!v.is_numeric())
        fail(ErrorKind::type_mismatch,
             "custom '" + var.id + "' observe function must be numeric");
      return Value(v.as_real());
    }

    Value operator()(const CustomIntDist& d) const {
      double u = stream.next_unit();
      EvalContext inner = ctx;
      inner.u_sample = &u;
      Value v = eval_expr(*d.observe, inner);
      if (!v.is_integer())
        fail(ErrorKind::type_mismatch,
             "custom '" + var.id + "' observe function must yield an integer");
      return v;
    }
  };
  return std::visit(Visitor{var, ctx, stream}, var.spec.dist);
}

Value observe(const RandomVariable& var, const SimulationState& state,
              RngStream& stream) {
  EvalContext ctx;
  ctx.state = &state;
  return observe(var, ctx, stream);
}

}  // namespace sosmc
