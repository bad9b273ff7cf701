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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosmc {

/// Position inside a source text, 1-based. line == 0 means "no location".
struct SourceLoc {
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool valid() const { return line != 0; }
  std::string str() const;
};

enum class Severity { error, warning };

/// A parse/validation finding. Parsers are total: they report these
/// instead of throwing.
struct Diagnostic {
  Severity severity = Severity::error;
  SourceLoc loc;
  std::string message;

  std::string str() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);
std::string join_diagnostics(const std::vector<Diagnostic>& diags);

enum class ErrorKind {
  path_not_found,
  type_mismatch,
  division_by_zero,
  closed_system,
  duplicate_name,
  invalid_parameters,
  negative_rate,
  all_rates_zero,
  cyclic_init,
  horizon_too_small,
  unknown_path,
  unknown_component_type,
  unbound_binder,
  unknown_pattern,
  domain_error,
  max_samples_exceeded,
  out_of_order_state,
  trace_too_short,
  syntax_error,
  model_error,
  internal_error,
};

const char* error_kind_name(ErrorKind kind);

/// Runtime failure carrying a machine-checkable kind. Evaluation,
/// simulation and analysis code throws these; parsers do not.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace sosmc
