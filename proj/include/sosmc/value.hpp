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
#include <string>
#include <variant>

#include "sosmc/diagnostics.hpp"

namespace sosmc {

enum class ValueType : std::uint8_t { boolean, integer, real, string };

const char* value_type_name(ValueType t);

/// Tagged attribute value: bool | int64 | double | string.
class Value {
 public:
  Value() : v_(false) {}
  Value(bool b) : v_(b) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}

  ValueType type() const { return static_cast<ValueType>(v_.index()); }

  bool is_boolean() const { return type() == ValueType::boolean; }
  bool is_integer() const { return type() == ValueType::integer; }
  bool is_real() const { return type() == ValueType::real; }
  bool is_string() const { return type() == ValueType::string; }
  bool is_numeric() const { return is_integer() || is_real(); }

  bool as_boolean() const;
  std::int64_t as_integer() const;
  double as_real() const;  // accepts integer, promotes
  const std::string& as_string() const;

  /// Exact structural equality (tag and payload).
  bool operator==(const Value& other) const { return v_ == other.v_; }
  bool operator!=(const Value& other) const { return v_ != other.v_; }

  std::string str() const;

 private:
  std::variant<bool, std::int64_t, double, std::string> v_;
};

/// Default value for a declared type (false / 0 / 0.0 / "").
Value default_value(ValueType t);

ValueType parse_value_type(const std::string& name);  // throws syntax_error

}  // namespace sosmc
