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

// Internal lexing/parsing helpers shared by the descriptor, contract and
// session parsers. Not installed.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sosmc/diagnostics.hpp"
#include "sosmc/expr.hpp"

namespace sosmc::detail {

enum class Tok : std::uint8_t { ident, int_lit, real_lit, str_lit, sym, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;       // ident name, symbol spelling, or string payload
  std::int64_t ival = 0;  // int_lit
  double rval = 0.0;      // real_lit
  SourceLoc loc;
};

/// Tokenizes the whole input. `#` starts a line comment. Throws
/// syntax_error on malformed tokens (unterminated string, bad number).
std::vector<Token> tokenize(std::string_view src);

[[noreturn]] void syntax_fail(const SourceLoc& loc, const std::string& message);

bool ieq(std::string_view a, std::string_view b);  // ASCII case-insensitive

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Tok::eof; }

  bool at_sym(std::string_view s) const;
  bool accept_sym(std::string_view s);
  void expect_sym(std::string_view s);

  bool at_ident(std::string_view s, bool fold_case = false) const;
  bool accept_ident(std::string_view s, bool fold_case = false);
  void expect_ident(std::string_view s, bool fold_case = false);
  std::string expect_any_ident(const char* what);

  std::int64_t expect_int(const char* what);

  /// Skips tokens until one of the symbols (or eof); consumes it when
  /// `consume` is set. Used for error recovery.
  void synchronize(std::initializer_list<std::string_view> stops, bool consume);

  std::size_t position() const { return pos_; }
  void rewind(std::size_t pos) { pos_ = pos; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

struct ExprParserOptions {
  bool allow_u = false;
  bool allow_collections = false;
};

/// Recursive-descent expression parser over a token stream. Binders pushed
/// by the caller classify dotted names as binder-relative references.
class ExprParser {
 public:
  ExprParser(TokenStream& ts, ExprParserOptions opts) : ts_(ts), opts_(opts) {}

  ExprPtr parse();  // throws syntax_error

  /// Entry below the boolean connectives: used for temporal-logic atoms,
  /// where `and`/`or`/`not` belong to the formula grammar.
  ExprPtr parse_comparison_level() { return parse_cmp(); }

  void push_binder(const std::string& name) { binders_.push_back(name); }
  void pop_binder() { binders_.pop_back(); }

 private:
  ExprPtr parse_or();
  ExprPtr parse_and();
  ExprPtr parse_not();
  ExprPtr parse_cmp();
  ExprPtr parse_addsub();
  ExprPtr parse_muldiv();
  ExprPtr parse_unary();
  ExprPtr parse_primary();
  ExprPtr parse_call2(BinaryOp op);
  ExprPtr parse_call1(UnaryOp op);
  ExprPtr parse_collection(const std::string& type_name, const SourceLoc& loc);
  bool in_scope(const std::string& binder) const;

  TokenStream& ts_;
  ExprParserOptions opts_;
  std::vector<std::string> binders_;
};

ExprPtr parse_expr_tokens(TokenStream& ts, const ExprParserOptions& opts,
                          const std::vector<std::string>& binders);

}  // namespace sosmc::detail
