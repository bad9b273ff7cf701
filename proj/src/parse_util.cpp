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

#include "parse_util.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace sosmc::detail {

void syntax_fail(const SourceLoc& loc, const std::string& message) {
  std::string where = loc.valid() ? " at " + loc.str() : "";
  throw Error(ErrorKind::syntax_error, message + where);
}

bool ieq(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto loc = [&]() { return SourceLoc{line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {  // line comment
      std::size_t n = 0;
      while (i + n < src.size() && src[i + n] != '\n') ++n;
      advance(n);
      continue;
    }
    if (ident_start(c)) {
      Token t;
      t.kind = Tok::ident;
      t.loc = loc();
      std::size_t n = 0;
      while (i + n < src.size() && ident_char(src[i + n])) ++n;
      t.text = std::string(src.substr(i, n));
      advance(n);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Token t;
      t.loc = loc();
      std::size_t n = 0;
      bool real = false;
      while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
      if (i + n + 1 < src.size() && src[i + n] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[i + n + 1]))) {
        real = true;
        ++n;
        while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
      }
      if (i + n < src.size() && (src[i + n] == 'e' || src[i + n] == 'E')) {
        std::size_t e = n + 1;
        if (i + e < src.size() && (src[i + e] == '+' || src[i + e] == '-')) ++e;
        if (i + e < src.size() && std::isdigit(static_cast<unsigned char>(src[i + e]))) {
          real = true;
          n = e;
          while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
        }
      }
      std::string text(src.substr(i, n));
      if (real) {
        t.kind = Tok::real_lit;
        t.rval = std::strtod(text.c_str(), nullptr);
      } else {
        t.kind = Tok::int_lit;
        auto res = std::from_chars(text.data(), text.data() + text.size(), t.ival);
        if (res.ec != std::errc())
          syntax_fail(t.loc, "integer literal out of range: " + text);
      }
      t.text = std::move(text);
      advance(n);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      Token t;
      t.kind = Tok::str_lit;
      t.loc = loc();
      std::size_t n = 1;
      std::string payload;
      for (;;) {
        if (i + n >= src.size() || src[i + n] == '\n')
          syntax_fail(t.loc, "unterminated string literal");
        char d = src[i + n];
        if (d == '"') {
          ++n;
          break;
        }
        if (d == '\\') {
          if (i + n + 1 >= src.size()) syntax_fail(t.loc, "unterminated escape");
          char e = src[i + n + 1];
          switch (e) {
            case 'n': payload += '\n'; break;
            case 't': payload += '\t'; break;
            case '"': payload += '"'; break;
            case '\\': payload += '\\'; break;
            default: syntax_fail(t.loc, std::string("unknown escape '\\") + e + "'");
          }
          n += 2;
          continue;
        }
        payload += d;
        ++n;
      }
      t.text = std::move(payload);
      advance(n);
      out.push_back(std::move(t));
      continue;
    }
    // multi-char symbols first
    static const char* two_char[] = {":=", "<=", ">=", "==", "!=", "--", "->"};
    bool matched = false;
    for (const char* s : two_char) {
      if (src.substr(i, 2) == s) {
        out.push_back(Token{Tok::sym, s, 0, 0.0, loc()});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string one_char = "{}()[]:;,~|.<>=+-*/";
    if (one_char.find(c) != std::string::npos) {
      out.push_back(Token{Tok::sym, std::string(1, c), 0, 0.0, loc()});
      advance(1);
      continue;
    }
    syntax_fail(loc(), std::string("unexpected character '") + c + "'");
  }
  Token eof;
  eof.kind = Tok::eof;
  eof.loc = SourceLoc{line, col};
  out.push_back(std::move(eof));
  return out;
}

// ---------------------------------------------------------------------------
// TokenStream
// ---------------------------------------------------------------------------

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  if (k >= tokens_.size()) k = tokens_.size() - 1;  // eof token
  return tokens_[k];
}

Token TokenStream::next() {
  const Token& t = peek();
  if (t.kind != Tok::eof) ++pos_;
  return t;
}

bool TokenStream::at_sym(std::string_view s) const {
  const Token& t = peek();
  return t.kind == Tok::sym && t.text == s;
}

bool TokenStream::accept_sym(std::string_view s) {
  if (!at_sym(s)) return false;
  next();
  return true;
}

void TokenStream::expect_sym(std::string_view s) {
  if (!accept_sym(s))
    syntax_fail(peek().loc, "expected '" + std::string(s) + "', got '" +
                                (peek().kind == Tok::eof ? "<eof>" : peek().text) + "'");
}

bool TokenStream::at_ident(std::string_view s, bool fold_case) const {
  const Token& t = peek();
  if (t.kind != Tok::ident) return false;
  return fold_case ? ieq(t.text, s) : t.text == s;
}

bool TokenStream::accept_ident(std::string_view s, bool fold_case) {
  if (!at_ident(s, fold_case)) return false;
  next();
  return true;
}

void TokenStream::expect_ident(std::string_view s, bool fold_case) {
  if (!accept_ident(s, fold_case))
    syntax_fail(peek().loc, "expected '" + std::string(s) + "', got '" +
                                (peek().kind == Tok::eof ? "<eof>" : peek().text) + "'");
}

std::string TokenStream::expect_any_ident(const char* what) {
  const Token& t = peek();
  if (t.kind != Tok::ident)
    syntax_fail(t.loc, std::string("expected ") + what + ", got '" +
                           (t.kind == Tok::eof ? "<eof>" : t.text) + "'");
  return next().text;
}

std::int64_t TokenStream::expect_int(const char* what) {
  const Token& t = peek();
  if (t.kind != Tok::int_lit)
    syntax_fail(t.loc, std::string("expected ") + what + ", got '" +
                           (t.kind == Tok::eof ? "<eof>" : t.text) + "'");
  return next().ival;
}

void TokenStream::synchronize(std::initializer_list<std::string_view> stops,
                              bool consume) {
  while (!at_end()) {
    for (auto s : stops) {
      if (at_sym(s)) {
        if (consume) next();
        return;
      }
    }
    next();
  }
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

ExprPtr parse_expr_tokens(TokenStream& ts, const ExprParserOptions& opts,
                          const std::vector<std::string>& binders) {
  ExprParser p(ts, opts);
  for (const auto& b : binders) p.push_binder(b);
  return p.parse();
}

ExprPtr ExprParser::parse() { return parse_or(); }

bool ExprParser::in_scope(const std::string& binder) const {
  for (const auto& b : binders_)
    if (b == binder) return true;
  return false;
}

ExprPtr ExprParser::parse_or() {
  ExprPtr lhs = parse_and();
  while (ts_.at_ident("or")) {
    SourceLoc loc = ts_.next().loc;
    ExprPtr rhs = parse_and();
    lhs = make_expr(Expr{BinaryExpr{BinaryOp::logic_or, lhs, rhs}, loc});
  }
  return lhs;
}

ExprPtr ExprParser::parse_and() {
  ExprPtr lhs = parse_not();
  while (ts_.at_ident("and")) {
    SourceLoc loc = ts_.next().loc;
    ExprPtr rhs = parse_not();
    lhs = make_expr(Expr{BinaryExpr{BinaryOp::logic_and, lhs, rhs}, loc});
  }
  return lhs;
}

ExprPtr ExprParser::parse_not() {
  if (ts_.at_ident("not")) {
    SourceLoc loc = ts_.next().loc;
    return make_expr(Expr{UnaryExpr{UnaryOp::logic_not, parse_not()}, loc});
  }
  return parse_cmp();
}

ExprPtr ExprParser::parse_cmp() {
  ExprPtr lhs = parse_addsub();
  static const std::pair<const char*, BinaryOp> cmps[] = {
      {"<=", BinaryOp::le}, {">=", BinaryOp::ge}, {"==", BinaryOp::eq},
      {"!=", BinaryOp::ne}, {"<", BinaryOp::lt},  {">", BinaryOp::gt},
      {"=", BinaryOp::eq},
  };
  for (const auto& [sym, op] : cmps) {
    if (ts_.at_sym(sym)) {
      SourceLoc loc = ts_.next().loc;
      ExprPtr rhs = parse_addsub();  // comparisons do not chain
      return make_expr(Expr{BinaryExpr{op, lhs, rhs}, loc});
    }
  }
  return lhs;
}

ExprPtr ExprParser::parse_addsub() {
  ExprPtr lhs = parse_muldiv();
  for (;;) {
    if (ts_.at_sym("+")) {
      SourceLoc loc = ts_.next().loc;
      lhs = make_expr(Expr{BinaryExpr{BinaryOp::add, lhs, parse_muldiv()}, loc});
    } else if (ts_.at_sym("-")) {
      SourceLoc loc = ts_.next().loc;
      lhs = make_expr(Expr{BinaryExpr{BinaryOp::sub, lhs, parse_muldiv()}, loc});
    } else {
      return lhs;
    }
  }
}

ExprPtr ExprParser::parse_muldiv() {
  ExprPtr lhs = parse_unary();
  for (;;) {
    if (ts_.at_sym("*")) {
      SourceLoc loc = ts_.next().loc;
      lhs = make_expr(Expr{BinaryExpr{BinaryOp::mul, lhs, parse_unary()}, loc});
    } else if (ts_.at_sym("/")) {
      SourceLoc loc = ts_.next().loc;
      lhs = make_expr(Expr{BinaryExpr{BinaryOp::div, lhs, parse_unary()}, loc});
    } else {
      return lhs;
    }
  }
}

ExprPtr ExprParser::parse_unary() {
  if (ts_.at_sym("-")) {
    SourceLoc loc = ts_.next().loc;
    return make_expr(Expr{UnaryExpr{UnaryOp::negate, parse_unary()}, loc});
  }
  return parse_primary();
}

ExprPtr ExprParser::parse_call2(BinaryOp op) {
  SourceLoc loc = ts_.peek().loc;
  ts_.expect_sym("(");
  ExprPtr a = parse_or();
  ts_.expect_sym(",");
  ExprPtr b = parse_or();
  ts_.expect_sym(")");
  return make_expr(Expr{BinaryExpr{op, a, b}, loc});
}

ExprPtr ExprParser::parse_call1(UnaryOp op) {
  SourceLoc loc = ts_.peek().loc;
  ts_.expect_sym("(");
  ExprPtr a = parse_or();
  ts_.expect_sym(")");
  return make_expr(Expr{UnaryExpr{op, a}, loc});
}

ExprPtr ExprParser::parse_collection(const std::string& type_name,
                                     const SourceLoc& loc) {
  // already consumed: Type . allInstances ( )
  ts_.expect_sym("->");
  const Token& kw = ts_.peek();
  if (kw.kind != Tok::ident)
    syntax_fail(kw.loc, "expected forAll, exists or select");
  bool universal;
  bool is_select = false;
  if (ieq(kw.text, "forAll")) {
    universal = true;
  } else if (ieq(kw.text, "exists")) {
    universal = false;
  } else if (ieq(kw.text, "select")) {
    universal = false;
    is_select = true;
  } else {
    syntax_fail(kw.loc, "expected forAll, exists or select, got '" + kw.text + "'");
  }
  ts_.next();
  ts_.expect_sym("(");
  std::string binder = ts_.expect_any_ident("binder name");
  if (in_scope(binder))
    syntax_fail(loc, "binder '" + binder + "' shadows an enclosing binder");
  ts_.expect_sym("|");
  push_binder(binder);
  ExprPtr body = parse_or();
  pop_binder();
  ts_.expect_sym(")");
  if (is_select) {
    ts_.expect_sym("->");
    const Token& size_kw = ts_.peek();
    if (size_kw.kind != Tok::ident || !ieq(size_kw.text, "size"))
      syntax_fail(size_kw.loc, "expected size() after select(...)");
    ts_.next();
    ts_.expect_sym("(");
    ts_.expect_sym(")");
    return make_expr(Expr{CountExpr{binder, type_name, body}, loc});
  }
  return make_expr(Expr{QuantifiedExpr{universal, binder, type_name, body}, loc});
}

ExprPtr ExprParser::parse_primary() {
  const Token& t = ts_.peek();
  SourceLoc loc = t.loc;
  switch (t.kind) {
    case Tok::int_lit: {
      std::int64_t v = ts_.next().ival;
      return make_expr(Expr{LiteralExpr{Value(v)}, loc});
    }
    case Tok::real_lit: {
      double v = ts_.next().rval;
      return make_expr(Expr{LiteralExpr{Value(v)}, loc});
    }
    case Tok::str_lit: {
      std::string v = ts_.next().text;
      return make_expr(Expr{LiteralExpr{Value(std::move(v))}, loc});
    }
    case Tok::sym:
      if (ts_.accept_sym("(")) {
        ExprPtr inner = parse_or();
        ts_.expect_sym(")");
        return inner;
      }
      syntax_fail(loc, "unexpected '" + t.text + "' in expression");
    case Tok::eof:
      syntax_fail(loc, "unexpected end of input in expression");
    case Tok::ident:
      break;
  }

  // identifiers: keywords, built-ins, paths, binder refs, collections
  if (ts_.accept_ident("true")) return make_expr(Expr{LiteralExpr{Value(true)}, loc});
  if (ts_.accept_ident("false")) return make_expr(Expr{LiteralExpr{Value(false)}, loc});
  if (ts_.accept_ident("time")) return make_expr(Expr{TimeExpr{}, loc});
  if (ts_.at_ident("u") && opts_.allow_u) {
    ts_.next();
    return make_expr(Expr{USampleExpr{}, loc});
  }
  if (ts_.at_ident("min") && ts_.peek(1).kind == Tok::sym && ts_.peek(1).text == "(") {
    ts_.next();
    return parse_call2(BinaryOp::fn_min);
  }
  if (ts_.at_ident("max") && ts_.peek(1).kind == Tok::sym && ts_.peek(1).text == "(") {
    ts_.next();
    return parse_call2(BinaryOp::fn_max);
  }
  if (ts_.at_ident("mod") && ts_.peek(1).kind == Tok::sym && ts_.peek(1).text == "(") {
    ts_.next();
    return parse_call2(BinaryOp::fn_mod);
  }
  if (ts_.at_ident("abs") && ts_.peek(1).kind == Tok::sym && ts_.peek(1).text == "(") {
    ts_.next();
    return parse_call1(UnaryOp::fn_abs);
  }
  if (ts_.at_ident("floor") && ts_.peek(1).kind == Tok::sym && ts_.peek(1).text == "(") {
    ts_.next();
    return parse_call1(UnaryOp::fn_floor);
  }

  // dotted name: path, binder-relative path, or collection expression
  std::vector<std::string> segs;
  segs.push_back(ts_.expect_any_ident("identifier"));
  while (ts_.at_sym(".") && ts_.peek(1).kind == Tok::ident) {
    // stop before `.allInstances()`: that belongs to a collection expr
    if (opts_.allow_collections && ieq(ts_.peek(1).text, "allInstances") &&
        ts_.peek(2).kind == Tok::sym && ts_.peek(2).text == "(")
      break;
    ts_.next();
    segs.push_back(ts_.expect_any_ident("path segment"));
  }

  if (opts_.allow_collections && ts_.at_sym(".") &&
      ieq(ts_.peek(1).text, "allInstances")) {
    if (segs.size() != 1)
      syntax_fail(loc, "allInstances() applies to a component type name");
    ts_.next();  // '.'
    ts_.next();  // allInstances
    ts_.expect_sym("(");
    ts_.expect_sym(")");
    return parse_collection(segs[0], loc);
  }

  if (in_scope(segs[0])) {
    if (segs.size() < 2)
      syntax_fail(loc, "binder '" + segs[0] + "' must be followed by an attribute path");
    std::string binder = segs[0];
    segs.erase(segs.begin());
    return make_expr(Expr{BinderPathExpr{std::move(binder), Path{std::move(segs)}}, loc});
  }

  bool anchored = false;
  if (segs[0] == "root" && segs.size() > 1) {
    anchored = true;
    segs.erase(segs.begin());
  }
  return make_expr(Expr{PathExpr{Path{std::move(segs)}, anchored}, loc});
}

}  // namespace sosmc::detail
