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
#include "sosmc/expr.hpp"

namespace sosmc {

ExprPtr parse_expr(const std::string& text, const ExprParseOptions& opts) {
  detail::TokenStream ts(detail::tokenize(text));
  detail::ExprParserOptions popts;
  popts.allow_u = opts.allow_u;
  popts.allow_collections = opts.allow_collections;
  ExprPtr e = detail::parse_expr_tokens(ts, popts, opts.binders);
  if (!ts.at_end())
    detail::syntax_fail(ts.peek().loc,
                        "trailing input after expression: '" + ts.peek().text + "'");
  return e;
}

}  // namespace sosmc
