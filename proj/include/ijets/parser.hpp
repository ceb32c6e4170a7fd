#pragma once

#include <string>

#include "ijets/expr.hpp"

namespace ijets {

/// Infix parser: + - * / ^int, sqrt(...), rationals, decimal literals and
/// identifiers like `X_xu` whose index letters come from the matching alphabet.
Expr parse_expr(const std::string& text, const Names& names);

/// Parse a single variable name such as `U_xy`.
Var parse_var(const std::string& text, const Names& names);

}  // namespace ijets
