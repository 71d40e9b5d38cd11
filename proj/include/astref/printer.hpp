#pragma once

#include "astref/ast.hpp"

#include <string>

namespace astref {

/// Canonical MiniPy rendering: four-space indentation, `else:` blocks (never
/// `elif`), one statement per line. parse(pretty_print(t)) is structurally
/// equal to t.
std::string pretty_print(const AstTree& tree);

/// Renders one expression owned by `owner` (CallRefs resolve to owner's children).
std::string render_expr(const Expr& e, const AstNode& owner);

} // namespace astref
