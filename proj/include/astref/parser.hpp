#pragma once

#include "astref/ast.hpp"
#include "astref/lexer.hpp"

#include <span>
#include <string_view>

namespace astref {

/// Recursive-descent parser for the MiniPy grammar. `elif` chains are
/// desugared into an If nested as the sole else-statement. Throws ParseError.
AstTree parse(std::span<const Token> tokens);

/// tokenize + parse.
AstTree parse_source(std::string_view source);

} // namespace astref
