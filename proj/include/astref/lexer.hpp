#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace astref {

enum class TokenKind { Ident, Int, Keyword, Operator, Newline, Indent, Dedent, Eof };

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string lexeme;
    int line = 1;
    int col = 1;

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
};

/// Splits MiniPy source into tokens. Indentation is exactly four spaces per
/// level; each logical line ends in a Newline token and the stream ends with
/// one Eof after any closing Dedents. Blank and comment-only lines produce
/// nothing. Throws LexError.
std::vector<Token> tokenize(std::string_view source);

} // namespace astref
