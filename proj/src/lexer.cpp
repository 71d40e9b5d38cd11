#include "astref/lexer.hpp"

#include "astref/error.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace astref {

namespace {

constexpr int kIndentWidth = 4;

constexpr std::array<std::string_view, 9> kKeywords = {
    "def", "if", "elif", "else", "while", "for", "in", "return", "import",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_keyword(std::string_view s) {
    for (auto k : kKeywords) {
        if (k == s) return true;
    }
    return false;
}

} // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Ident: return "Ident";
    case TokenKind::Int: return "Int";
    case TokenKind::Keyword: return "Keyword";
    case TokenKind::Operator: return "Operator";
    case TokenKind::Newline: return "Newline";
    case TokenKind::Indent: return "Indent";
    case TokenKind::Dedent: return "Dedent";
    case TokenKind::Eof: return "Eof";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> out;
    int level = 0;
    int line_no = 0;
    std::size_t pos = 0;

    while (pos < source.size()) {
        std::size_t eol = source.find('\n', pos);
        if (eol == std::string_view::npos) eol = source.size();
        std::string_view line = source.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::size_t indent = 0;
        while (indent < line.size() && line[indent] == ' ') ++indent;
        if (indent < line.size() && line[indent] == '\t') {
            throw LexError(line_no, static_cast<int>(indent) + 1, "tab in indentation");
        }
        if (indent == line.size() || line[indent] == '#') continue;  // blank or comment-only

        if (indent % kIndentWidth != 0) {
            throw LexError(line_no, static_cast<int>(indent) + 1,
                           "indentation must be a multiple of 4 spaces");
        }
        const int new_level = static_cast<int>(indent) / kIndentWidth;
        if (new_level > level + 1) {
            throw LexError(line_no, static_cast<int>(indent) + 1, "inconsistent indentation");
        }
        if (new_level == level + 1) out.push_back({TokenKind::Indent, "", line_no, 1});
        for (; level > new_level; --level) out.push_back({TokenKind::Dedent, "", line_no, 1});
        level = new_level;

        std::size_t i = indent;
        while (i < line.size()) {
            const char c = line[i];
            const int col = static_cast<int>(i) + 1;
            if (c == ' ') {
                ++i;
                continue;
            }
            if (c == '#') break;
            if (is_ident_start(c)) {
                std::size_t j = i;
                for (;;) {
                    while (j < line.size() && is_ident_char(line[j])) ++j;
                    if (j + 1 < line.size() && line[j] == '.' && is_ident_start(line[j + 1])) {
                        ++j;
                        continue;
                    }
                    break;
                }
                std::string_view word = line.substr(i, j - i);
                out.push_back({is_keyword(word) ? TokenKind::Keyword : TokenKind::Ident,
                               std::string(word), line_no, col});
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
                if (j < line.size() && is_ident_char(line[j])) {
                    throw LexError(line_no, static_cast<int>(j) + 1, "malformed integer literal");
                }
                std::int64_t v = 0;
                auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
                if (ec != std::errc{}) throw LexError(line_no, col, "integer literal out of range");
                out.push_back({TokenKind::Int, std::string(line.substr(i, j - i)), line_no, col});
                i = j;
                continue;
            }
            if (i + 1 < line.size()) {
                std::string_view two = line.substr(i, 2);
                if (two == "<=" || two == ">=" || two == "==" || two == "!=") {
                    out.push_back({TokenKind::Operator, std::string(two), line_no, col});
                    i += 2;
                    continue;
                }
            }
            switch (c) {
            case '(': case ')': case ':': case ',': case '=':
            case '+': case '-': case '*': case '<': case '>':
                out.push_back({TokenKind::Operator, std::string(1, c), line_no, col});
                ++i;
                continue;
            default:
                throw LexError(line_no, col, "illegal character");
            }
        }
        out.push_back({TokenKind::Newline, "", line_no, static_cast<int>(line.size()) + 1});
    }

    const int end_line = line_no + 1;
    for (; level > 0; --level) out.push_back({TokenKind::Dedent, "", end_line, 1});
    out.push_back({TokenKind::Eof, "", out.empty() ? 1 : end_line, 1});
    return out;
}

} // namespace astref
