#include "astref/parser.hpp"

#include "astref/error.hpp"

#include <charconv>
#include <utility>

namespace astref {

namespace {

class Parser {
public:
    explicit Parser(std::span<const Token> toks) : toks_(toks) {
        if (toks_.empty() || toks_.back().kind != TokenKind::Eof) {
            throw ParseError(1, 1, "token stream terminated by Eof");
        }
    }

    AstNode program() {
        AstNode mod;
        mod.kind = NodeKind::Module;
        while (!at(TokenKind::Eof)) mod.children.push_back(statement());
        if (!mod.children.empty()) mod.span = {1, mod.children.back().span.end};
        return mod;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool at(TokenKind k, std::string_view text) const { return peek().is(k, text); }
    const Token& advance() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(std::string expected) const {
        throw ParseError(peek().line, peek().col, std::move(expected));
    }

    const Token& expect(TokenKind k, std::string_view text, std::string_view what) {
        if (!at(k, text)) fail(std::string(what));
        return advance();
    }

    const Token& expect_kind(TokenKind k, std::string_view what) {
        if (!at(k)) fail(std::string(what));
        return advance();
    }

    std::string plain_name(std::string_view what) {
        const Token& t = expect_kind(TokenKind::Ident, what);
        if (t.lexeme.find('.') != std::string::npos) {
            throw ParseError(t.line, t.col, std::string(what) + " (undotted)");
        }
        return t.lexeme;
    }

    int end_simple() {
        const int line = expect_kind(TokenKind::Newline, "end of line").line;
        return line;
    }

    AstNode statement() {
        const Token& t = peek();
        if (t.kind == TokenKind::Keyword) {
            if (t.lexeme == "def") return funcdef();
            if (t.lexeme == "if") return if_stmt();
            if (t.lexeme == "while") return while_stmt();
            if (t.lexeme == "for") return for_stmt();
            if (t.lexeme == "return") return return_stmt();
            if (t.lexeme == "import") return import_stmt();
            fail("statement");
        }
        if (t.kind == TokenKind::Ident) {
            if (peek(1).is(TokenKind::Operator, "=")) return assign();
            if (peek(1).is(TokenKind::Operator, "(")) {
                AstNode call = call_node();
                call.span.end = end_simple();
                return call;
            }
            advance();
            fail("'=' or '('");
        }
        fail("statement");
    }

    /// Parses a block into `owner.children`; returns the last line.
    int block(AstNode& owner) {
        expect(TokenKind::Operator, ":", "':'");
        expect_kind(TokenKind::Newline, "end of line after ':'");
        expect_kind(TokenKind::Indent, "indented block");
        int last = peek().line;
        while (!at(TokenKind::Dedent) && !at(TokenKind::Eof)) {
            owner.children.push_back(statement());
            last = owner.children.back().span.end;
        }
        expect_kind(TokenKind::Dedent, "dedent");
        return last;
    }

    AstNode funcdef() {
        AstNode fn;
        fn.kind = NodeKind::FunctionDef;
        const int start = advance().line;
        fn.name = plain_name("function name");
        expect(TokenKind::Operator, "(", "'('");
        if (!at(TokenKind::Operator, ")")) {
            if (!at(TokenKind::Ident)) fail("parameter name or ')'");
            fn.params.push_back(plain_name("parameter name"));
            while (at(TokenKind::Operator, ",")) {
                advance();
                fn.params.push_back(plain_name("parameter name"));
            }
        }
        expect(TokenKind::Operator, ")", "')'");
        fn.span = {start, block(fn)};
        return fn;
    }

    AstNode compare() {
        AstNode cmp;
        cmp.kind = NodeKind::Compare;
        const int line = peek().line;
        cmp.value = expr(cmp);
        const Token& op = peek();
        auto parsed = op.kind == TokenKind::Operator ? compare_op_from_string(op.lexeme) : std::nullopt;
        if (!parsed) fail("comparison operator");
        advance();
        cmp.op = *parsed;
        cmp.rhs = expr(cmp);
        cmp.span = {line, line};
        return cmp;
    }

    AstNode if_stmt() {
        AstNode node;
        node.kind = NodeKind::If;
        const int start = advance().line;  // 'if' or 'elif'
        node.children.push_back(compare());
        int end = block(node);
        if (at(TokenKind::Keyword, "elif")) {
            node.else_start = node.children.size();
            AstNode nested = if_stmt();
            end = nested.span.end;
            node.children.push_back(std::move(nested));
        } else if (at(TokenKind::Keyword, "else")) {
            advance();
            node.else_start = node.children.size();
            end = block(node);
        }
        node.span = {start, end};
        return node;
    }

    AstNode while_stmt() {
        AstNode node;
        node.kind = NodeKind::While;
        const int start = advance().line;
        node.children.push_back(compare());
        node.span = {start, block(node)};
        return node;
    }

    AstNode for_stmt() {
        AstNode node;
        node.kind = NodeKind::For;
        const int start = advance().line;
        node.name = plain_name("loop variable");
        expect(TokenKind::Keyword, "in", "'in'");
        node.value = expr(node);
        node.header_calls = node.children.size();
        node.span = {start, block(node)};
        return node;
    }

    AstNode return_stmt() {
        AstNode node;
        node.kind = NodeKind::Return;
        const int start = advance().line;
        if (!at(TokenKind::Newline)) node.value = expr(node);
        node.span = {start, end_simple()};
        return node;
    }

    AstNode import_stmt() {
        AstNode node;
        node.kind = NodeKind::Import;
        const int start = advance().line;
        node.name = expect_kind(TokenKind::Ident, "module name").lexeme;
        node.span = {start, end_simple()};
        return node;
    }

    AstNode assign() {
        AstNode node;
        node.kind = NodeKind::Assign;
        const int start = peek().line;
        node.name = plain_name("assignment target");
        advance();  // '='
        node.value = expr(node);
        node.span = {start, end_simple()};
        return node;
    }

    AstNode call_node() {
        AstNode call;
        call.kind = NodeKind::Call;
        const Token& name = advance();
        call.name = name.lexeme;
        expect(TokenKind::Operator, "(", "'('");
        if (!at(TokenKind::Operator, ")")) {
            call.args.push_back(expr(call));
            while (at(TokenKind::Operator, ",")) {
                advance();
                call.args.push_back(expr(call));
            }
        }
        expect(TokenKind::Operator, ")", "')' or ','");
        call.span = {name.line, name.line};
        return call;
    }

    // expr := term (('+'|'-') term)*; calls land in owner.children
    Expr expr(AstNode& owner) {
        Expr lhs = term(owner);
        while (at(TokenKind::Operator, "+") || at(TokenKind::Operator, "-")) {
            const char op = advance().lexeme[0];
            lhs = Expr::make_binary(op, std::move(lhs), term(owner));
        }
        return lhs;
    }

    Expr term(AstNode& owner) {
        Expr lhs = atom(owner);
        while (at(TokenKind::Operator, "*")) {
            advance();
            lhs = Expr::make_binary('*', std::move(lhs), atom(owner));
        }
        return lhs;
    }

    Expr atom(AstNode& owner) {
        const Token& t = peek();
        if (t.kind == TokenKind::Int) {
            std::int64_t v = 0;
            std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
            advance();
            return Expr::make_int(v);
        }
        if (t.kind == TokenKind::Ident) {
            if (peek(1).is(TokenKind::Operator, "(")) {
                owner.children.push_back(call_node());
                return Expr::make_call_ref(static_cast<int>(owner.children.size()) - 1);
            }
            if (t.lexeme.find('.') != std::string::npos) fail("'(' after dotted name");
            advance();
            return Expr::make_name(t.lexeme);
        }
        fail("expression");
    }

    std::span<const Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

AstTree parse(std::span<const Token> tokens) {
    Parser p(tokens);
    return AstTree(p.program());
}

AstTree parse_source(std::string_view source) {
    const auto tokens = tokenize(source);
    return parse(tokens);
}

} // namespace astref
