#include "astref/ast_doc.hpp"
#include "astref/error.hpp"
#include "astref/lexer.hpp"
#include "astref/metrics.hpp"
#include "astref/parser.hpp"
#include "astref/printer.hpp"
#include "astref/split.hpp"
#include "support/interp.hpp"
#include "support/program_gen.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace astref;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(const std::vector<Token>& toks) {
    std::vector<std::pair<TokenKind, std::string>> out;
    for (const auto& t : toks) out.emplace_back(t.kind, t.lexeme);
    return out;
}

const AstNode& only_function(const AstTree& t, const std::string& name) {
    for (const AstNode* n : t.preorder()) {
        if (n->kind == NodeKind::FunctionDef && n->name == name) return *n;
    }
    throw std::runtime_error("no function " + name);
}

} // namespace

TEST(Lexer, SingleStatement) {
    using K = TokenKind;
    const std::vector<std::pair<K, std::string>> expected = {
        {K::Ident, "x"}, {K::Operator, "="}, {K::Int, "1"}, {K::Newline, ""}, {K::Eof, ""}};
    EXPECT_EQ(kinds(tokenize("x = 1")), expected);
}

TEST(Lexer, EmptyInputIsJustEof) {
    const auto toks = tokenize("");
    ASSERT_EQ(toks.size(), 1u);
    EXPECT_EQ(toks[0].kind, TokenKind::Eof);
}

TEST(Lexer, FunctionWithReturn) {
    // def f ( ) : NL INDENT return 0 NL DEDENT EOF
    using K = TokenKind;
    const std::vector<std::pair<K, std::string>> expected = {
        {K::Keyword, "def"}, {K::Ident, "f"},      {K::Operator, "("}, {K::Operator, ")"},
        {K::Operator, ":"},  {K::Newline, ""},     {K::Indent, ""},    {K::Keyword, "return"},
        {K::Int, "0"},       {K::Newline, ""},     {K::Dedent, ""},    {K::Eof, ""}};
    EXPECT_EQ(kinds(tokenize("def f():\n    return 0")), expected);
}

TEST(Lexer, Errors) {
    EXPECT_THROW(tokenize("x = $"), LexError);
    EXPECT_THROW(tokenize("print(\"hi\")"), LexError);
    EXPECT_THROW(tokenize("def f():\n  return 0"), LexError);
    EXPECT_THROW(tokenize("def f():\n\treturn 0"), LexError);
    EXPECT_THROW(tokenize("if x > 0:\n        y = 1"), LexError);
    try {
        tokenize("x = 1\ny = 2 ! 3");
        FAIL();
    } catch (const LexError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.col(), 7);
    }
}

TEST(Lexer, CommentsAndBlankLinesVanish) {
    const auto toks = tokenize("# header\n\nx = 1  # trailing\n\n");
    EXPECT_EQ(toks.size(), 5u);
}

TEST(Lexer, StreamInvariantsOnRandomPrograms) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto text = pretty_print(support::random_program(rng, {}));
        const auto toks = tokenize(text);
        int balance = 0;
        int eofs = 0;
        for (std::size_t j = 0; j < toks.size(); ++j) {
            balance += toks[j].kind == TokenKind::Indent;
            balance -= toks[j].kind == TokenKind::Dedent;
            ASSERT_GE(balance, 0);
            eofs += toks[j].kind == TokenKind::Eof;
            if (j > 0) {
                const auto& a = toks[j - 1];
                const auto& b = toks[j];
                ASSERT_TRUE(a.line < b.line || (a.line == b.line && a.col <= b.col));
            }
        }
        EXPECT_EQ(balance, 0);
        EXPECT_EQ(eofs, 1);
        EXPECT_EQ(toks.back().kind, TokenKind::Eof);
    }
}

TEST(Parser, IfCompareTree) {
    const AstTree t = parse_source("if x > 0:\n    y = x");
    const AstNode& root = t.root();
    ASSERT_EQ(root.children.size(), 1u);
    const AstNode& iff = root.children[0];
    EXPECT_EQ(iff.kind, NodeKind::If);
    ASSERT_EQ(iff.children.size(), 2u);
    const AstNode& cmp = iff.children[0];
    EXPECT_EQ(cmp.kind, NodeKind::Compare);
    EXPECT_EQ(cmp.value, Expr::make_name("x"));
    EXPECT_EQ(cmp.op, CompareOp::Gt);
    EXPECT_EQ(cmp.rhs, Expr::make_int(0));
    const AstNode& asg = iff.children[1];
    EXPECT_EQ(asg.kind, NodeKind::Assign);
    EXPECT_EQ(asg.name, "y");
    EXPECT_EQ(asg.value, Expr::make_name("x"));
    EXPECT_EQ(t.size(), 4u);
}

TEST(Parser, SingleAssign) {
    const AstTree t = parse_source("x = 1");
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.node(1).kind, NodeKind::Assign);
}

TEST(Parser, BrokenDefReportsLineOne) {
    try {
        parse_source("def f(:");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.col(), 7);
    }
    EXPECT_THROW(parse_source("x"), ParseError);
    EXPECT_THROW(parse_source("x = "), ParseError);
    EXPECT_THROW(parse_source("if x:\n    y = 1"), ParseError);
    EXPECT_THROW(parse_source("def f():\nx = 1"), ParseError);
    EXPECT_THROW(parse_source("os.path = 1"), ParseError);
}

TEST(Parser, ElifDesugarsToNestedIf) {
    const AstTree a = parse_source("if a < 1:\n    x = 1\nelif a < 2:\n    x = 2\nelse:\n    x = 3\n");
    const AstTree b = parse_source(
        "if a < 1:\n    x = 1\nelse:\n    if a < 2:\n        x = 2\n    else:\n        x = 3\n");
    EXPECT_TRUE(structurally_equal(a, b));
    const AstNode& outer = a.root().children[0];
    ASSERT_TRUE(outer.else_start);
    EXPECT_EQ(outer.children[*outer.else_start].kind, NodeKind::If);
}

TEST(Parser, CallsInExpressionsBecomeChildren) {
    const AstTree t = parse_source("y = f(g(1), x) + os.path(2)");
    const AstNode& asg = t.root().children[0];
    ASSERT_EQ(asg.children.size(), 2u);
    EXPECT_EQ(asg.children[0].name, "f");
    EXPECT_EQ(asg.children[1].name, "os.path");
    ASSERT_EQ(asg.children[0].children.size(), 1u);
    EXPECT_EQ(asg.children[0].children[0].name, "g");
}

TEST(Parser, PreorderIdsAreDenseAndIncreasing) {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const AstTree t = support::random_program(rng, {});
        for (std::size_t id = 0; id < t.size(); ++id) {
            EXPECT_EQ(t.node(static_cast<int>(id)).id, static_cast<int>(id));
            const int p = t.parent(static_cast<int>(id));
            if (id == 0) {
                EXPECT_EQ(p, -1);
            } else {
                EXPECT_LT(p, static_cast<int>(id));
                const Span ps = t.node(p).span;
                const Span cs = t.node(static_cast<int>(id)).span;
                EXPECT_LE(ps.start, cs.start);
                EXPECT_GE(ps.end, cs.end);
            }
        }
    }
}

TEST(Printer, Basics) {
    EXPECT_EQ(pretty_print(parse_source("y = x")), "y = x\n");
    EXPECT_EQ(pretty_print(parse_source("")), "");
    EXPECT_EQ(pretty_print(parse_source("if x > 0:\n    y = x")), "if x > 0:\n    y = x\n");
}

TEST(Printer, RoundTripIsStructurallyIdempotent) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const AstTree t = support::random_program(rng, {});
        const std::string once = pretty_print(t);
        const AstTree again = parse_source(once);
        ASSERT_TRUE(structurally_equal(t, again)) << once;
        EXPECT_EQ(pretty_print(again), once);
    }
}

TEST(AstDoc, MinimalModule) {
    const AstTree t = ingest_ast_doc(nlohmann::json::parse(R"({"kind":"Module","children":[]})"));
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.root().kind, NodeKind::Module);
}

TEST(AstDoc, RejectsUnknownKindAndFields) {
    EXPECT_THROW(ingest_ast_doc(nlohmann::json::parse(
                     R"({"kind":"Module","children":[{"kind":"Lambda","children":[]}]})")),
                 SchemaError);
    try {
        ingest_ast_doc(nlohmann::json::parse(R"({"kind":"Module","children":[{"kind":"Lambda"}]})"));
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("$.children[0].kind"), std::string::npos);
    }
    EXPECT_THROW(ingest_ast_doc(nlohmann::json::parse(R"({"kind":"Module","extra":1})")), SchemaError);
    EXPECT_THROW(ingest_ast_doc(nlohmann::json::parse(R"({"kind":"If","children":[]})")), SchemaError);
    EXPECT_THROW(ingest_ast_doc(nlohmann::json::parse(R"({"version":"2","kind":"Module"})")), SchemaError);
    EXPECT_THROW(ingest_ast_doc(nlohmann::json::parse(
                     R"({"kind":"Module","children":[{"kind":"If","children":[{"kind":"Assign","name":"y"}]}]})")),
                 SchemaError);
}

TEST(AstDoc, IfTreeRoundTrip) {
    const AstTree t = parse_source("if x > 0:\n    y = x");
    const auto doc = emit_ast_doc(t);
    EXPECT_EQ(doc["version"], "1");
    EXPECT_EQ(doc["children"][0]["children"][0]["kind"], "Compare");
    const AstTree back = ingest_ast_doc(doc);
    EXPECT_EQ(emit_ast_doc(back), doc);
    EXPECT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(back.node(static_cast<int>(i)).kind, t.node(static_cast<int>(i)).kind);
    }
}

TEST(AstDoc, DocRoundTripOnRandomPrograms) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto doc = emit_ast_doc(support::random_program(rng, {}));
        const AstTree back = ingest_ast_doc(doc);
        ASSERT_EQ(emit_ast_doc(back), doc);
        // ingested trees stay printable and parseable
        EXPECT_NO_THROW(parse_source(pretty_print(back)));
    }
}

TEST(Split, SimpleExtract) {
    const AstTree t = parse_source("def f():\n    a = 1\n    b = a\n    return b\n");
    const AstTree s = extract_split(t, 1, 1);
    EXPECT_EQ(pretty_print(s),
              "def f():\n    a = 1\n    return f_tail(a)\ndef f_tail(a):\n    b = a\n    return b\n");
    support::Interpreter a(t), b(s);
    EXPECT_EQ(a.run("f", {}), b.run("f", {}));
    EXPECT_EQ(*b.run("f", {}).value, 1);
}

TEST(Split, Errors) {
    const AstTree t = parse_source("def f(x):\n    if x > 0:\n        return 1\n    y = 2\n    return y\n");
    EXPECT_THROW(extract_split(t, 1, 0), SplitError);
    EXPECT_THROW(extract_split(t, 1, 3), SplitError);
    EXPECT_THROW(extract_split(t, 1, 1), SplitError);  // return in head
    EXPECT_THROW(extract_split(t, 0, 1), SplitError);  // not a FunctionDef
}

TEST(Split, TailNameCollisionGetsSuffix) {
    const AstTree t = parse_source(
        "def f():\n    a = 1\n    b = a\ndef f_tail():\n    return 0\ndef f_tail2():\n    return 0\n");
    const AstTree s = extract_split(t, 1, 1);
    EXPECT_EQ(plan_split(t, 1, 1).tail_name, "f_tail3");
    int functions = 0;
    for (const AstNode* n : s.preorder()) functions += n->kind == NodeKind::FunctionDef;
    EXPECT_EQ(functions, 4);
}

TEST(Split, LiveVariablesSkipDefinitelyAssignedNames) {
    const AstTree t = parse_source(
        "def f(p):\n    a = p\n    c = 2\n    a = 3\n    b = a + c + p\n    return b\n");
    const SplitPlan plan = plan_split(t, 1, 2);
    EXPECT_EQ(plan.live_vars, (std::vector<std::string>{"c", "p"}));
}

TEST(Split, LoopEndSplitOfLongComplexFunction) {
    // 40 lines, CC 18: a loop holding 7 ifs, then 9 more ifs after it
    std::string src = "def big(n):\n    total = 0\n    a = 1\n    b = a + 1\n    total = total + b\n";
    src += "    for i in n:\n";
    for (int k = 0; k < 7; ++k) src += "        if i > " + std::to_string(k) + ":\n            total = total + " + std::to_string(k) + "\n";
    src += "    log(total)\n";
    for (int k = 0; k < 9; ++k) src += "    if total > " + std::to_string(k) + ":\n        total = total - 1\n";
    src += "    return total\n";
    const AstTree t = parse_source(src);
    const AstNode& fn = only_function(t, "big");
    EXPECT_EQ(fn.span.end - fn.span.start + 1, 40);
    ASSERT_EQ(cyclomatic(fn), 18);
    const AstTree s = extract_split(t, fn.id, 5);  // first tail statement = log(total), right after the loop
    EXPECT_LE(cyclomatic(only_function(s, "big")), 10);
    EXPECT_LE(cyclomatic(only_function(s, "big_tail")), 10);
    support::Interpreter a(t), b(s);
    for (std::int64_t n = -1; n < 12; ++n) EXPECT_EQ(a.run("big", {n}), b.run("big", {n}));
}

TEST(Split, PreservesBehaviorAndComplexityLaws) {
    Rng rng(99);
    support::GenOptions opt;
    opt.mid_returns = false;
    opt.min_body = 3;
    int splits = 0;
    for (int i = 0; i < 60; ++i) {
        const AstTree t = support::random_program(rng, opt);
        const AstNode& fn = only_function(t, "f");
        const std::size_t n = fn.children.size();
        const std::size_t k = 1 + rng.below(n - 1);
        const AstTree s = extract_split(t, fn.id, k);
        ++splits;
        const int before = cyclomatic(fn);
        const int head = cyclomatic(only_function(s, "f"));
        const int tail = cyclomatic(only_function(s, "f_tail"));
        EXPECT_LE(std::max(head, tail), before);
        EXPECT_EQ(head + tail, before + 1);
        support::Interpreter a(t), b(s);
        for (int trial = 0; trial < 30; ++trial) {
            const std::vector<std::int64_t> args = {rng.range(-3, 8), rng.range(-3, 8)};
            ASSERT_EQ(a.run("f", args), b.run("f", args)) << pretty_print(t) << "---\n" << pretty_print(s);
        }
    }
    EXPECT_EQ(splits, 60);
}
