#include "astref/parser.hpp"
#include "astref/split.hpp"
#include "astref/viz.hpp"

#include "support/dot_parser.hpp"
#include "support/program_gen.hpp"

#include <gtest/gtest.h>

using namespace astref;
using support::DotGraph;
using support::parse_dot;

namespace {

std::string if_chain(const std::string& name, int ifs) {
    std::string src = "def " + name + "(a):\n";
    for (int i = 0; i < ifs; ++i) src += "    if a > " + std::to_string(i) + ":\n        log(a)\n";
    return src;
}

DotGraph render(const std::string& src, const RenderStyle& style = {}) {
    const AstTree t = parse_source(src);
    return parse_dot(to_dot(build_graph(t), viz_metrics(t), style));
}

int count(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

} // namespace

TEST(Dot, StraightLineFunctionHasNoRed) {
    const DotGraph g = render("def f(a):\n    x = a + 1\n    log(x)\n");
    EXPECT_EQ(g.nodes.at("n1").at("fillcolor"), "green");
    EXPECT_EQ(g.nodes.at("n1").at("label"), "FunctionDef#1");
    for (const auto& [id, attrs] : g.nodes) EXPECT_NE(attrs.at("fillcolor"), "red") << id;
}

TEST(Dot, RedIsStrictlyAboveTwelve) {
    EXPECT_EQ(render(if_chain("f", 12)).nodes.at("n1").at("fillcolor"), "red");    // CC 13
    EXPECT_EQ(render(if_chain("f", 11)).nodes.at("n1").at("fillcolor"), "green");  // CC 12
    RenderStyle lower;
    lower.red_complexity_threshold = 11;
    EXPECT_EQ(render(if_chain("f", 11), lower).nodes.at("n1").at("fillcolor"), "red");
}

TEST(Dot, GreenIsStrictlyBelowFour) {
    const std::string four = "import a\nimport b\nimport c\nimport d\n\ndef f(x):\n    a.p(x)\n    b.p(x)\n    c.p(x)\n    d.p(x)\n";
    const std::string three = "import a\nimport b\nimport c\n\ndef f(x):\n    a.p(x)\n    b.p(x)\n    c.p(x)\n";
    EXPECT_EQ(render(four).nodes.at("n5").at("fillcolor"), "gray");
    EXPECT_EQ(render(three).nodes.at("n4").at("fillcolor"), "green");
}

TEST(Dot, NonFunctionNodesNeverColored) {
    const DotGraph g = render(if_chain("f", 14));
    for (const auto& [id, attrs] : g.nodes) {
        if (id != "n1") EXPECT_EQ(attrs.at("fillcolor"), "gray") << id;
    }
}

TEST(Dot, EdgeColorsAndWidths) {
    const std::string twice = "def g(x):\n    log(x)\n\ndef f(a):\n    g(a)\n    g(a)\n";
    const DotGraph g2 = render(twice);
    int calls = 0;
    for (const auto& e : g2.edges) {
        const std::string& kind = e.attrs.at("label");
        if (kind == "Calls" || kind == "DataFlow") {
            EXPECT_EQ(e.attrs.at("color"), "purple");
        } else {
            EXPECT_EQ(e.attrs.at("color"), "blue");
        }
        if (kind == "Calls") {
            ++calls;
            EXPECT_EQ(e.attrs.at("penwidth"), "1");  // weight 2 is not > 2
        }
    }
    EXPECT_EQ(calls, 2);
    const DotGraph g3 = render("def g(x):\n    log(x)\n\ndef f(a):\n    g(a)\n    g(a)\n    g(a)\n");
    for (const auto& e : g3.edges) {
        if (e.attrs.at("label") == "Calls") EXPECT_EQ(e.attrs.at("penwidth"), "3");
    }
}

TEST(Dot, RandomProgramsParseAndMatchGraph) {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const AstTree t = support::random_program(rng, {});
        const CodeGraph g = build_graph(t);
        const DotGraph d = parse_dot(to_dot(g, viz_metrics(t)));
        EXPECT_EQ(d.nodes.size(), g.nodes.size());
        EXPECT_EQ(d.edges.size(), g.edges.size());
    }
}

TEST(DotParser, RejectsMalformed) {
    EXPECT_THROW(parse_dot("graph { a }"), support::DotSyntaxError);
    EXPECT_THROW(parse_dot("digraph { a -> }"), support::DotSyntaxError);
    EXPECT_THROW(parse_dot("digraph { a [x=1 }"), support::DotSyntaxError);
    EXPECT_NO_THROW(parse_dot("digraph g { a; b [label=\"x y\"]; a -> b [color=blue, penwidth=3]; }"));
}

TEST(Html, BeforeOnlyHasOnePanel) {
    const std::string html = to_html(parse_source(if_chain("f", 3)), std::nullopt);
    EXPECT_EQ(count(html, "<svg"), 1);
    EXPECT_NE(html.find("cyclomatic 4;"), std::string::npos);
    EXPECT_EQ(html.find("<script"), std::string::npos);
    EXPECT_EQ(html.find("src="), std::string::npos);
    EXPECT_EQ(html.find("href="), std::string::npos);
}

TEST(Html, SplitCaption) {
    const AstTree before = parse_source(if_chain("big", 17));  // CC 18
    const AstTree after = extract_split(before, 1, 9);
    const std::string html = to_html(before, after);
    EXPECT_EQ(count(html, "<svg"), 2);
    EXPECT_NE(html.find("cyclomatic 18 &#8594; max(10, 9) = 10"), std::string::npos);
    EXPECT_EQ(html, to_html(before, after));
}

TEST(Html, HoverTitlesCarryMetrics) {
    const std::string html = to_html(parse_source(if_chain("f", 2)), std::nullopt);
    EXPECT_NE(html.find("<title>FunctionDef#1 f cyclomatic 3 coupling 0</title>"), std::string::npos);
}
