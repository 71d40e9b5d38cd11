#include "astref/viz.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace astref {

namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string label(const NodeRecord& n) { return std::string(to_string(n.kind)) + "#" + std::to_string(n.id); }

constexpr double kDx = 70;
constexpr double kDy = 60;
constexpr double kPad = 40;

// Tidy-enough layout: leaves take consecutive columns, parents center over children.
struct Layout {
    std::vector<double> x, y;
    double width = 0, height = 0;
};

Layout layout(const CodeGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<int>> kids(n);
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::Parent) kids[static_cast<std::size_t>(e.src)].push_back(e.dst);
    }
    Layout l;
    l.x.assign(n, 0);
    l.y.assign(n, 0);
    double next = 0;
    int max_depth = 0;
    // ids are preorder, so children always have larger ids than their parent
    std::vector<int> depth(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        for (int c : kids[v]) depth[static_cast<std::size_t>(c)] = depth[v] + 1;
    }
    for (std::size_t i = n; i-- > 0;) {
        max_depth = std::max(max_depth, depth[i]);
        l.y[i] = kPad + depth[i] * kDy;
    }
    // leaf columns in preorder
    for (std::size_t v = 0; v < n; ++v) {
        if (kids[v].empty()) l.x[v] = kPad + kDx * next++;
    }
    for (std::size_t i = n; i-- > 0;) {
        if (kids[i].empty()) continue;
        double s = 0;
        for (int c : kids[i]) s += l.x[static_cast<std::size_t>(c)];
        l.x[i] = s / static_cast<double>(kids[i].size());
    }
    l.width = 2 * kPad + kDx * std::max(0.0, next - 1);
    l.height = 2 * kPad + kDy * max_depth;
    return l;
}

std::string svg(const AstTree& tree, const RenderStyle& style) {
    const CodeGraph g = build_graph(tree);
    const VizMetrics m = viz_metrics(tree);
    const Layout l = layout(g);
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n",
                  l.width, l.height);
    out << buf;
    for (const auto& e : g.edges) {
        const auto s = static_cast<std::size_t>(e.src);
        const auto t = static_cast<std::size_t>(e.dst);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"%d\">",
                      l.x[s], l.y[s], l.x[t], l.y[t], edge_color(e.kind, style).c_str(), pen_width(e, style));
        out << buf << "<title>" << to_string(e.kind) << " " << e.src << "-&gt;" << e.dst << "</title></line>\n";
    }
    for (const auto& n : g.nodes) {
        const auto i = static_cast<std::size_t>(n.id);
        std::snprintf(buf, sizeof buf, "<g><circle cx=\"%.1f\" cy=\"%.1f\" r=\"14\" fill=\"%s\"/>", l.x[i], l.y[i],
                      node_color(n, m, style).c_str());
        out << buf << "<title>" << escape(label(n));
        const AstNode& a = tree.node(n.id);
        if (!a.name.empty()) out << " " << escape(a.name);
        if (auto it = m.cyclomatic.find(n.id); it != m.cyclomatic.end()) {
            out << " cyclomatic " << it->second << " coupling " << m.coupling.at(n.id);
        }
        std::snprintf(buf, sizeof buf,
                      "</title><text x=\"%.1f\" y=\"%.1f\" font-size=\"9\" text-anchor=\"middle\">", l.x[i],
                      l.y[i] + 26);
        out << buf << escape(label(n)) << "</text></g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<int> function_cc(const AstTree& tree) {
    std::vector<int> out;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind == NodeKind::FunctionDef) out.push_back(cyclomatic(*n));
    }
    return out;
}

} // namespace

VizMetrics viz_metrics(const AstTree& tree, const ProjectIndex& project) {
    VizMetrics m;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind != NodeKind::FunctionDef) continue;
        m.cyclomatic[n->id] = cyclomatic(*n);
        m.coupling[n->id] = function_coupling(tree, n->id, project);
    }
    return m;
}

const std::string& node_color(const NodeRecord& node, const VizMetrics& m, const RenderStyle& style) {
    if (node.kind != NodeKind::FunctionDef) return style.neutral;
    const auto cc = m.cyclomatic.find(node.id);
    if (cc != m.cyclomatic.end() && cc->second > style.red_complexity_threshold) return style.hot;
    const auto cp = m.coupling.find(node.id);
    if (cp != m.coupling.end() && cp->second < style.green_coupling_threshold) return style.cool;
    return style.neutral;
}

const std::string& edge_color(EdgeKind kind, const RenderStyle& style) {
    return kind == EdgeKind::Calls || kind == EdgeKind::DataFlow ? style.data : style.control;
}

int pen_width(const EdgeRecord& edge, const RenderStyle& style) {
    return edge.features[ef::kWeight] > style.thick_weight_threshold ? 3 : 1;
}

std::string to_dot(const CodeGraph& graph, const VizMetrics& metrics, const RenderStyle& style) {
    std::ostringstream out;
    out << "digraph ast {\n  node [shape=box, style=filled];\n";
    for (const auto& n : graph.nodes) {
        out << "  n" << n.id << " [label=\"" << label(n) << "\", fillcolor=" << node_color(n, metrics, style) << "];\n";
    }
    for (const auto& e : graph.edges) {
        out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << to_string(e.kind)
            << "\", color=" << edge_color(e.kind, style) << ", penwidth=" << pen_width(e, style) << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_html(const AstTree& before, const std::optional<AstTree>& after, const RenderStyle& style) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>astref</title>\n"
           "<style>body{font-family:sans-serif} .panels{display:flex;gap:24px;align-items:flex-start}"
           " .panel{border:1px solid #ccc;overflow:auto}</style>\n</head>\n<body>\n";
    const int cc_before = max_function_cyclomatic(before);
    const int cp_before = max_function_coupling(before);
    out << "<p class=\"caption\">cyclomatic " << cc_before;
    if (after) {
        out << " &#8594; max(";
        const auto ccs = function_cc(*after);
        for (std::size_t i = 0; i < ccs.size(); ++i) out << (i ? ", " : "") << ccs[i];
        out << ") = " << max_function_cyclomatic(*after);
    }
    out << "; coupling " << cp_before;
    if (after) out << " &#8594; " << max_function_coupling(*after);
    out << "</p>\n<div class=\"panels\">\n<div class=\"panel\">\n<h3>before</h3>\n" << svg(before, style) << "</div>\n";
    if (after) out << "<div class=\"panel\">\n<h3>after</h3>\n" << svg(*after, style) << "</div>\n";
    out << "</div>\n</body>\n</html>\n";
    return out.str();
}

} // namespace astref
