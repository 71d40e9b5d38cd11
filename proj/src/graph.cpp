#include "astref/graph.hpp"

#include "astref/error.hpp"
#include "astref/printer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace astref {

namespace {

constexpr std::array<std::string_view, kEdgeKindCount> kEdgeNames = {
    "Parent", "NextSibling", "Calls", "ControlFlow", "DataFlow",
};

int tree_distance(const AstTree& tree, int a, int b) {
    int da = tree.depth(a);
    int db = tree.depth(b);
    int dist = 0;
    while (da > db) { a = tree.parent(a); --da; ++dist; }
    while (db > da) { b = tree.parent(b); --db; ++dist; }
    while (a != b) {
        a = tree.parent(a);
        b = tree.parent(b);
        dist += 2;
    }
    return dist;
}

bool is_control(EdgeKind k) {
    return k == EdgeKind::Parent || k == EdgeKind::NextSibling || k == EdgeKind::ControlFlow;
}

bool in_subtree(const AstTree& tree, int root, int id) {
    for (int p = id; p >= 0; p = tree.parent(p)) {
        if (p == root) return true;
    }
    return false;
}

} // namespace

std::string_view to_string(EdgeKind kind) { return kEdgeNames[static_cast<std::size_t>(kind)]; }

std::optional<EdgeKind> edge_kind_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kEdgeNames.size(); ++i) {
        if (kEdgeNames[i] == text) return static_cast<EdgeKind>(i);
    }
    return std::nullopt;
}

std::vector<int> enclosing_functions(const AstTree& tree) {
    std::vector<int> out(tree.size(), -1);
    for (std::size_t id = 1; id < tree.size(); ++id) {
        const int p = tree.parent(static_cast<int>(id));
        out[id] = tree.node(p).kind == NodeKind::FunctionDef ? p : out[static_cast<std::size_t>(p)];
    }
    return out;
}

EdgeFeatures edge_features(const AstTree& tree, EdgeKind kind, int src, int dst, int weight) {
    const double dist = tree_distance(tree, src, dst);
    EdgeFeatures f{};
    f[ef::kType] = static_cast<double>(kind) / kEdgeKindCount;
    f[ef::kDistance] = dist;
    f[ef::kWeight] = weight;
    f[ef::kFlow] = is_control(kind) ? 1.0 : 0.0;
    f[ef::kDirection] = src < dst ? 1.0 : 0.0;
    f[ef::kStrength] = 1.0 / (1.0 + dist);
    return f;
}

CodeGraph build_graph(const AstTree& tree) {
    const std::size_t n = tree.size();
    const auto scope = enclosing_functions(tree);

    struct RawEdge {
        int src;
        int dst;
        EdgeKind kind;
    };
    std::vector<RawEdge> raw;

    for (std::size_t id = 1; id < n; ++id) {
        raw.push_back({tree.parent(static_cast<int>(id)), static_cast<int>(id), EdgeKind::Parent});
    }
    for (const AstNode* node : tree.preorder()) {
        for (std::size_t i = 1; i < node->children.size(); ++i) {
            raw.push_back({node->children[i - 1].id, node->children[i].id, EdgeKind::NextSibling});
        }
    }
    std::map<std::string, int> defs;
    for (const AstNode* node : tree.preorder()) {
        if (node->kind == NodeKind::FunctionDef) defs.emplace(node->name, node->id);
    }
    for (const AstNode* node : tree.preorder()) {
        if (node->kind != NodeKind::Call) continue;
        auto it = defs.find(node->name);
        if (it != defs.end()) raw.push_back({node->id, it->second, EdgeKind::Calls});
    }
    for (const AstNode* node : tree.preorder()) {
        if ((node->kind == NodeKind::For || node->kind == NodeKind::While) && !node->children.empty()) {
            raw.push_back({node->children.back().id, node->id, EdgeKind::ControlFlow});
        }
    }
    std::vector<std::vector<std::string>> reads(n);
    for (const AstNode* node : tree.preorder()) {
        reads[static_cast<std::size_t>(node->id)] = node_reads(*node);
    }
    for (const AstNode* def : tree.preorder()) {
        if (def->kind != NodeKind::Assign) continue;
        for (std::size_t r = static_cast<std::size_t>(def->id) + 1; r < n; ++r) {
            if (scope[r] != scope[static_cast<std::size_t>(def->id)]) continue;
            const auto& names = reads[r];
            if (std::find(names.begin(), names.end(), def->name) == names.end()) continue;
            if (in_subtree(tree, def->id, static_cast<int>(r))) continue;
            raw.push_back({def->id, static_cast<int>(r), EdgeKind::DataFlow});
        }
    }

    std::map<std::tuple<EdgeKind, int, int>, int> multiplicity;
    for (const auto& e : raw) ++multiplicity[{e.kind, e.dst, scope[static_cast<std::size_t>(e.src)]}];

    CodeGraph g;
    g.edges.reserve(raw.size());
    std::vector<int> in_deg(n, 0);
    std::vector<int> out_deg(n, 0);
    for (const auto& e : raw) {
        const int w = multiplicity[{e.kind, e.dst, scope[static_cast<std::size_t>(e.src)]}];
        g.edges.push_back({e.src, e.dst, e.kind, edge_features(tree, e.kind, e.src, e.dst, w)});
        ++out_deg[static_cast<std::size_t>(e.src)];
        ++in_deg[static_cast<std::size_t>(e.dst)];
    }

    // subtree aggregates; preorder ids let a reverse sweep fold children into parents
    std::vector<double> loops(n, 0), imports(n, 0), decisions(n, 0), sizes(n, 1);
    std::vector<std::set<std::string>> vars(n);
    for (std::size_t id = n; id-- > 0;) {
        const AstNode& node = tree.node(static_cast<int>(id));
        if (node.kind == NodeKind::For || node.kind == NodeKind::While) loops[id] += 1;
        if (node.kind == NodeKind::Import) imports[id] += 1;
        if (is_decision(node.kind)) decisions[id] += 1;
        if (node.kind == NodeKind::Assign || node.kind == NodeKind::For) vars[id].insert(node.name);
        const int p = tree.parent(static_cast<int>(id));
        if (p >= 0) {
            const auto pi = static_cast<std::size_t>(p);
            loops[pi] += loops[id];
            imports[pi] += imports[id];
            decisions[pi] += decisions[id];
            sizes[pi] += sizes[id];
            vars[pi].insert(vars[id].begin(), vars[id].end());
        }
    }

    g.nodes.reserve(n);
    for (std::size_t id = 0; id < n; ++id) {
        const AstNode& node = tree.node(static_cast<int>(id));
        int scope_depth = 0;
        for (int p = tree.parent(static_cast<int>(id)); p >= 0; p = tree.parent(p)) {
            if (tree.node(p).kind != NodeKind::Module && tree.node(p).has_block()) ++scope_depth;
        }
        NodeFeatures f{};
        f[nf::kLines] = node.span.end > 0 ? node.span.end - node.span.start + 1 : 0;
        f[nf::kDepth] = tree.depth(static_cast<int>(id));
        f[nf::kType] = static_cast<double>(node.kind) / kNodeKindCount;
        f[nf::kScope] = scope_depth;
        f[nf::kVariables] = static_cast<double>(vars[id].size());
        f[nf::kInDegree] = in_deg[id];
        f[nf::kOutDegree] = out_deg[id];
        f[nf::kLoops] = loops[id];
        f[nf::kImports] = imports[id];
        f[nf::kCyclomatic] = 1.0 + decisions[id];
        f[nf::kChildren] = static_cast<double>(node.children.size());
        f[nf::kSubtreeNodes] = sizes[id];
        g.nodes.push_back({static_cast<int>(id), node.kind, f});
    }
    g.source_digest = md5(normalize_source(pretty_print(tree)));
    return g;
}

NodeFeatures node_features(const AstTree& tree, int node_id) {
    tree.node(node_id);
    return build_graph(tree).nodes[static_cast<std::size_t>(node_id)].features;
}

AstNode skeleton_from_graph(const CodeGraph& graph) {
    if (graph.nodes.empty()) throw SchemaError("graph has no nodes");
    std::vector<std::vector<int>> kids(graph.nodes.size());
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Parent) kids[static_cast<std::size_t>(e.src)].push_back(e.dst);
    }
    auto build = [&](auto&& self, int id) -> AstNode {
        AstNode n;
        n.kind = graph.nodes[static_cast<std::size_t>(id)].kind;
        auto ordered = kids[static_cast<std::size_t>(id)];
        std::sort(ordered.begin(), ordered.end());
        for (int c : ordered) n.children.push_back(self(self, c));
        return n;
    };
    return build(build, 0);
}

} // namespace astref
