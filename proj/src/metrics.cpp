#include "astref/metrics.hpp"

#include "astref/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <utility>

namespace astref {

namespace {

/// Visits the function body, skipping nested function definitions.
void walk_function(const AstNode& n, const std::function<void(const AstNode&)>& visit) {
    for (const auto& c : n.children) {
        visit(c);
        if (c.kind != NodeKind::FunctionDef) walk_function(c, visit);
    }
}

class CfgBuilder {
public:
    int new_block() { return next_++; }

    void edge(int from, int to) { edges_.insert({from, to}); }

    /// Lays out statements [begin, end) of `owner` starting in block `cur`;
    /// returns the block control falls out of.
    int sequence(const AstNode& owner, std::size_t begin, std::size_t end, int cur) {
        for (std::size_t i = begin; i < end; ++i) cur = statement(owner.children[i], cur);
        return cur;
    }

    int statement(const AstNode& s, int cur) {
        switch (s.kind) {
        case NodeKind::If: {
            // `cur` ends with the condition
            const int then_block = new_block();
            edge(cur, then_block);
            const int then_out = sequence(s, 1, s.body_end(), then_block);
            const int join = new_block();
            edge(then_out, join);
            if (s.else_start) {
                const int else_block = new_block();
                edge(cur, else_block);
                edge(sequence(s, *s.else_start, s.children.size(), else_block), join);
            } else {
                edge(cur, join);
            }
            return join;
        }
        case NodeKind::For:
        case NodeKind::While: {
            const int header = new_block();
            edge(cur, header);
            const int body = new_block();
            edge(header, body);
            edge(sequence(s, s.body_begin(), s.children.size(), body), header);
            const int after = new_block();
            edge(header, after);
            return after;
        }
        case NodeKind::Return: {
            edge(cur, exit_);
            // code after a return still gets a (dead) block of its own
            return new_block();
        }
        default: return cur;
        }
    }

    int run(const AstNode& fn) {
        const int entry = new_block();
        exit_ = new_block();
        const int first = new_block();
        edge(entry, first);
        edge(sequence(fn, 0, fn.children.size(), first), exit_);
        return static_cast<int>(edges_.size()) - next_ + 2;
    }

private:
    int next_ = 0;
    int exit_ = -1;
    std::set<std::pair<int, int>> edges_;
};

struct CallTargets {
    std::set<std::string> imports;
    std::set<std::string> local_defs;
};

CallTargets call_targets(const AstTree& tree) {
    CallTargets t;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind == NodeKind::Import) t.imports.insert(n->name);
        if (n->kind == NodeKind::FunctionDef) t.local_defs.insert(n->name);
    }
    return t;
}

void count_dependency(const AstNode& call, const CallTargets& targets, const ProjectIndex& project,
                      std::string_view self_path, std::set<std::string>& deps) {
    for (const auto& m : targets.imports) {
        if (call.name.size() > m.size() && call.name.compare(0, m.size(), m) == 0 &&
            call.name[m.size()] == '.') {
            deps.insert("import:" + m);
        }
    }
    if (targets.local_defs.count(call.name)) return;
    auto it = project.find(call.name);
    if (it != project.end() && it->second != self_path) deps.insert("fn:" + call.name);
}

std::vector<int> function_ids(const AstTree& tree) {
    std::vector<int> ids;
    for (const AstNode* n : tree.preorder()) {
        if (n->kind == NodeKind::FunctionDef) ids.push_back(n->id);
    }
    return ids;
}

int scope_depth(const AstTree& tree, int id) {
    int d = 0;
    for (int p = tree.parent(id); p >= 0; p = tree.parent(p)) {
        if (tree.node(p).kind != NodeKind::Module && tree.node(p).has_block()) ++d;
    }
    return d;
}

} // namespace

int cyclomatic(const AstNode& fn) {
    if (fn.kind != NodeKind::FunctionDef) throw Error("cyclomatic: node is not a FunctionDef");
    int decisions = 0;
    walk_function(fn, [&](const AstNode& n) {
        if (is_decision(n.kind)) ++decisions;
    });
    return 1 + decisions;
}

int cyclomatic_cfg_oracle(const AstNode& fn) {
    if (fn.kind != NodeKind::FunctionDef) throw Error("cyclomatic_cfg_oracle: node is not a FunctionDef");
    return CfgBuilder{}.run(fn);
}

int coupling(const AstTree& module_tree, const ProjectIndex& project, std::string_view self_path) {
    const CallTargets targets = call_targets(module_tree);
    std::set<std::string> deps;
    for (const AstNode* n : module_tree.preorder()) {
        if (n->kind == NodeKind::Call) count_dependency(*n, targets, project, self_path, deps);
    }
    return static_cast<int>(deps.size());
}

int function_coupling(const AstTree& module_tree, int fn_id, const ProjectIndex& project,
                      std::string_view self_path) {
    const AstNode& fn = module_tree.node(fn_id);
    if (fn.kind != NodeKind::FunctionDef) throw Error("function_coupling: node is not a FunctionDef");
    const CallTargets targets = call_targets(module_tree);
    std::set<std::string> deps;
    walk_function(fn, [&](const AstNode& n) {
        if (n.kind == NodeKind::Call) count_dependency(n, targets, project, self_path, deps);
    });
    return static_cast<int>(deps.size());
}

MetricsReport compute_metrics(const AstTree& tree, const ProjectIndex& project,
                              std::string_view self_path) {
    MetricsReport r;
    std::set<std::string> vars;
    for (const AstNode* n : tree.preorder()) {
        switch (n->kind) {
        case NodeKind::FunctionDef: {
            ++r.module.functions;
            std::string key = n->name;
            if (r.per_function.count(key)) key += "@" + std::to_string(n->id);
            const FunctionMetrics fm{cyclomatic(*n), n->span.end > 0 ? n->span.end - n->span.start + 1 : 0};
            r.module.total_cyclomatic += fm.cyclomatic;
            r.per_function.emplace(std::move(key), fm);
            break;
        }
        case NodeKind::For:
            ++r.module.loops;
            vars.insert(n->name);
            break;
        case NodeKind::While: ++r.module.loops; break;
        case NodeKind::Assign: vars.insert(n->name); break;
        case NodeKind::Import: ++r.module.imports; break;
        default: break;
        }
        if (tree.is_statement(n->id)) {
            r.module.max_scope_depth = std::max(r.module.max_scope_depth, scope_depth(tree, n->id));
        }
    }
    r.module.variables = static_cast<int>(vars.size());
    r.module.coupling = coupling(tree, project, self_path);
    return r;
}

int max_function_cyclomatic(const AstTree& tree) {
    int best = 0;
    for (int id : function_ids(tree)) best = std::max(best, cyclomatic(tree.node(id)));
    return best;
}

int max_function_coupling(const AstTree& tree, const ProjectIndex& project, std::string_view self_path) {
    int best = 0;
    for (int id : function_ids(tree)) best = std::max(best, function_coupling(tree, id, project, self_path));
    return best;
}

const std::array<std::string_view, kFlatFeatureCount>& FlatFeatures::names() {
    static const std::array<std::string_view, kFlatFeatureCount> kNames = {
        "count_Module", "count_FunctionDef", "count_If", "count_For", "count_While",
        "count_Assign", "count_Call", "count_Return", "count_Import", "count_Compare",
        "edges_Parent", "edges_NextSibling", "edges_Calls", "edges_ControlFlow", "edges_DataFlow",
        "lines", "nodes", "edges", "loops", "variables",
        "functions", "max_tree_depth", "mean_tree_depth", "max_scope_depth", "imports",
        "total_CC", "max_fn_CC", "mean_fn_CC", "coupling", "max_fan_out",
        "mean_fan_out", "graph_density", "leaf_fraction", "call_count_external", "return_count",
    };
    return kNames;
}

FlatFeatures flat_features(const AstTree& tree, const CodeGraph& graph, const ProjectIndex& project,
                           std::string_view self_path) {
    FlatFeatures out;
    if (tree.root().children.empty()) return out;
    auto& v = out.values;
    const MetricsReport m = compute_metrics(tree, project, self_path);

    const auto n = static_cast<double>(tree.size());
    double depth_sum = 0;
    double max_depth = 0;
    double leaves = 0;
    std::set<std::string> local_defs;
    for (const AstNode* node : tree.preorder()) {
        v[ff::kKindCounts + static_cast<std::size_t>(node->kind)] += 1;
        const double d = tree.depth(node->id);
        depth_sum += d;
        max_depth = std::max(max_depth, d);
        if (node->children.empty()) leaves += 1;
        if (node->kind == NodeKind::FunctionDef) local_defs.insert(node->name);
        if (node->kind == NodeKind::Return) v[ff::kReturns] += 1;
    }
    for (const AstNode* node : tree.preorder()) {
        if (node->kind == NodeKind::Call && !local_defs.count(node->name)) v[ff::kExternalCalls] += 1;
    }
    for (const auto& e : graph.edges) v[ff::kEdgeCounts + static_cast<std::size_t>(e.kind)] += 1;

    const auto e = static_cast<double>(graph.edges.size());
    v[ff::kLines] = tree.root().span.end > 0 ? tree.root().span.end - tree.root().span.start + 1 : 0;
    v[ff::kNodes] = n;
    v[ff::kEdges] = e;
    v[ff::kLoops] = m.module.loops;
    v[ff::kVariables] = m.module.variables;
    v[ff::kFunctions] = m.module.functions;
    v[ff::kMaxTreeDepth] = max_depth;
    v[ff::kMeanTreeDepth] = depth_sum / n;
    v[ff::kMaxScopeDepth] = m.module.max_scope_depth;
    v[ff::kImports] = m.module.imports;
    v[ff::kTotalCC] = m.module.total_cyclomatic;
    v[ff::kCoupling] = m.module.coupling;

    double max_cc = 0;
    double max_fan = 0;
    double fan_sum = 0;
    for (int id : function_ids(tree)) {
        const AstNode& fn = tree.node(id);
        max_cc = std::max(max_cc, static_cast<double>(cyclomatic(fn)));
        std::set<std::string> callees;
        walk_function(fn, [&](const AstNode& c) {
            if (c.kind == NodeKind::Call) callees.insert(c.name);
        });
        max_fan = std::max(max_fan, static_cast<double>(callees.size()));
        fan_sum += static_cast<double>(callees.size());
    }
    const double fns = m.module.functions;
    v[ff::kMaxFnCC] = max_cc;
    v[ff::kMeanFnCC] = fns > 0 ? m.module.total_cyclomatic / fns : 0.0;
    v[ff::kMaxFanOut] = max_fan;
    v[ff::kMeanFanOut] = fns > 0 ? fan_sum / fns : 0.0;
    v[ff::kGraphDensity] = n > 1 ? e / (n * (n - 1)) : 0.0;
    v[ff::kLeafFraction] = leaves / n;
    return out;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
    if (values.empty()) throw DataError("EmptyDataset: no values for percentile");
    if (!(percentile > 0.0 && percentile <= 100.0)) throw Error("percentile must be in (0, 100]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(values.size()) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

std::vector<FlatFeatures> cap_outliers(std::vector<FlatFeatures> samples, double percentile,
                                       const OutlierCaps& caps) {
    if (samples.empty()) throw DataError("EmptyDataset: nothing to cap");
    const std::array<std::pair<std::size_t, double>, 3> slots = {{
        {ff::kLines, caps.lines}, {ff::kNodes, caps.nodes}, {ff::kTotalCC, caps.cyclomatic}}};
    for (const auto& [slot, fallback] : slots) {
        std::vector<double> column;
        column.reserve(samples.size());
        for (const auto& s : samples) column.push_back(s.values[slot]);
        const double cap = std::min(nearest_rank_percentile(std::move(column), percentile), fallback);
        for (auto& s : samples) s.values[slot] = std::min(s.values[slot], cap);
    }
    return samples;
}

} // namespace astref
