#include "astref/split.hpp"

#include "astref/error.hpp"
#include "astref/parser.hpp"
#include "astref/printer.hpp"

#include <algorithm>
#include <set>

namespace astref {

namespace {

bool contains_return(const AstNode& n) {
    if (n.kind == NodeKind::Return) return true;
    return std::any_of(n.children.begin(), n.children.end(), contains_return);
}

void collect_defs(const AstNode& n, std::set<std::string>& defs) {
    if (n.kind == NodeKind::Assign || n.kind == NodeKind::For) defs.insert(n.name);
    if (n.kind == NodeKind::FunctionDef) return;  // nested scopes do not leak
    for (const auto& c : n.children) collect_defs(c, defs);
}

void collect_subtree_reads(const AstNode& n, std::vector<std::string>& out) {
    // payload reads happen before nested calls complete; order within a
    // statement does not matter for liveness
    for (auto& r : node_reads(n)) out.push_back(std::move(r));
    if (n.kind == NodeKind::FunctionDef) return;
    for (const auto& c : n.children) collect_subtree_reads(c, out);
}

void collect_names(const AstNode& n, std::set<std::string>& names) {
    if (n.kind == NodeKind::FunctionDef || n.kind == NodeKind::Call) names.insert(n.name);
    for (const auto& c : n.children) collect_names(c, names);
}

AstNode* find_mut(AstNode& n, int id) {
    if (n.id == id) return &n;
    for (auto& c : n.children) {
        if (AstNode* hit = find_mut(c, id)) return hit;
    }
    return nullptr;
}

} // namespace

SplitPlan plan_split(const AstTree& tree, int fn_id, std::size_t k) {
    if (fn_id < 0 || static_cast<std::size_t>(fn_id) >= tree.size()) {
        throw SplitError("node " + std::to_string(fn_id) + " does not exist");
    }
    const AstNode& fn = tree.node(fn_id);
    if (fn.kind != NodeKind::FunctionDef) {
        throw SplitError("node " + std::to_string(fn_id) + " is not a FunctionDef");
    }
    const std::size_t n = fn.children.size();
    if (k < 1 || k >= n) {
        throw SplitError("split index " + std::to_string(k) + " out of range [1, " +
                         std::to_string(n) + ")");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (contains_return(fn.children[i])) throw SplitError("head contains a return");
    }

    std::set<std::string> available(fn.params.begin(), fn.params.end());
    for (std::size_t i = 0; i < k; ++i) collect_defs(fn.children[i], available);

    SplitPlan plan;
    std::set<std::string> definite;
    std::set<std::string> seen;
    for (std::size_t i = k; i < n; ++i) {
        const AstNode& stmt = fn.children[i];
        std::vector<std::string> reads;
        collect_subtree_reads(stmt, reads);
        for (const auto& r : reads) {
            if (definite.count(r) || !available.count(r) || seen.count(r)) continue;
            seen.insert(r);
            plan.live_vars.push_back(r);
        }
        if (stmt.kind == NodeKind::Assign) definite.insert(stmt.name);
    }

    std::set<std::string> taken;
    collect_names(tree.root(), taken);
    plan.tail_name = fn.name + "_tail";
    for (int suffix = 2; taken.count(plan.tail_name); ++suffix) {
        plan.tail_name = fn.name + "_tail" + std::to_string(suffix);
    }
    return plan;
}

AstTree extract_split(const AstTree& tree, int fn_id, std::size_t k) {
    const SplitPlan plan = plan_split(tree, fn_id, k);
    const int parent_id = tree.parent(fn_id);
    const auto fn_pos = static_cast<std::size_t>(tree.child_index(fn_id));

    AstNode root = tree.root();  // copy keeps ids for lookup
    AstNode* parent = find_mut(root, parent_id);
    AstNode& fn = parent->children[fn_pos];

    AstNode tail;
    tail.kind = NodeKind::FunctionDef;
    tail.name = plan.tail_name;
    tail.params = plan.live_vars;
    tail.children.assign(std::make_move_iterator(fn.children.begin() + static_cast<std::ptrdiff_t>(k)),
                         std::make_move_iterator(fn.children.end()));
    fn.children.resize(k);

    AstNode call;
    call.kind = NodeKind::Call;
    call.name = plan.tail_name;
    for (const auto& v : plan.live_vars) call.args.push_back(Expr::make_name(v));
    AstNode ret;
    ret.kind = NodeKind::Return;
    ret.children.push_back(std::move(call));
    ret.value = Expr::make_call_ref(0);
    fn.children.push_back(std::move(ret));

    // an If parent may have an else boundary after the function
    if (parent->kind == NodeKind::If && parent->else_start && *parent->else_start > fn_pos) {
        ++*parent->else_start;
    }
    parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(fn_pos) + 1,
                            std::move(tail));

    return parse_source(pretty_print(AstTree(std::move(root))));
}

} // namespace astref
