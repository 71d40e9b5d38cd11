#include "astref/ast.hpp"

#include "astref/error.hpp"

#include <utility>

namespace astref {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kKindNames = {
    "Module", "FunctionDef", "If", "For", "While", "Assign", "Call", "Return", "Import", "Compare",
};

constexpr std::array<std::string_view, 6> kOpNames = {"<", ">", "<=", ">=", "==", "!="};

bool payload_equal(const AstNode& a, const AstNode& b) {
    return a.kind == b.kind && a.name == b.name && a.params == b.params && a.value == b.value &&
           a.rhs == b.rhs && (a.kind != NodeKind::Compare || a.op == b.op) && a.args == b.args &&
           a.else_start == b.else_start && a.header_calls == b.header_calls;
}

} // namespace

std::string_view to_string(NodeKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> node_kind_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == text) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

std::string_view to_string(CompareOp op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<CompareOp> compare_op_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kOpNames.size(); ++i) {
        if (kOpNames[i] == text) return static_cast<CompareOp>(i);
    }
    return std::nullopt;
}

Expr Expr::make_name(std::string n) {
    Expr e;
    e.kind = Kind::Name;
    e.name = std::move(n);
    return e;
}

Expr Expr::make_int(std::int64_t v) {
    Expr e;
    e.kind = Kind::Int;
    e.value = v;
    return e;
}

Expr Expr::make_binary(char op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

Expr Expr::make_call_ref(int index) {
    Expr e;
    e.kind = Kind::CallRef;
    e.call_index = index;
    return e;
}

std::size_t AstNode::body_begin() const {
    switch (kind) {
    case NodeKind::If:
    case NodeKind::While: return 1;
    case NodeKind::For: return header_calls;
    default: return 0;
    }
}

std::size_t AstNode::body_end() const {
    if (kind == NodeKind::If && else_start) return *else_start;
    return children.size();
}

bool AstNode::has_block() const {
    switch (kind) {
    case NodeKind::Module:
    case NodeKind::FunctionDef:
    case NodeKind::If:
    case NodeKind::For:
    case NodeKind::While: return true;
    default: return false;
    }
}

bool structurally_equal(const AstNode& a, const AstNode& b) {
    if (!payload_equal(a, b) || a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    }
    return true;
}

bool structurally_equal(const AstTree& a, const AstTree& b) {
    return structurally_equal(a.root(), b.root());
}

AstTree::AstTree() : AstTree(AstNode{}) {}

AstTree::AstTree(AstNode root) : root_(std::move(root)) {
    if (root_.kind != NodeKind::Module) throw SchemaError("root kind must be Module");
    reindex();
}

AstTree::AstTree(const AstTree& other) : root_(other.root_) { reindex(); }

AstTree::AstTree(AstTree&& other) noexcept : root_(std::move(other.root_)) {
    // children buffers moved intact; only the root slot changed address
    index_ = std::move(other.index_);
    parent_ = std::move(other.parent_);
    if (!index_.empty()) index_[0] = &root_;
}

AstTree& AstTree::operator=(const AstTree& other) {
    if (this != &other) {
        root_ = other.root_;
        reindex();
    }
    return *this;
}

AstTree& AstTree::operator=(AstTree&& other) noexcept {
    if (this != &other) {
        root_ = std::move(other.root_);
        index_ = std::move(other.index_);
        parent_ = std::move(other.parent_);
        if (!index_.empty()) index_[0] = &root_;
    }
    return *this;
}

void AstTree::reindex() {
    index_.clear();
    parent_.clear();
    // iterative preorder; ids assigned on visit
    std::vector<std::pair<AstNode*, int>> stack{{&root_, -1}};
    while (!stack.empty()) {
        auto [n, parent] = stack.back();
        stack.pop_back();
        n->id = static_cast<int>(index_.size());
        index_.push_back(n);
        parent_.push_back(parent);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) {
            stack.emplace_back(&*it, n->id);
        }
    }
}

const AstNode& AstTree::node(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= index_.size()) {
        throw Error("node id out of range: " + std::to_string(id));
    }
    return *index_[static_cast<std::size_t>(id)];
}

int AstTree::parent(int id) const {
    node(id);
    return parent_[static_cast<std::size_t>(id)];
}

int AstTree::depth(int id) const {
    int d = 0;
    for (int p = parent(id); p >= 0; p = parent_[static_cast<std::size_t>(p)]) ++d;
    return d;
}

int AstTree::child_index(int id) const {
    const int p = parent(id);
    if (p < 0) return -1;
    const auto& siblings = node(p).children;
    for (std::size_t i = 0; i < siblings.size(); ++i) {
        if (siblings[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

bool AstTree::is_statement(int id) const {
    const int p = parent(id);
    if (p < 0) return false;
    const AstNode& parent_node = node(p);
    if (!parent_node.has_block()) return false;
    const auto idx = static_cast<std::size_t>(child_index(id));
    return idx >= parent_node.body_begin();
}

AstNode AstTree::release() && {
    index_.clear();
    parent_.clear();
    return std::move(root_);
}

void collect_reads(const Expr& e, std::vector<std::string>& out) {
    switch (e.kind) {
    case Expr::Kind::Name: out.push_back(e.name); break;
    case Expr::Kind::Binary:
        for (const auto& o : e.operands) collect_reads(o, out);
        break;
    default: break;
    }
}

std::vector<std::string> node_reads(const AstNode& n) {
    std::vector<std::string> out;
    if (n.value) collect_reads(*n.value, out);
    if (n.rhs) collect_reads(*n.rhs, out);
    for (const auto& a : n.args) collect_reads(a, out);
    return out;
}

} // namespace astref
