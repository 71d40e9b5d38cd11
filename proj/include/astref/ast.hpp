#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace astref {

/// The ten MiniPy node kinds. The numeric value is the kind's type index.
enum class NodeKind : std::uint8_t {
    Module = 0,
    FunctionDef,
    If,
    For,
    While,
    Assign,
    Call,
    Return,
    Import,
    Compare,
};

inline constexpr int kNodeKindCount = 10;

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view text);

inline bool is_decision(NodeKind k) {
    return k == NodeKind::If || k == NodeKind::For || k == NodeKind::While;
}

enum class CompareOp : std::uint8_t { Lt, Gt, Le, Ge, Eq, Ne };

std::string_view to_string(CompareOp op);
std::optional<CompareOp> compare_op_from_string(std::string_view text);

/// Expression payload. Calls inside an expression are AST nodes; the
/// expression refers to them by position among the owning node's Call children.
struct Expr {
    enum class Kind : std::uint8_t { Name, Int, Binary, CallRef };

    Kind kind = Kind::Int;
    std::string name;         // Name
    std::int64_t value = 0;   // Int
    char op = '+';            // Binary: '+', '-', '*'
    int call_index = -1;      // CallRef
    std::vector<Expr> operands;  // Binary: exactly two

    static Expr make_name(std::string n);
    static Expr make_int(std::int64_t v);
    static Expr make_binary(char op, Expr lhs, Expr rhs);
    static Expr make_call_ref(int index);

    bool operator==(const Expr&) const = default;
};

struct Span {
    int start = 0;
    int end = 0;
    bool operator==(const Span&) const = default;
};

/// One syntax node. Child layout by kind:
///   Module, FunctionDef: statements
///   If:     [Compare, then-statements..., else-statements...]; else begins at else_start
///   While:  [Compare, body...]
///   For:    [calls in the iterable (header_calls of them), body...]
///   Compare, Assign, Return, Call: calls appearing in their expressions
///   Import: none
struct AstNode {
    NodeKind kind = NodeKind::Module;
    int id = -1;
    std::string name;  // FunctionDef/Call/Import target; Assign target; For variable
    Span span;
    std::vector<AstNode> children;

    std::vector<std::string> params;  // FunctionDef
    std::optional<Expr> value;        // Assign value, Return value, For iterable, Compare lhs
    std::optional<Expr> rhs;          // Compare rhs
    CompareOp op = CompareOp::Eq;     // Compare
    std::vector<Expr> args;           // Call
    std::optional<std::size_t> else_start;  // If
    std::size_t header_calls = 0;           // For

    /// Index of the first statement child (skips Compare / header calls).
    std::size_t body_begin() const;
    /// One past the last statement of the primary block (then-block for If).
    std::size_t body_end() const;
    bool has_block() const;
};

/// Structural equality: kinds, names, payloads and child shape. Ids and spans ignored.
bool structurally_equal(const AstNode& a, const AstNode& b);

/// Owns a syntax tree and indexes it by preorder id.
class AstTree {
public:
    AstTree();
    explicit AstTree(AstNode root);
    AstTree(const AstTree& other);
    AstTree(AstTree&& other) noexcept;
    AstTree& operator=(const AstTree& other);
    AstTree& operator=(AstTree&& other) noexcept;
    ~AstTree() = default;

    const AstNode& root() const { return root_; }
    const AstNode& node(int id) const;
    /// -1 for the root.
    int parent(int id) const;
    std::size_t size() const { return index_.size(); }
    std::span<const AstNode* const> preorder() const { return index_; }

    /// Depth from the root (root = 0).
    int depth(int id) const;
    /// Index of `id` within its parent's children; -1 for the root.
    int child_index(int id) const;
    /// True when the node is a statement (a block member), false for the root,
    /// Compare conditions and calls nested in expressions.
    bool is_statement(int id) const;

    /// Detach the root for rewriting.
    AstNode release() &&;

private:
    void reindex();

    AstNode root_;
    std::vector<const AstNode*> index_;
    std::vector<int> parent_;
};

bool structurally_equal(const AstTree& a, const AstTree& b);

/// Names read by an expression, in evaluation order (duplicates kept).
void collect_reads(const Expr& e, std::vector<std::string>& out);
/// Names read directly by a node's own payload (not descendants' payloads).
std::vector<std::string> node_reads(const AstNode& n);

} // namespace astref
