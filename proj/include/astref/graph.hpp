#pragma once

#include "astref/ast.hpp"
#include "astref/source.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace astref {

enum class EdgeKind : std::uint8_t { Parent = 0, NextSibling, Calls, ControlFlow, DataFlow };

inline constexpr int kEdgeKindCount = 5;
inline constexpr std::size_t kNodeFeatureCount = 12;
inline constexpr std::size_t kEdgeFeatureCount = 6;

std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> edge_kind_from_string(std::string_view text);

using NodeFeatures = std::array<double, kNodeFeatureCount>;
using EdgeFeatures = std::array<double, kEdgeFeatureCount>;

/// Node feature slots, in schema order.
namespace nf {
inline constexpr std::size_t kLines = 0;
inline constexpr std::size_t kDepth = 1;
inline constexpr std::size_t kType = 2;       // type index / 10
inline constexpr std::size_t kScope = 3;
inline constexpr std::size_t kVariables = 4;
inline constexpr std::size_t kInDegree = 5;
inline constexpr std::size_t kOutDegree = 6;
inline constexpr std::size_t kLoops = 7;
inline constexpr std::size_t kImports = 8;
inline constexpr std::size_t kCyclomatic = 9;
inline constexpr std::size_t kChildren = 10;
inline constexpr std::size_t kSubtreeNodes = 11;
} // namespace nf

/// Edge feature slots, in schema order.
namespace ef {
inline constexpr std::size_t kType = 0;      // type index / 5
inline constexpr std::size_t kDistance = 1;  // tree distance
inline constexpr std::size_t kWeight = 2;    // parallel multiplicity
inline constexpr std::size_t kFlow = 3;      // 1 control-ish, 0 data-ish
inline constexpr std::size_t kDirection = 4; // 1 if src < dst
inline constexpr std::size_t kStrength = 5;  // 1 / (1 + distance)
} // namespace ef

struct NodeRecord {
    int id = 0;
    NodeKind kind = NodeKind::Module;
    NodeFeatures features{};
    bool operator==(const NodeRecord&) const = default;
};

struct EdgeRecord {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Parent;
    EdgeFeatures features{};
    bool operator==(const EdgeRecord&) const = default;
};

struct CodeGraph {
    std::vector<NodeRecord> nodes;
    std::vector<EdgeRecord> edges;
    Digest source_digest{};
    std::optional<int> label;       // 1 refactor, 0 keep
    std::optional<int> split_node;

    bool operator==(const CodeGraph&) const = default;
};

/// One node per AST node (same ids), edges:
///   Parent       parent -> child
///   NextSibling  child i -> child i+1 of the same parent
///   Calls        Call -> first FunctionDef of that name in the tree
///   ControlFlow  last child of a For/While -> the loop
///   DataFlow     Assign -> each later node (same enclosing function) reading its target
/// The source digest is the MD5 of the normalized pretty-printed tree.
CodeGraph build_graph(const AstTree& tree);

/// Feature row of one node (builds the graph to obtain degrees).
NodeFeatures node_features(const AstTree& tree, int node_id);

/// Edge feature vector computed in the context of `tree`'s structure. `weight`
/// is the number of same-kind edges sharing dst and the src's enclosing function.
EdgeFeatures edge_features(const AstTree& tree, EdgeKind kind, int src, int dst, int weight);

/// Rebuilds the tree skeleton (kinds and child order) from Parent edges alone.
AstNode skeleton_from_graph(const CodeGraph& graph);

/// Names every FunctionDef's enclosing function (-1 at module level); index = node id.
std::vector<int> enclosing_functions(const AstTree& tree);

} // namespace astref
