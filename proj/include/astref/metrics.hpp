#pragma once

#include "astref/ast.hpp"
#include "astref/graph.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace astref {

/// Function name -> defining file, across a project.
using ProjectIndex = std::map<std::string, std::string>;

/// McCabe complexity: 1 + number of If/For/While in the function, not
/// counting nested function definitions. Throws Error if `fn` is not a FunctionDef.
int cyclomatic(const AstNode& fn);

/// Independent cross-check of `cyclomatic`: builds the basic-block CFG of the
/// function (entry, blocks, exit) and returns E - N + 2.
int cyclomatic_cfg_oracle(const AstNode& fn);

/// Number of distinct external dependencies: imported modules used through a
/// dotted call, plus called names defined in other files of the project
/// (entries whose file equals `self_path` are ignored; local definitions win).
int coupling(const AstTree& module_tree, const ProjectIndex& project = {},
             std::string_view self_path = {});

/// The same count restricted to the calls inside one function subtree.
int function_coupling(const AstTree& module_tree, int fn_id, const ProjectIndex& project = {},
                      std::string_view self_path = {});

struct FunctionMetrics {
    int cyclomatic = 0;
    int lines = 0;
    bool operator==(const FunctionMetrics&) const = default;
};

struct ModuleMetrics {
    int coupling = 0;
    int imports = 0;
    int loops = 0;
    int variables = 0;
    int functions = 0;
    int max_scope_depth = 0;
    int total_cyclomatic = 0;
    bool operator==(const ModuleMetrics&) const = default;
};

struct MetricsReport {
    /// Keyed by function name; repeated names get "@<node id>" appended.
    std::map<std::string, FunctionMetrics> per_function;
    ModuleMetrics module;
};

MetricsReport compute_metrics(const AstTree& tree, const ProjectIndex& project = {},
                              std::string_view self_path = {});

/// Largest per-function cyclomatic complexity (0 with no functions).
int max_function_cyclomatic(const AstTree& tree);
/// Largest per-function coupling (0 with no functions).
int max_function_coupling(const AstTree& tree, const ProjectIndex& project = {},
                          std::string_view self_path = {});

inline constexpr std::size_t kFlatFeatureCount = 35;

/// Flat feature slots beyond the 10 node-kind and 5 edge-kind counts.
namespace ff {
inline constexpr std::size_t kKindCounts = 0;   // 10 slots, NodeKind order
inline constexpr std::size_t kEdgeCounts = 10;  // 5 slots, EdgeKind order
inline constexpr std::size_t kLines = 15;
inline constexpr std::size_t kNodes = 16;
inline constexpr std::size_t kEdges = 17;
inline constexpr std::size_t kLoops = 18;
inline constexpr std::size_t kVariables = 19;
inline constexpr std::size_t kFunctions = 20;
inline constexpr std::size_t kMaxTreeDepth = 21;
inline constexpr std::size_t kMeanTreeDepth = 22;
inline constexpr std::size_t kMaxScopeDepth = 23;
inline constexpr std::size_t kImports = 24;
inline constexpr std::size_t kTotalCC = 25;
inline constexpr std::size_t kMaxFnCC = 26;
inline constexpr std::size_t kMeanFnCC = 27;
inline constexpr std::size_t kCoupling = 28;
inline constexpr std::size_t kMaxFanOut = 29;
inline constexpr std::size_t kMeanFanOut = 30;
inline constexpr std::size_t kGraphDensity = 31;
inline constexpr std::size_t kLeafFraction = 32;
inline constexpr std::size_t kExternalCalls = 33;
inline constexpr std::size_t kReturns = 34;
} // namespace ff

struct FlatFeatures {
    std::array<double, kFlatFeatureCount> values{};

    static const std::array<std::string_view, kFlatFeatureCount>& names();
    bool operator==(const FlatFeatures&) const = default;
};

/// 35-slot per-snippet vector. An empty module yields all zeros.
FlatFeatures flat_features(const AstTree& tree, const CodeGraph& graph,
                           const ProjectIndex& project = {}, std::string_view self_path = {});

struct OutlierCaps {
    double lines = 200;
    double nodes = 50;
    double cyclomatic = 25;
};

/// Clamps lines, node count and total cyclomatic complexity of every sample to
/// min(nearest-rank percentile over the samples, fallback cap). Sample count is
/// unchanged. Throws DataError (EmptyDataset) or Error on a bad percentile.
std::vector<FlatFeatures> cap_outliers(std::vector<FlatFeatures> samples, double percentile,
                                       const OutlierCaps& caps = {});

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, double percentile);

} // namespace astref
