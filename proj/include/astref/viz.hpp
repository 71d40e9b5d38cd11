#pragma once

#include "astref/graph.hpp"
#include "astref/metrics.hpp"

#include <map>
#include <optional>
#include <string>

namespace astref {

struct RenderStyle {
    double red_complexity_threshold = 12;
    double green_coupling_threshold = 4;
    double thick_weight_threshold = 2;
    std::string control = "blue";
    std::string data = "purple";
    std::string hot = "red";
    std::string cool = "green";
    std::string neutral = "gray";
};

/// Per-FunctionDef metrics keyed by node id.
struct VizMetrics {
    std::map<int, int> cyclomatic;
    std::map<int, int> coupling;
};

VizMetrics viz_metrics(const AstTree& tree, const ProjectIndex& project = {});

/// FunctionDef nodes: hot when cyclomatic > red threshold, else cool when
/// coupling < green threshold, else neutral. Every other node is neutral.
const std::string& node_color(const NodeRecord& node, const VizMetrics& metrics, const RenderStyle& style);
/// Parent, NextSibling and ControlFlow edges are control-colored; Calls and DataFlow data-colored.
const std::string& edge_color(EdgeKind kind, const RenderStyle& style);
/// 3 when the weight feature exceeds the threshold, else 1.
int pen_width(const EdgeRecord& edge, const RenderStyle& style);

std::string to_dot(const CodeGraph& graph, const VizMetrics& metrics, const RenderStyle& style = {});

/// Self-contained HTML with one inline SVG per tree (side by side when
/// `after` is given) and a caption with cyclomatic and coupling before/after.
std::string to_html(const AstTree& before, const std::optional<AstTree>& after, const RenderStyle& style = {});

} // namespace astref
