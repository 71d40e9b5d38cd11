#pragma once

#include "astref/graph.hpp"

#include <nlohmann/json.hpp>

namespace astref {

/// {"version":"1", "source_digest":hex32, "label"?, "split_node"?,
///  "nodes":[{"id","kind","features":[12]}], "edges":[{"src","dst","kind","features":[6]}]}
nlohmann::json emit_graph_doc(const CodeGraph& graph);

/// Throws SchemaError on unknown fields, bad ids, wrong feature lengths,
/// non-finite values, or Parent edges that do not form a tree rooted at node 0.
CodeGraph ingest_graph_doc(const nlohmann::json& doc);

} // namespace astref
