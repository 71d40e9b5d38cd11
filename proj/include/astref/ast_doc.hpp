#pragma once

#include "astref/ast.hpp"

#include <nlohmann/json.hpp>

namespace astref {

/// Portable AST document:
///   {"version":"1", "kind", "name"?, "span":[start,end], "children":[...]}
/// Only the root carries "version". Expression payloads are not part of the
/// document; ingest synthesizes them from Call children so the tree stays
/// printable (reads of variables are therefore unknown for ingested trees).
nlohmann::json emit_ast_doc(const AstTree& tree);

/// Validates and loads a document. Throws SchemaError naming the first
/// offending field as a JSON path.
AstTree ingest_ast_doc(const nlohmann::json& doc);

} // namespace astref
