#include "astref/ast_doc.hpp"

#include "astref/error.hpp"

namespace astref {

namespace {

using nlohmann::json;

json emit_node(const AstNode& n, bool root) {
    json j = json::object();
    if (root) j["version"] = "1";
    j["kind"] = std::string(to_string(n.kind));
    if (!n.name.empty()) j["name"] = n.name;
    j["span"] = json::array({n.span.start, n.span.end});
    json kids = json::array();
    for (const auto& c : n.children) kids.push_back(emit_node(c, false));
    j["children"] = std::move(kids);
    return j;
}

bool carries_name(NodeKind k) {
    switch (k) {
    case NodeKind::FunctionDef:
    case NodeKind::Call:
    case NodeKind::Import:
    case NodeKind::Assign:
    case NodeKind::For: return true;
    default: return false;
    }
}

/// Sum of CallRefs over `count` calls, or literal 0.
Expr calls_expr(std::size_t first, std::size_t count) {
    if (count == 0) return Expr::make_int(0);
    Expr e = Expr::make_call_ref(static_cast<int>(first));
    for (std::size_t i = 1; i < count; ++i) {
        e = Expr::make_binary('+', std::move(e), Expr::make_call_ref(static_cast<int>(first + i)));
    }
    return e;
}

void require_all_calls(const AstNode& n, const std::string& path) {
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (n.children[i].kind != NodeKind::Call) {
            throw SchemaError(path + ".children[" + std::to_string(i) + "].kind: " +
                              std::string(to_string(n.kind)) + " children must be Call");
        }
    }
}

void require_statements(const AstNode& n, std::size_t begin, const std::string& path) {
    for (std::size_t i = begin; i < n.children.size(); ++i) {
        const NodeKind k = n.children[i].kind;
        if (k == NodeKind::Module || k == NodeKind::Compare) {
            throw SchemaError(path + ".children[" + std::to_string(i) + "].kind: " +
                              std::string(to_string(k)) + " is not a statement");
        }
    }
    if (n.kind != NodeKind::Module && n.children.size() <= begin) {
        throw SchemaError(path + ".children: block of " + std::string(to_string(n.kind)) +
                          " must not be empty");
    }
}

AstNode ingest_node(const json& j, const std::string& path, bool root, const Span* parent_span) {
    if (!j.is_object()) throw SchemaError(path + ": node must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "kind" && key != "name" && key != "span" && key != "children" &&
            !(root && key == "version")) {
            throw SchemaError(path + "." + key + ": unknown field");
        }
    }
    if (root && j.contains("version") && j["version"] != "1") {
        throw SchemaError(path + ".version: unsupported version");
    }
    if (!j.contains("kind") || !j["kind"].is_string()) {
        throw SchemaError(path + ".kind: missing or not a string");
    }
    const auto kind = node_kind_from_string(j["kind"].get<std::string>());
    if (!kind) throw SchemaError(path + ".kind: unknown kind '" + j["kind"].get<std::string>() + "'");

    AstNode n;
    n.kind = *kind;
    if (root != (n.kind == NodeKind::Module)) {
        throw SchemaError(path + ".kind: Module must be the root and only the root");
    }
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw SchemaError(path + ".name: not a string");
        if (!carries_name(n.kind)) {
            throw SchemaError(path + ".name: not allowed on " + std::string(to_string(n.kind)));
        }
        n.name = j["name"].get<std::string>();
    }
    if (carries_name(n.kind) && n.name.empty()) throw SchemaError(path + ".name: required");
    if (j.contains("span")) {
        const auto& s = j["span"];
        if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer()) {
            throw SchemaError(path + ".span: expected [start,end] integers");
        }
        n.span = {s[0].get<int>(), s[1].get<int>()};
        if (n.span.start > n.span.end || n.span.start < 0) {
            throw SchemaError(path + ".span: start must not exceed end");
        }
        if (parent_span && parent_span->end > 0 && n.span.end > 0 &&
            (n.span.start < parent_span->start || n.span.end > parent_span->end)) {
            throw SchemaError(path + ".span: not contained in parent span");
        }
    }
    if (j.contains("children")) {
        const auto& kids = j["children"];
        if (!kids.is_array()) throw SchemaError(path + ".children: not an array");
        for (std::size_t i = 0; i < kids.size(); ++i) {
            n.children.push_back(
                ingest_node(kids[i], path + ".children[" + std::to_string(i) + "]", false, &n.span));
        }
    }

    switch (n.kind) {
    case NodeKind::Module:
    case NodeKind::FunctionDef: require_statements(n, 0, path); break;
    case NodeKind::If:
    case NodeKind::While:
        if (n.children.empty() || n.children[0].kind != NodeKind::Compare) {
            throw SchemaError(path + ".children[0].kind: " + std::string(to_string(n.kind)) +
                              " must start with Compare");
        }
        require_statements(n, 1, path);
        break;
    case NodeKind::For:
        require_statements(n, 0, path);
        n.value = Expr::make_int(0);
        break;
    case NodeKind::Compare:
        require_all_calls(n, path);
        n.value = n.children.empty() ? Expr::make_int(0) : Expr::make_call_ref(0);
        n.rhs = calls_expr(1, n.children.size() > 1 ? n.children.size() - 1 : 0);
        break;
    case NodeKind::Assign:
        require_all_calls(n, path);
        n.value = calls_expr(0, n.children.size());
        break;
    case NodeKind::Return:
        require_all_calls(n, path);
        if (!n.children.empty()) n.value = calls_expr(0, n.children.size());
        break;
    case NodeKind::Call:
        require_all_calls(n, path);
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            n.args.push_back(Expr::make_call_ref(static_cast<int>(i)));
        }
        break;
    case NodeKind::Import:
        if (!n.children.empty()) throw SchemaError(path + ".children: Import has no children");
        break;
    }
    return n;
}

} // namespace

json emit_ast_doc(const AstTree& tree) { return emit_node(tree.root(), true); }

AstTree ingest_ast_doc(const json& doc) { return AstTree(ingest_node(doc, "$", true, nullptr)); }

} // namespace astref
