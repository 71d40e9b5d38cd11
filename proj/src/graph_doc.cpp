#include "astref/graph_doc.hpp"

#include "astref/error.hpp"

#include <cmath>
#include <initializer_list>

namespace astref {

namespace {

using nlohmann::json;

void only_fields(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(path + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(path + "." + key + ": unknown field");
    }
}

const json& field(const json& j, const std::string& path, const char* name) {
    if (!j.contains(name)) throw SchemaError(path + "." + name + ": missing");
    return j[name];
}

int int_field(const json& j, const std::string& path, const char* name) {
    const json& v = field(j, path, name);
    if (!v.is_number_integer()) throw SchemaError(path + "." + name + ": not an integer");
    return v.get<int>();
}

template <std::size_t N>
std::array<double, N> feature_array(const json& j, const std::string& path) {
    const json& v = field(j, path, "features");
    if (!v.is_array() || v.size() != N) {
        throw SchemaError(path + ".features: expected " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!v[i].is_number()) throw SchemaError(path + ".features[" + std::to_string(i) + "]: not a number");
        out[i] = v[i].get<double>();
        if (!std::isfinite(out[i])) {
            throw SchemaError(path + ".features[" + std::to_string(i) + "]: not finite");
        }
    }
    return out;
}

} // namespace

json emit_graph_doc(const CodeGraph& graph) {
    json j;
    j["version"] = "1";
    j["source_digest"] = to_hex(graph.source_digest);
    if (graph.label) j["label"] = *graph.label;
    if (graph.split_node) j["split_node"] = *graph.split_node;
    json nodes = json::array();
    for (const auto& n : graph.nodes) {
        nodes.push_back({{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"features", n.features}});
    }
    json edges = json::array();
    for (const auto& e : graph.edges) {
        edges.push_back({{"src", e.src},
                         {"dst", e.dst},
                         {"kind", std::string(to_string(e.kind))},
                         {"features", e.features}});
    }
    j["nodes"] = std::move(nodes);
    j["edges"] = std::move(edges);
    return j;
}

CodeGraph ingest_graph_doc(const json& doc) {
    only_fields(doc, "$", {"version", "source_digest", "label", "split_node", "nodes", "edges"});
    if (field(doc, "$", "version") != "1") throw SchemaError("$.version: unsupported version");
    CodeGraph g;
    const json& digest = field(doc, "$", "source_digest");
    if (!digest.is_string()) throw SchemaError("$.source_digest: not a string");
    g.source_digest = digest_from_hex(digest.get<std::string>());

    const json& nodes = field(doc, "$", "nodes");
    if (!nodes.is_array() || nodes.empty()) throw SchemaError("$.nodes: expected a non-empty array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "$.nodes[" + std::to_string(i) + "]";
        only_fields(nodes[i], path, {"id", "kind", "features"});
        NodeRecord r;
        r.id = int_field(nodes[i], path, "id");
        if (r.id != static_cast<int>(i)) throw SchemaError(path + ".id: ids must be dense from 0 in order");
        const json& kind = field(nodes[i], path, "kind");
        auto k = kind.is_string() ? node_kind_from_string(kind.get<std::string>()) : std::nullopt;
        if (!k) throw SchemaError(path + ".kind: unknown node kind");
        r.kind = *k;
        r.features = feature_array<kNodeFeatureCount>(nodes[i], path);
        g.nodes.push_back(r);
    }

    const auto n = static_cast<int>(g.nodes.size());
    std::vector<int> parents(g.nodes.size(), 0);
    const json& edges = field(doc, "$", "edges");
    if (!edges.is_array()) throw SchemaError("$.edges: expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = "$.edges[" + std::to_string(i) + "]";
        only_fields(edges[i], path, {"src", "dst", "kind", "features"});
        EdgeRecord e;
        e.src = int_field(edges[i], path, "src");
        e.dst = int_field(edges[i], path, "dst");
        if (e.src < 0 || e.src >= n) throw SchemaError(path + ".src: no such node");
        if (e.dst < 0 || e.dst >= n) throw SchemaError(path + ".dst: no such node");
        const json& kind = field(edges[i], path, "kind");
        auto k = kind.is_string() ? edge_kind_from_string(kind.get<std::string>()) : std::nullopt;
        if (!k) throw SchemaError(path + ".kind: unknown edge kind");
        e.kind = *k;
        if (e.src == e.dst && e.kind != EdgeKind::ControlFlow) {
            throw SchemaError(path + ".dst: self-loop only allowed on ControlFlow edges");
        }
        e.features = feature_array<kEdgeFeatureCount>(edges[i], path);
        if (e.kind == EdgeKind::Parent) {
            if (e.dst == 0 || e.src >= e.dst) throw SchemaError(path + ": Parent edge must point to a later node");
            ++parents[static_cast<std::size_t>(e.dst)];
        }
        g.edges.push_back(e);
    }
    for (std::size_t i = 1; i < parents.size(); ++i) {
        if (parents[i] != 1) {
            throw SchemaError("$.nodes[" + std::to_string(i) + "]: needs exactly one Parent edge");
        }
    }

    if (doc.contains("label")) {
        const int label = int_field(doc, "$", "label");
        if (label != 0 && label != 1) throw SchemaError("$.label: must be 0 or 1");
        g.label = label;
    }
    if (doc.contains("split_node")) {
        const int s = int_field(doc, "$", "split_node");
        if (s < 0 || s >= n) throw SchemaError("$.split_node: no such node");
        g.split_node = s;
    }
    return g;
}

} // namespace astref
