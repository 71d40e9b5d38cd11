#include "astref/corpus.hpp"

#include "astref/error.hpp"
#include "astref/graph_doc.hpp"
#include "astref/parser.hpp"
#include "astref/rng.hpp"
#include "astref/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace astref {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool contains_return(const AstNode& n) {
    if (n.kind == NodeKind::Return) return true;
    return std::any_of(n.children.begin(), n.children.end(), contains_return);
}

int count_decisions(const AstNode& n) {
    int d = is_decision(n.kind) ? 1 : 0;
    for (const auto& c : n.children) d += count_decisions(c);
    return d;
}

Label parse_label(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("label")) throw SchemaError(where + ": label missing");
    for (const auto& [key, _] : j.items()) {
        if (key != "label" && key != "split_node") throw SchemaError(where + ": unknown field " + key);
    }
    Label l;
    l.label = j.at("label").get<int>();
    if (l.label != 0 && l.label != 1) throw SchemaError(where + ": label must be 0 or 1");
    if (j.contains("split_node") && !j.at("split_node").is_null()) l.split_node = j.at("split_node").get<int>();
    return l;
}

long ceil_long(double x) { return static_cast<long>(std::ceil(x - 1e-9)); }

// Parsed and featurized unit, or the reason it was dropped.
struct Processed {
    enum class Fate { Kept, ParseFailed, Trivial, Unlabeled } fate = Fate::Kept;
    LabeledSample sample;
};

Processed process(const LabeledUnit& u) {
    Processed out;
    std::optional<AstTree> tree;
    try {
        tree = parse_source(u.unit.body);
    } catch (const LexError&) {
        out.fate = Processed::Fate::ParseFailed;
        return out;
    } catch (const ParseError&) {
        out.fate = Processed::Fate::ParseFailed;
        return out;
    }
    if (is_trivial(*tree)) {
        out.fate = Processed::Fate::Trivial;
        return out;
    }
    if (!u.label) {
        out.fate = Processed::Fate::Unlabeled;
        return out;
    }
    LabeledSample& s = out.sample;
    s.id = u.unit.path;
    s.source = normalize_source(u.unit.body);
    s.label = u.label->label;
    s.split_node = u.label->split_node;
    s.graph = build_graph(*tree);
    s.graph.label = s.label;
    s.graph.split_node = s.split_node;
    s.flat = flat_features(*tree, s.graph);
    if (s.split_node) {
        const auto [fn, k] = split_site(*tree, *s.split_node);
        const AstTree after = extract_split(*tree, fn, k);
        s.post_metrics = PostMetrics{max_function_cyclomatic(after), max_function_coupling(after)};
    }
    return out;
}

} // namespace

IngestResult ingest_dir(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " is not a readable directory");
    std::map<std::string, Label> labels;
    const fs::path label_file = dir / "labels.json";
    if (fs::exists(label_file)) {
        std::ifstream in(label_file);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw SchemaError("labels.json: " + std::string(e.what()));
        }
        if (!doc.is_object()) throw SchemaError("labels.json must be an object");
        for (const auto& [path, entry] : doc.items()) labels[path] = parse_label(entry, "labels.json[" + path + "]");
    }

    std::vector<fs::path> files;
    for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".mpy") files.push_back(it->path());
    }
    if (ec) throw IoError(dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());

    IngestResult result;
    for (const auto& f : files) {
        ++result.ingested;
        const std::string rel = fs::relative(f, dir).generic_string();
        std::ifstream in(f, std::ios::binary);
        std::stringstream body;
        if (!in || !(body << in.rdbuf())) {
            std::cerr << "io error: cannot read " << f.string() << "\n";
            ++result.unreadable;
            continue;
        }
        LabeledUnit u{SourceUnit::make(rel, body.str()), std::nullopt};
        if (auto it = labels.find(rel); it != labels.end()) u.label = it->second;
        result.units.push_back(std::move(u));
    }
    return result;
}

std::vector<LabeledUnit> dedup(std::vector<LabeledUnit> units) {
    std::stable_sort(units.begin(), units.end(),
                     [](const LabeledUnit& a, const LabeledUnit& b) { return a.unit.path < b.unit.path; });
    std::set<Digest> seen;
    std::vector<LabeledUnit> kept;
    for (auto& u : units) {
        if (seen.insert(u.unit.digest).second) kept.push_back(std::move(u));
    }
    return kept;
}

bool is_trivial(const AstTree& tree) {
    const auto statements = static_cast<std::size_t>(
        std::count_if(tree.preorder().begin(), tree.preorder().end(),
                      [&](const AstNode* n) { return tree.is_statement(n->id); }));
    if (statements < 2) return true;
    const bool has_fn = std::any_of(tree.preorder().begin(), tree.preorder().end(),
                                    [](const AstNode* n) { return n->kind == NodeKind::FunctionDef; });
    return !has_fn && tree.size() < 3;
}

Label structural_label(const AstTree& tree) {
    for (const AstNode* fn : tree.preorder()) {
        if (fn->kind != NodeKind::FunctionDef) continue;
        const auto& body = fn->children;
        for (std::size_t i = 0; i + 1 < body.size(); ++i) {
            if (contains_return(body[i])) break;
            const NodeKind k = body[i].kind;
            if ((k == NodeKind::For || k == NodeKind::While) && count_decisions(body[i]) - 1 >= 2) {
                return Label{1, body[i + 1].id};
            }
        }
    }
    return Label{0, std::nullopt};
}

std::pair<int, std::size_t> split_site(const AstTree& tree, int split_node) {
    if (split_node < 0 || static_cast<std::size_t>(split_node) >= tree.size()) {
        throw SplitError("split node " + std::to_string(split_node) + " does not exist");
    }
    const int fn = tree.parent(split_node);
    if (fn < 0 || tree.node(fn).kind != NodeKind::FunctionDef) {
        throw SplitError("split node " + std::to_string(split_node) + " is not a function body statement");
    }
    return {fn, static_cast<std::size_t>(tree.child_index(split_node))};
}

long minority_target(long majority, double target) {
    if (target <= 0 || target >= 1) throw Error("target minority fraction must lie in (0, 1)");
    long m = ceil_long(target * static_cast<double>(majority) / (1 - target));
    while (m > 0 && static_cast<double>(m - 1) / static_cast<double>(majority + m - 1) >= target) --m;
    while (static_cast<double>(m) / static_cast<double>(majority + m) < target) ++m;
    return m;
}

void split_dataset(Dataset& d, double test_fraction, std::uint64_t seed) {
    const std::size_t n = d.samples.size();
    if (n < 2) throw DataError("TooSmall: split needs at least 2 samples");
    if (test_fraction <= 0 || test_fraction >= 1) throw Error("test fraction must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(ceil_long((1 - test_fraction) * static_cast<double>(n)));
    const std::size_t n_test = std::max<std::size_t>(1, n - std::min(n_train, n - 1));

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(d.samples[i].label)].push_back(i);
    // largest remainder; the larger class wins a tie
    std::array<std::size_t, 2> quota{};
    std::array<double, 2> rem{};
    for (std::size_t c = 0; c < 2; ++c) {
        const double exact = static_cast<double>(n_test) * static_cast<double>(by_class[c].size()) / static_cast<double>(n);
        quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[c] = exact - static_cast<double>(quota[c]);
    }
    if (quota[0] + quota[1] < n_test) {
        const std::size_t c = rem[0] > rem[1] + 1e-12 ? 0
                              : rem[1] > rem[0] + 1e-12 ? 1
                              : by_class[0].size() >= by_class[1].size() ? 0 : 1;
        ++quota[c];
    }

    Rng rng(seed);
    d.train.clear();
    d.test.clear();
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        rng.shuffle(std::span<std::size_t>(idx));
        for (std::size_t j = 0; j < idx.size(); ++j) (j < quota[c] ? d.test : d.train).push_back(idx[j]);
    }
    std::sort(d.train.begin(), d.train.end());
    std::sort(d.test.begin(), d.test.end());
}

std::vector<int> kfold(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw Error("k must be at least 2");
    if (labels.size() < static_cast<std::size_t>(k)) throw DataError("TooSmall: fewer samples than folds");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
    Rng rng(seed);
    std::vector<int> folds(labels.size(), 0);
    std::size_t pos = 0;
    for (auto& idx : by_class) {
        rng.shuffle(std::span<std::size_t>(idx));
        for (std::size_t i : idx) folds[i] = static_cast<int>(pos++ % static_cast<std::size_t>(k));
    }
    return folds;
}

void oversample(Dataset& d, double target, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i : d.train) by_class[static_cast<std::size_t>(d.samples[i].label)].push_back(i);
    if (by_class[0].empty() || by_class[1].empty()) throw DataError("SingleClass: oversampling needs both classes");
    const std::size_t minority = by_class[1].size() <= by_class[0].size() ? 1 : 0;
    const auto& pool = by_class[minority];
    const auto majority = static_cast<long>(by_class[1 - minority].size());
    const long want = minority_target(majority, target);
    const long have = static_cast<long>(pool.size());
    if (have >= want) return;

    // 5 nearest minority neighbours by Euclidean distance on flat features
    constexpr std::size_t kNeighbours = 5;
    std::vector<std::vector<std::size_t>> neighbours(pool.size());
    for (std::size_t a = 0; a < pool.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t b = 0; b < pool.size(); ++b) {
            if (a == b) continue;
            double s = 0;
            const auto& x = d.samples[pool[a]].flat.values;
            const auto& y = d.samples[pool[b]].flat.values;
            for (std::size_t f = 0; f < kFlatFeatureCount; ++f) s += (x[f] - y[f]) * (x[f] - y[f]);
            dist.emplace_back(s, b);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t j = 0; j < std::min(kNeighbours, dist.size()); ++j) neighbours[a].push_back(dist[j].second);
        if (neighbours[a].empty()) neighbours[a].push_back(a);
    }

    Rng rng(seed);
    for (long made = 0; made < want - have; ++made) {
        const auto a = static_cast<std::size_t>(rng.below(pool.size()));
        const std::size_t b = neighbours[a][rng.below(neighbours[a].size())];
        const double u = rng.uniform();
        const LabeledSample& src = d.samples[pool[a]];
        const LabeledSample& nb = d.samples[pool[b]];
        LabeledSample s = src;
        s.id = src.id + "#smote" + std::to_string(made);
        s.oversampled = true;
        for (std::size_t f = 0; f < kFlatFeatureCount; ++f) {
            s.flat.values[f] = src.flat.values[f] + u * (nb.flat.values[f] - src.flat.values[f]);
        }
        const double jitter = 1 + 0.1 * (u - 0.5);
        for (auto& node : s.graph.nodes) {
            node.features[nf::kLines] *= jitter;
            node.features[nf::kVariables] *= jitter;
        }
        d.train.push_back(d.samples.size());
        d.samples.push_back(std::move(s));
        ++d.provenance.oversampled;
    }
}

Dataset build_dataset(std::vector<LabeledUnit> units, const BuildOptions& options) {
    Dataset d;
    d.seed = options.seed;
    d.provenance.ingested = static_cast<long>(units.size());
    units = dedup(std::move(units));
    d.provenance.deduped = d.provenance.ingested - static_cast<long>(units.size());

    std::vector<Processed> done(units.size());
    std::vector<std::string> errors(units.size());
    const auto count = static_cast<std::ptrdiff_t>(units.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        try {
            done[iu] = process(units[iu]);
        } catch (const std::exception& e) {
            errors[iu] = units[iu].unit.path + ": " + e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw DataError("bad label: " + e);
    }
    for (auto& p : done) {
        switch (p.fate) {
        case Processed::Fate::ParseFailed: ++d.provenance.parse_failed; break;
        case Processed::Fate::Trivial: ++d.provenance.trivial_dropped; break;
        case Processed::Fate::Unlabeled: ++d.provenance.unlabeled; break;
        case Processed::Fate::Kept: d.samples.push_back(std::move(p.sample)); break;
        }
    }
    if (d.samples.empty()) return d;

    std::vector<FlatFeatures> flats;
    for (const auto& s : d.samples) flats.push_back(s.flat);
    flats = cap_outliers(std::move(flats), options.cap_percentile);
    for (std::size_t i = 0; i < flats.size(); ++i) d.samples[i].flat = flats[i];

    if (d.samples.size() < 2) {
        d.train = {0};
        return d;
    }
    split_dataset(d, options.test_fraction, options.seed);
    const bool both = std::any_of(d.train.begin(), d.train.end(), [&](std::size_t i) { return d.samples[i].label == 1; }) &&
                      std::any_of(d.train.begin(), d.train.end(), [&](std::size_t i) { return d.samples[i].label == 0; });
    if (both) oversample(d, options.target_minority, options.seed);
    if (d.samples.size() >= static_cast<std::size_t>(options.folds)) {
        std::vector<int> labels;
        for (const auto& s : d.samples) labels.push_back(s.label);
        d.folds = kfold(labels, options.folds, options.seed);
    }
    return d;
}

// ---- manifest ----

namespace {

json provenance_json(const Provenance& p) {
    return {{"ingested", p.ingested}, {"parse_failed", p.parse_failed}, {"deduped", p.deduped},
            {"trivial_dropped", p.trivial_dropped}, {"unlabeled", p.unlabeled}, {"oversampled", p.oversampled}};
}

void expect_keys(const json& j, std::initializer_list<const char*> required, std::initializer_list<const char*> optional,
                 const std::string& where) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    for (const char* k : required) {
        if (!j.contains(k)) throw SchemaError(where + ": missing " + k);
    }
    for (const auto& [key, _] : j.items()) {
        const auto match = [&](const char* k) { return key == k; };
        if (std::none_of(required.begin(), required.end(), match) &&
            std::none_of(optional.begin(), optional.end(), match)) {
            throw SchemaError(where + ": unknown field " + key);
        }
    }
}

} // namespace

json dataset_to_json(const Dataset& d) {
    json samples = json::array();
    for (const auto& s : d.samples) {
        json j = {{"id", s.id}, {"source", s.source}, {"label", s.label}, {"oversampled", s.oversampled},
                  {"flat", s.flat.values}, {"graph", emit_graph_doc(s.graph)}};
        if (s.split_node) j["split_node"] = *s.split_node;
        if (s.post_metrics) j["post_metrics"] = {{"cyclomatic", s.post_metrics->cyclomatic}, {"coupling", s.post_metrics->coupling}};
        samples.push_back(std::move(j));
    }
    return {{"version", "1"},
            {"kind", "dataset"},
            {"seed", d.seed},
            {"provenance", provenance_json(d.provenance)},
            {"samples", std::move(samples)},
            {"split", {{"train", d.train}, {"test", d.test}}},
            {"folds", d.folds}};
}

Dataset dataset_from_json(const json& doc) {
    try {
        expect_keys(doc, {"version", "kind", "seed", "provenance", "samples", "split", "folds"}, {"models"}, "dataset");
        if (doc.at("version") != "1") throw SchemaError("dataset: unsupported version");
        if (doc.at("kind") != "dataset") throw SchemaError("dataset: kind must be \"dataset\"");
        Dataset d;
        d.seed = doc.at("seed").get<std::uint64_t>();
        const json& p = doc.at("provenance");
        expect_keys(p, {"ingested", "parse_failed", "deduped", "trivial_dropped", "unlabeled", "oversampled"}, {}, "provenance");
        d.provenance = {p.at("ingested").get<long>(), p.at("parse_failed").get<long>(), p.at("deduped").get<long>(),
                        p.at("trivial_dropped").get<long>(), p.at("unlabeled").get<long>(), p.at("oversampled").get<long>()};
        for (const auto& j : doc.at("samples")) {
            expect_keys(j, {"id", "source", "label", "oversampled", "flat", "graph"}, {"split_node", "post_metrics"}, "sample");
            LabeledSample s;
            s.id = j.at("id").get<std::string>();
            s.source = j.at("source").get<std::string>();
            s.label = j.at("label").get<int>();
            if (s.label != 0 && s.label != 1) throw SchemaError("sample " + s.id + ": label must be 0 or 1");
            s.oversampled = j.at("oversampled").get<bool>();
            const auto flat = j.at("flat").get<std::vector<double>>();
            if (flat.size() != kFlatFeatureCount) throw SchemaError("sample " + s.id + ": flat needs 35 values");
            std::copy(flat.begin(), flat.end(), s.flat.values.begin());
            s.graph = ingest_graph_doc(j.at("graph"));
            if (j.contains("split_node")) s.split_node = j.at("split_node").get<int>();
            if (j.contains("post_metrics")) {
                const json& pm = j.at("post_metrics");
                expect_keys(pm, {"cyclomatic", "coupling"}, {}, "post_metrics");
                if (!s.split_node) throw SchemaError("sample " + s.id + ": post_metrics without split_node");
                s.post_metrics = PostMetrics{pm.at("cyclomatic").get<int>(), pm.at("coupling").get<int>()};
            }
            d.samples.push_back(std::move(s));
        }
        const json& sp = doc.at("split");
        expect_keys(sp, {"train", "test"}, {}, "split");
        d.train = sp.at("train").get<std::vector<std::size_t>>();
        d.test = sp.at("test").get<std::vector<std::size_t>>();
        d.folds = doc.at("folds").get<std::vector<int>>();
        std::vector<int> seen(d.samples.size(), 0);
        for (auto* part : {&d.train, &d.test}) {
            for (std::size_t i : *part) {
                if (i >= d.samples.size() || seen[i]++) throw SchemaError("split: indices must partition the samples");
            }
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw SchemaError("split: indices must partition the samples");
        if (!d.folds.empty() && d.folds.size() != d.samples.size()) throw SchemaError("folds: one entry per sample");
        return d;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("dataset: ") + e.what());
    }
}

json bundle_to_json(const std::vector<SynthProgram>& programs, std::uint64_t seed) {
    json files = json::array();
    for (const auto& p : programs) {
        json f = {{"path", p.path}, {"source", p.source}, {"label", p.label.label}};
        if (p.label.split_node) f["split_node"] = *p.label.split_node;
        files.push_back(std::move(f));
    }
    return {{"version", "1"}, {"kind", "bundle"}, {"seed", seed}, {"files", std::move(files)}};
}

std::vector<LabeledUnit> bundle_from_json(const json& doc) {
    try {
        expect_keys(doc, {"version", "kind", "files"}, {"seed"}, "bundle");
        if (doc.at("version") != "1" || doc.at("kind") != "bundle") throw SchemaError("bundle: bad version or kind");
        std::vector<LabeledUnit> units;
        for (const auto& f : doc.at("files")) {
            expect_keys(f, {"path", "source"}, {"label", "split_node"}, "bundle file");
            LabeledUnit u{SourceUnit::make(f.at("path").get<std::string>(), f.at("source").get<std::string>()), std::nullopt};
            if (f.contains("label")) {
                json l = {{"label", f.at("label")}};
                if (f.contains("split_node")) l["split_node"] = f.at("split_node");
                u.label = parse_label(l, u.unit.path);
            }
            units.push_back(std::move(u));
        }
        return units;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bundle: ") + e.what());
    }
}

std::vector<LabeledUnit> to_units(const std::vector<SynthProgram>& programs) {
    std::vector<LabeledUnit> units;
    units.reserve(programs.size());
    for (const auto& p : programs) units.push_back({SourceUnit::make(p.path, p.source), p.label});
    return units;
}

Dataset synth_corpus(int n, std::uint64_t seed, const BuildOptions& options) {
    BuildOptions o = options;
    o.seed = seed;
    return build_dataset(to_units(synth_programs(n, seed)), o);
}

} // namespace astref
