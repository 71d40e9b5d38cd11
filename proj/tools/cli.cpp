#include "cli.hpp"

#include "astref/ast_doc.hpp"
#include "astref/corpus.hpp"
#include "astref/dtree.hpp"
#include "astref/error.hpp"
#include "astref/gcn.hpp"
#include "astref/graph_doc.hpp"
#include "astref/metrics.hpp"
#include "astref/parser.hpp"
#include "astref/printer.hpp"
#include "astref/report.hpp"
#include "astref/rules.hpp"
#include "astref/split.hpp"
#include "astref/viz.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace astref::cli {

namespace {

using nlohmann::json;

std::string read_input(const std::string& path, std::istream& in) {
    if (path.empty() || path == "-") {
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw IoError("cannot write " + path);
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(what + ": " + e.what());
    }
}

std::string csv_row(std::span<const double> values) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
    return out.str();
}

struct Common {
    std::string format = "text";
    std::uint64_t seed = 42;
};

void add_format(CLI::App* cmd, Common& c, std::vector<std::string> allowed) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(allowed));
}

void add_seed(CLI::App* cmd, Common& c) { cmd->add_option("--seed", c.seed, "Seed for stochastic stages"); }

// ---- subcommands ----

int cmd_parse(const std::string& file, const Common& c, std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    if (c.format == "json") {
        out << emit_ast_doc(tree).dump(2) << "\n";
    } else {
        out << pretty_print(tree);
    }
    return kOk;
}

int cmd_metrics(const std::string& file, const Common& c, std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    const MetricsReport r = compute_metrics(tree);
    const FlatFeatures flat = flat_features(tree, build_graph(tree));
    const auto& names = FlatFeatures::names();
    if (c.format == "csv") {
        for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
        out << "\n" << csv_row(flat.values) << "\n";
        return kOk;
    }
    json per_fn = json::object();
    for (const auto& [name, m] : r.per_function) per_fn[name] = {{"cyclomatic", m.cyclomatic}, {"lines", m.lines}};
    const ModuleMetrics& m = r.module;
    json flat_j = json::object();
    for (std::size_t i = 0; i < names.size(); ++i) flat_j[std::string(names[i])] = flat.values[i];
    const json doc = {{"version", "1"},
                      {"seed", c.seed},
                      {"per_function", per_fn},
                      {"module", {{"coupling", m.coupling}, {"imports", m.imports}, {"loops", m.loops},
                                  {"variables", m.variables}, {"functions", m.functions},
                                  {"max_scope_depth", m.max_scope_depth}, {"total_cyclomatic", m.total_cyclomatic}}},
                      {"flat_features", flat_j}};
    if (c.format == "json") {
        out << doc.dump(2) << "\n";
        return kOk;
    }
    for (const auto& [name, fm] : r.per_function) {
        out << "function " << name << ": cyclomatic " << fm.cyclomatic << ", lines " << fm.lines << "\n";
    }
    out << "module: coupling " << m.coupling << ", imports " << m.imports << ", loops " << m.loops << ", variables "
        << m.variables << ", functions " << m.functions << ", max scope depth " << m.max_scope_depth
        << ", total cyclomatic " << m.total_cyclomatic << "\n";
    return kOk;
}

int cmd_graph(const std::string& file, const Common& c, std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    const CodeGraph g = build_graph(tree);
    if (c.format == "dot") {
        out << to_dot(g, viz_metrics(tree));
    } else {
        out << emit_graph_doc(g).dump(2) << "\n";
    }
    return kOk;
}

int cmd_rules(const std::string& file, const Common& c, std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    const auto findings = analyze_rules(tree);
    if (c.format == "json") {
        json list = json::array();
        for (const auto& f : findings) {
            list.push_back({{"rule", std::string(to_string(f.rule))}, {"target", f.target}, {"target_name", f.target_name},
                            {"measured", f.measured}, {"threshold", f.threshold}, {"suggestion", f.suggestion}});
        }
        out << json{{"version", "1"}, {"seed", c.seed}, {"refactor", findings.empty() ? 0 : 1}, {"findings", list}}.dump(2)
            << "\n";
        return kOk;
    }
    if (findings.empty()) out << "no findings\n";
    for (const auto& f : findings) {
        out << to_string(f.rule) << " " << f.target_name << ": " << f.measured << " > " << f.threshold << " ("
            << f.suggestion << ")\n";
    }
    return kOk;
}

int cmd_synth(int n, const std::string& out_path, const Common& c, std::ostream& out) {
    write_output(out_path, bundle_to_json(synth_programs(n, c.seed), c.seed).dump() + "\n", out);
    return kOk;
}

int cmd_corpus_build(const std::string& in_dir, const std::string& out_path, BuildOptions o, bool seed_given,
                     std::istream& in, std::ostream& out, std::ostream& err) {
    std::vector<LabeledUnit> units;
    long unreadable = 0;
    if (!in_dir.empty()) {
        IngestResult r = ingest_dir(in_dir);
        units = std::move(r.units);
        unreadable = r.unreadable;
    } else {
        const json bundle = parse_json(read_input("-", in), "bundle");
        units = bundle_from_json(bundle);
        // a bundle carries the seed it was generated with
        if (!seed_given && bundle.contains("seed")) o.seed = bundle.at("seed").get<std::uint64_t>();
    }
    err << "seed=" << o.seed << "\n";
    Dataset d = build_dataset(std::move(units), o);
    d.provenance.ingested += unreadable;
    const Provenance& p = d.provenance;
    err << "corpus: ingested " << p.ingested << ", parse_failed " << p.parse_failed << ", deduped " << p.deduped
        << ", trivial_dropped " << p.trivial_dropped << ", unlabeled " << p.unlabeled << ", oversampled "
        << p.oversampled << "; " << d.train.size() << " train / " << d.test.size() << " test\n";
    write_output(out_path, dataset_to_json(d).dump() + "\n", out);
    return kOk;
}

struct TrainFlags {
    std::string model;
    std::string in_path, out_path;
    TrainConfig gcn;
    GcnConfig arch;
    DTreeParams tree;
    bool grid = false;
};

std::pair<std::vector<std::vector<double>>, std::vector<int>> flat_train(const Dataset& d) {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (std::size_t i : d.train) {
        x.emplace_back(d.samples[i].flat.values.begin(), d.samples[i].flat.values.end());
        y.push_back(d.samples[i].label);
    }
    return {x, y};
}

json train_dtree_json(const Dataset& d, DTreeParams params, bool grid, std::uint64_t seed, std::ostream& err) {
    auto [x, y] = flat_train(d);
    if (x.empty()) throw DataError("EmptyDataset: no training samples");
    if (grid) {
        std::vector<int> folds;
        for (std::size_t i : d.train) folds.push_back(d.folds.empty() ? static_cast<int>(i % 5) : d.folds[i]);
        const auto depths = default_depth_grid();
        const auto g = grid_search_dtree(x, y, folds, depths, params.min_samples_split);
        err << "dtree grid: best depth " << g.best_depth << "\n";
        params.max_depth = g.best_depth;
    }
    return dtree_to_json(train_dtree(x, y, params, seed));
}

json train_gcn_json(const Dataset& d, const GcnConfig& arch, const TrainConfig& cfg, bool grid, std::ostream& err) {
    std::vector<CodeGraph> train;
    for (std::size_t i : d.train) train.push_back(d.samples[i].graph);
    if (train.empty()) throw DataError("EmptyDataset: no training samples");
    GcnConfig chosen = arch;
    TrainConfig tc = cfg;
    if (grid) {
        // hold out every fifth training graph for ranking
        std::vector<CodeGraph> fit, val;
        for (std::size_t i = 0; i < train.size(); ++i) (i % 5 == 4 ? val : fit).push_back(train[i]);
        const auto points = default_gcn_grid();
        const GridResult g = grid_search_gcn(fit, val, points, cfg);
        chosen = g.best.config;
        tc.learning_rate = g.best.learning_rate;
        err << "gnn grid: layers " << chosen.layers << ", units " << chosen.units << ", lr " << tc.learning_rate
            << ", val pr_auc " << g.best.val_auc << "\n";
    }
    const TrainResult r = train_gcn(GcnModel::init(chosen, tc.seed), train, {}, tc);
    if (!r.history.empty()) {
        err << "gnn: " << r.history.size() << " epochs, final loss " << r.history.back().train_loss << ", train acc "
            << r.history.back().train_acc << "\n";
    }
    return gcn_to_json(r.model);
}

int cmd_train(const TrainFlags& f, Common c, bool seed_given, std::istream& in, std::ostream& out, std::ostream& err) {
    json doc = parse_json(read_input(f.in_path, in), "manifest");
    const Dataset d = dataset_from_json(doc);
    if (!seed_given) c.seed = d.seed;
    err << "seed=" << c.seed << "\n";
    if (f.model == "dtree") {
        doc["models"]["dtree"] = train_dtree_json(d, f.tree, f.grid, c.seed, err);
    } else {
        TrainConfig tc = f.gcn;
        tc.seed = c.seed;
        doc["models"]["gnn"] = train_gcn_json(d, f.arch, tc, f.grid, err);
    }
    write_output(f.out_path, doc.dump() + "\n", out);
    return kOk;
}

int cmd_eval(const std::string& in_path, const std::string& out_path, const std::string& pr_out, Common c,
             bool seed_given, std::istream& in, std::ostream& out, std::ostream& err) {
    const json doc = parse_json(read_input(in_path, in), "manifest");
    const Dataset d = dataset_from_json(doc);
    if (!seed_given) c.seed = d.seed;
    err << "seed=" << c.seed << "\n";
    const json models = doc.value("models", json::object());
    DTreeModel tree;
    GcnModel gnn;
    if (models.contains("dtree")) {
        tree = dtree_from_json(models.at("dtree"));
    } else {
        err << "eval: no dtree checkpoint in the manifest, training one with defaults\n";
        tree = dtree_from_json(train_dtree_json(d, {}, false, c.seed, err));
    }
    if (models.contains("gnn")) {
        gnn = gcn_from_json(models.at("gnn"));
    } else {
        err << "eval: no gnn checkpoint in the manifest, training one with defaults\n";
        TrainConfig tc;
        tc.seed = c.seed;
        gnn = gcn_from_json(train_gcn_json(d, {}, tc, false, err));
    }
    const ComparisonReport r = compare(d, tree, gnn);
    std::string text;
    if (c.format == "json") {
        text = report_to_json(r).dump(2) + "\n";
    } else if (c.format == "csv") {
        text = report_csv(r);
    } else {
        text = report_text(r);
    }
    write_output(out_path, text, out);
    if (!pr_out.empty()) write_output(pr_out, pr_points_csv(r), out);
    return kOk;
}

GcnModel load_gnn(const std::string& path, std::istream& in) {
    const json doc = parse_json(read_input(path, in), "model");
    if (doc.contains("models")) {
        if (!doc.at("models").contains("gnn")) throw DataError("manifest has no gnn checkpoint");
        return gcn_from_json(doc.at("models").at("gnn"));
    }
    return gcn_from_json(doc);
}

int cmd_suggest(const std::string& file, const std::string& model_path, bool apply, const Common& c,
                std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    const GcnModel model = load_gnn(model_path, in);
    const CodeGraph g = build_graph(tree);
    const SplitSuggestion s = suggest_split(model, g);
    const double prob = forward(model, g).graph_prob[0];
    json doc = {{"version", "1"}, {"seed", c.seed}, {"refactor_prob", prob}, {"node_id", s.node_id},
                {"score", s.score}, {"eligible", s.eligible}};
    std::string split_text;
    if (s.eligible) {
        const auto [fn, k] = split_site(tree, s.node_id);
        doc["function"] = tree.node(fn).name;
        doc["index"] = k;
        if (apply) split_text = pretty_print(extract_split(tree, fn, k));
    }
    if (c.format == "json") {
        if (apply && s.eligible) doc["split_source"] = split_text;
        out << doc.dump(2) << "\n";
        return kOk;
    }
    out << "refactor probability " << prob << "\n";
    if (!s.eligible) {
        out << "no eligible split point\n";
    } else {
        out << "split " << doc["function"].get<std::string>() << " before statement " << doc["index"].get<std::size_t>() << " (node "
            << s.node_id << ", score " << s.score << ")\n";
        out << split_text;
    }
    return kOk;
}

int cmd_viz(const std::string& file, const std::string& model_path, int split_k, const std::string& fn_name,
            const std::string& out_path, std::string format, std::istream& in, std::ostream& out) {
    const AstTree tree = parse_source(read_input(file, in));
    std::optional<AstTree> after;
    if (!model_path.empty()) {
        const GcnModel model = load_gnn(model_path, in);
        const SplitSuggestion s = suggest_split(model, build_graph(tree));
        if (s.eligible) {
            const auto [fn, k] = split_site(tree, s.node_id);
            after = extract_split(tree, fn, k);
        }
    } else if (split_k >= 0) {
        int fn = -1;
        int best = -1;
        for (const AstNode* n : tree.preorder()) {
            if (n->kind != NodeKind::FunctionDef) continue;
            if (!fn_name.empty() ? n->name == fn_name : cyclomatic(*n) > best) {
                fn = n->id;
                best = cyclomatic(*n);
                if (!fn_name.empty()) break;
            }
        }
        if (fn < 0) throw DataError("no function to split");
        after = extract_split(tree, fn, static_cast<std::size_t>(split_k));
    }
    if (format.empty()) format = out_path.size() >= 5 && out_path.ends_with(".html") ? "html" : "dot";
    const std::string text = format == "html" ? to_html(tree, after) : to_dot(build_graph(after ? *after : tree),
                                                                                viz_metrics(after ? *after : tree));
    write_output(out_path, text, out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"astref: code metrics, refactoring baselines and a graph network over MiniPy"};
    app.require_subcommand(1);
    Common c;

    std::string file;
    auto* parse = app.add_subcommand("parse", "Parse a MiniPy file");
    parse->add_option("file", file, "Source file, - for stdin")->required();
    add_format(parse, c, {"text", "json"});
    add_seed(parse, c);

    auto* metrics = app.add_subcommand("metrics", "Metrics report and flat features");
    metrics->add_option("file", file)->required();
    add_format(metrics, c, {"text", "json", "csv"});
    add_seed(metrics, c);

    auto* graph = app.add_subcommand("graph", "Code graph as a JSON document or DOT");
    graph->add_option("file", file)->required();
    add_format(graph, c, {"json", "dot"});
    add_seed(graph, c);

    auto* rules = app.add_subcommand("rules", "Threshold rule findings");
    rules->add_option("file", file)->required();
    add_format(rules, c, {"text", "json"});
    add_seed(rules, c);

    int synth_n = 2000;
    std::string out_path;
    auto* synth = app.add_subcommand("synth", "Emit a seeded synthetic corpus bundle");
    synth->add_option("--n", synth_n, "Program count")->check(CLI::Range(10, 10000000));
    synth->add_option("--out", out_path);
    add_seed(synth, c);

    auto* corpus = app.add_subcommand("corpus", "Dataset construction");
    corpus->require_subcommand(1);
    std::string in_dir;
    BuildOptions build;
    auto* build_cmd = corpus->add_subcommand("build", "Build a dataset manifest from --in DIR or a bundle on stdin");
    build_cmd->add_option("--in", in_dir, "Directory of *.mpy files (labels.json for labels)");
    build_cmd->add_option("--out", out_path);
    build_cmd->add_option("--seed", build.seed);
    build_cmd->add_option("--test-fraction", build.test_fraction)->check(CLI::Range(0.0, 1.0));
    build_cmd->add_option("--target-minority", build.target_minority)->check(CLI::Range(0.0, 1.0));
    build_cmd->add_option("--cap-percentile", build.cap_percentile)->check(CLI::Range(0.0, 100.0));
    build_cmd->add_option("--folds", build.folds)->check(CLI::Range(2, 100));

    TrainFlags tf;
    auto* train = app.add_subcommand("train", "Train a model and add it to the manifest");
    train->add_option("--model", tf.model)->required()->check(CLI::IsMember({"gnn", "dtree"}));
    train->add_option("--in", tf.in_path);
    train->add_option("--out", tf.out_path);
    train->add_option("--epochs", tf.gcn.epochs)->check(CLI::PositiveNumber);
    train->add_option("--lr", tf.gcn.learning_rate)->check(CLI::PositiveNumber);
    train->add_option("--batch-size", tf.gcn.batch_size)->check(CLI::PositiveNumber);
    train->add_option("--layers", tf.arch.layers)->check(CLI::PositiveNumber);
    train->add_option("--units", tf.arch.units)->check(CLI::PositiveNumber);
    train->add_option("--dropout", tf.arch.dropout)->check(CLI::Range(0.0, 0.99));
    train->add_flag("--normalize", tf.arch.normalize, "Symmetric adjacency normalization");
    train->add_option("--max-depth", tf.tree.max_depth)->check(CLI::PositiveNumber);
    train->add_option("--min-samples-split", tf.tree.min_samples_split)->check(CLI::PositiveNumber);
    train->add_flag("--grid", tf.grid, "Grid search before the final fit");
    add_seed(train, c);

    std::string in_path, pr_out;
    auto* eval = app.add_subcommand("eval", "Compare rules, dtree and gnn on the test split");
    eval->add_option("--in", in_path);
    eval->add_option("--out", out_path);
    eval->add_option("--pr-out", pr_out, "Write precision/recall points as CSV");
    add_format(eval, c, {"text", "json", "csv"});
    add_seed(eval, c);

    std::string model_path;
    bool apply = false;
    auto* suggest = app.add_subcommand("suggest", "Suggest a split point with a trained gnn");
    suggest->add_option("file", file)->required();
    suggest->add_option("--model", model_path, "Checkpoint or manifest holding one")->required();
    suggest->add_flag("--apply", apply, "Also print the split program");
    add_format(suggest, c, {"text", "json"});
    add_seed(suggest, c);

    int split_k = -1;
    std::string fn_name, viz_format;
    auto* viz = app.add_subcommand("viz", "Render a program as DOT or HTML");
    viz->add_option("file", file)->required();
    viz->add_option("--model", model_path, "Split where this gnn suggests");
    viz->add_option("--split", split_k, "Split after this many body statements")->check(CLI::NonNegativeNumber);
    viz->add_option("--function", fn_name, "Function to split (default: highest complexity)");
    viz->add_option("--out", out_path)->required();
    viz->add_option("--format", viz_format)->check(CLI::IsMember({"dot", "html"}));
    add_seed(viz, c);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        // pipeline stages default to the seed of the document they read
        if (build_cmd->parsed()) return cmd_corpus_build(in_dir, out_path, build, build_cmd->count("--seed") > 0, in, out, err);
        if (train->parsed()) return cmd_train(tf, c, train->count("--seed") > 0, in, out, err);
        if (eval->parsed()) return cmd_eval(in_path, out_path, pr_out, c, eval->count("--seed") > 0, in, out, err);
        err << "seed=" << c.seed << "\n";
        if (parse->parsed()) return cmd_parse(file, c, in, out);
        if (metrics->parsed()) return cmd_metrics(file, c, in, out);
        if (graph->parsed()) return cmd_graph(file, c, in, out);
        if (rules->parsed()) return cmd_rules(file, c, in, out);
        if (synth->parsed()) return cmd_synth(synth_n, out_path, c, out);
        if (suggest->parsed()) return cmd_suggest(file, model_path, apply, c, in, out);
        if (viz->parsed()) return cmd_viz(file, model_path, split_k, fn_name, out_path, viz_format, in, out);
        return kUsage;
    } catch (const LexError& e) {
        err << e.what() << "\n";
        return kParse;
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return kParse;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}

} // namespace astref::cli
