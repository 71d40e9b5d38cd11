// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "astref/corpus.hpp"
#include "astref/gcn.hpp"
#include "astref/metrics.hpp"
#include "astref/parser.hpp"
#include "astref/printer.hpp"
#include "astref/report.hpp"
#include "astref/rules.hpp"
#include "astref/runtime.hpp"
#include "astref/split.hpp"
#include "cli.hpp"
#include "support/gcn_oracle.hpp"
#include "support/interp.hpp"
#include "support/program_gen.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <unistd.h>

using namespace astref;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const AstNode& fn_named(const AstTree& t, const std::string& name) {
    for (const AstNode* n : t.preorder()) {
        if (n->kind == NodeKind::FunctionDef && n->name == name) return *n;
    }
    throw std::runtime_error("missing function " + name);
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult cli(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

// ---- 1 ----
Outcome cyclomatic_oracle() {
    const auto t0 = Clock::now();
    Rng rng(1976);
    support::GenOptions opt;
    opt.max_depth = 4;
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const AstTree t = support::random_program(rng, opt);
        const AstNode& fn = fn_named(t, "f");
        if (cyclomatic(fn) != cyclomatic_cfg_oracle(fn)) ++mismatches;
    }
    const double s = seconds_since(t0);
    return {mismatches == 0 && s < 5.0, fmt("1000 functions, %d mismatches, %.2fs (limit 5s)", mismatches, s)};
}

// ---- 2 ----
Outcome gradient_check() {
    const auto t0 = Clock::now();
    Rng rng(8);
    double worst = 0;
    int graphs = 0;
    for (int trial = 0; trial < 24; ++trial) {
        CodeGraph g = support::random_graph(rng, 2 + static_cast<int>(rng.below(7)));  // 2..8 nodes
        g.label = static_cast<int>(rng.below(2));
        const auto elig = eligible_split_nodes(g);
        if (g.label == 1 && !elig.empty()) g.split_node = elig[rng.below(elig.size())];
        GcnConfig c;
        c.layers = 3;
        c.units = 5;
        c.dropout = 0;
        GcnModel m = GcnModel::init(c, 200 + static_cast<std::uint64_t>(trial));
        // keep units off the ReLU kink, where finite differences are one-sided
        for (auto& b : m.biases)
            for (double& v : b) v = rng.uniform(-0.2, 0.2);
        worst = std::max(worst, support::max_gradient_error(m, make_batch(g), false, 0));
        ++graphs;
    }
    const double s = seconds_since(t0);
    return {graphs >= 20 && worst <= 1e-4 && s < 30.0,
            fmt("%d graphs, max relative error %.2e (limit 1e-4), %.2fs (limit 30s)", graphs, worst, s)};
}

// ---- 3 ----
Outcome layer_oracle() {
    Rng rng(2);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const CodeGraph g = support::random_graph(rng, 2 + static_cast<int>(rng.below(10)));
        const GraphBatch b = make_batch(g);
        Matrix w(kNodeFeatureCount, 7);
        for (double& v : w.data) v = rng.uniform(-1, 1);
        std::vector<double> bias(7);
        for (double& v : bias) v = rng.uniform(-1, 1);
        const Matrix got = gcn_layer_forward(b.features, b.adjacency, w, bias);
        const auto want = support::oracle_layer(g, support::features_of(g), w, bias);
        for (std::size_t i = 0; i < got.rows; ++i)
            for (std::size_t j = 0; j < got.cols; ++j) worst = std::max(worst, std::abs(got(i, j) - want[i][j]));
    }
    return {worst <= 1e-12, fmt("10 cases, max abs error %.2e (limit 1e-12)", worst)};
}

// ---- 4 ----
Outcome permutation() {
    Rng rng(6);
    GcnConfig c;
    c.layers = 4;
    c.units = 16;
    c.dropout = 0;
    const GcnModel m = GcnModel::init(c, 7);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const CodeGraph g = support::random_graph(rng, 2 + static_cast<int>(rng.below(12)));
        std::vector<int> perm(g.nodes.size());
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<int>(perm));
        const auto a = forward(m, g);
        const auto b = forward(m, support::permuted(g, perm));
        worst = std::max(worst, std::abs(a.graph_prob[0] - b.graph_prob[0]));
        for (std::size_t v = 0; v < g.nodes.size(); ++v) {
            worst = std::max(worst, std::abs(a.node_scores[v] - b.node_scores[static_cast<std::size_t>(perm[v])]));
        }
    }
    return {worst <= 1e-12, fmt("50 graphs, max deviation %.2e (limit 1e-12)", worst)};
}

// ---- 5, 6, 8: the seeded pipeline ----
struct PipelineRun {
    bool ok = false;
    std::string failure;
    std::string manifest;  // after both trainings
    std::string built;     // before training
    std::string report;
    double seconds = 0;
};

PipelineRun run_pipeline() {
    PipelineRun r;
    const auto t0 = Clock::now();
    const CliResult synth = cli({"synth", "--n", "2000", "--seed", "42"});
    if (synth.code != 0) return r.failure = "synth: " + synth.err, r;
    const CliResult built = cli({"corpus", "build", "--seed", "42"}, synth.out);
    if (built.code != 0) return r.failure = "corpus build: " + built.err, r;
    const CliResult tree =
        cli({"train", "--model", "dtree", "--max-depth", "20", "--min-samples-split", "5", "--seed", "42"}, built.out);
    if (tree.code != 0) return r.failure = "train dtree: " + tree.err, r;
    const CliResult gnn = cli({"train", "--model", "gnn", "--epochs", "75", "--lr", "0.0005", "--batch-size", "128",
                               "--seed", "42"},
                              tree.out);
    if (gnn.code != 0) return r.failure = "train gnn: " + gnn.err, r;
    const CliResult eval = cli({"eval", "--format", "json"}, gnn.out);
    if (eval.code != 0) return r.failure = "eval: " + eval.err, r;
    r.seconds = seconds_since(t0);
    r.ok = true;
    r.built = built.out;
    r.manifest = gnn.out;
    r.report = eval.out;
    return r;
}

double f1_of(const nlohmann::json& report, const std::string& model) {
    for (const auto& row : report.at("models")) {
        if (row.at("model") == model) return row.at("f1").is_null() ? 0.0 : row.at("f1").get<double>();
    }
    throw std::runtime_error("no row for " + model);
}

Outcome headline(const PipelineRun& run) {
    if (!run.ok) return {false, run.failure};
    const auto report = nlohmann::json::parse(run.report);
    const double gnn = f1_of(report, "gnn"), tree = f1_of(report, "dtree"), rules = f1_of(report, "rules");
    const bool pass = gnn >= 0.85 && rules <= 0.80 && gnn > tree && tree > rules && run.seconds < 600;
    return {pass, fmt("F1 gnn %.4f (>= 0.85), dtree %.4f, rules %.4f (<= 0.80), ordering %s, %.1fs (limit 600s)", gnn,
                      tree, rules, gnn > tree && tree > rules ? "gnn > dtree > rules" : "violated", run.seconds)};
}

Outcome complexity_drop(const PipelineRun& run) {
    const double hand = round1(metric_drop(12, 8));
    const bool hand_ok = std::abs(hand - 33.3) <= 0.05;
    if (!run.ok) return {false, run.failure};
    const auto doc = nlohmann::json::parse(run.manifest);
    const Dataset d = dataset_from_json(doc);
    const GcnModel gnn = gcn_from_json(doc.at("models").at("gnn"));
    double pre = 0, post = 0;
    long n = 0;
    for (std::size_t i : d.test) {
        const LabeledSample& s = d.samples[i];
        if (s.label != 1 || forward(gnn, s.graph).graph_prob[0] < 0.5) continue;
        const auto split = apply_suggestion(gnn, s);
        if (!split || split->pre_cyclomatic < 12) continue;
        pre += split->pre_cyclomatic;
        post += split->post_cyclomatic;
        ++n;
    }
    if (n == 0) return {false, "no true positive with CC >= 12 received a split"};
    const double drop = metric_drop(pre / static_cast<double>(n), post / static_cast<double>(n));
    return {hand_ok && drop >= 25.0,
            fmt("%ld true positives, mean max CC %.2f -> %.2f, drop %.1f%% (>= 25%%); metric_drop(12,8) = %.1f", n,
                pre / static_cast<double>(n), post / static_cast<double>(n), drop, hand)};
}

Outcome determinism(const PipelineRun& first) {
    if (!first.ok) return {false, first.failure};
    const PipelineRun second = run_pipeline();
    if (!second.ok) return {false, second.failure};
    const auto a = nlohmann::json::parse(first.manifest), b = nlohmann::json::parse(second.manifest);
    const bool built = first.built == second.built;
    const bool gnn = a.at("models").at("gnn").dump() == b.at("models").at("gnn").dump();
    const bool tree = a.at("models").at("dtree").dump() == b.at("models").at("dtree").dump();
    const bool manifest = first.manifest == second.manifest;
    const bool report = first.report == second.report;
    return {built && gnn && tree && manifest && report,
            fmt("dataset %s, dtree checkpoint %s, gnn checkpoint %s, final manifest %s, report %s",
                built ? "identical" : "DIFFERS", tree ? "identical" : "DIFFERS", gnn ? "identical" : "DIFFERS",
                manifest ? "identical" : "DIFFERS", report ? "identical" : "DIFFERS")};
}

// ---- 7 ----
Outcome behavior_preservation() {
    Rng rng(7007);
    support::GenOptions opt;
    opt.mid_returns = false;
    opt.min_body = 3;
    int splits = 0, divergences = 0, inputs = 0;
    while (splits < 200) {
        const AstTree t = support::random_program(rng, opt);
        const AstNode& fn = fn_named(t, "f");
        const std::size_t k = 1 + rng.below(fn.children.size() - 1);
        const AstTree s = extract_split(t, fn.id, k);
        ++splits;
        support::Interpreter a(t), b(s);
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<std::int64_t> args = {rng.range(-5, 12), rng.range(-5, 12)};
            ++inputs;
            if (!(a.run("f", args) == b.run("f", args))) ++divergences;
        }
    }
    return {divergences == 0, fmt("%d splits x 100 inputs (%d runs), %d divergences", splits, inputs, divergences)};
}

// ---- 9 ----
std::string function_src(const std::string& name, int lines, int cc) {
    std::string s = "def " + name + "(x):\n";
    std::string pad = "    ";
    for (int i = 0; i < cc - 1; ++i) {
        s += pad + "if x > " + std::to_string(i) + ":\n";
        pad += "    ";
    }
    s += pad + "x = x - 1\n";
    for (int used = cc + 1; used < lines - 1; ++used) s += "    x = x + 1\n";
    s += "    return x\n";
    return s;
}

std::string imports_src(int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += "import m" + std::to_string(i) + "\n";
    for (int i = 0; i < n; ++i) s += "m" + std::to_string(i) + ".run(1)\n";
    return s;
}

Outcome rule_thresholds() {
    const auto at = analyze_rules(parse_source(imports_src(5) + function_src("f", 20, 10)));
    const auto cc = analyze_rules(parse_source(imports_src(5) + function_src("f", 20, 11)));
    const auto len = analyze_rules(parse_source(imports_src(5) + function_src("f", 21, 10)));
    const auto dep = analyze_rules(parse_source(imports_src(6) + function_src("f", 20, 10)));
    const auto all = analyze_rules(parse_source(imports_src(6) + function_src("f", 21, 11)));
    const bool pass = at.empty() && cc.size() == 1 && cc[0].rule == Rule::HighComplexity && len.size() == 1 &&
                      len[0].rule == Rule::LongMethod && dep.size() == 1 && dep[0].rule == Rule::HighCoupling &&
                      all.size() == 3;
    return {pass, fmt("findings at thresholds %zu; +1 complexity %zu, +1 lines %zu, +1 coupling %zu, all three %zu",
                      at.size(), cc.size(), len.size(), dep.size(), all.size())};
}

// ---- 10 ----
Outcome pr_auc() {
    const PrCurve hand = pr_curve(std::vector<double>{0.9, 0.8, 0.3}, std::vector<int>{1, 0, 1});
    const double want = 0.5 + 0.5 * (0.5 + 2.0 / 3.0) / 2.0;
    const double perfect = pr_curve(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}).auc;
    const double err = std::abs(hand.auc - want);
    return {err <= 1e-12 && perfect == 1.0,
            fmt("hand example %.15f vs %.15f (error %.1e), perfect separation %.15f", hand.auc, want, err, perfect)};
}

// ---- 11 ----
Outcome bookkeeping() {
    const fs::path dir = fs::temp_directory_path() / ("astref_accept_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    // 100 files: 80 distinct programs, 15 duplicates (one in three reformatted
    // with trailing blanks), 5 that do not parse
    const auto programs = synth_programs(80, 11);
    nlohmann::json labels = nlohmann::json::object();
    auto put = [&](const std::string& rel, const std::string& text, int label) {
        std::ofstream(dir / rel) << text;
        labels[rel] = {{"label", label}};
    };
    for (int i = 0; i < 80; ++i) put(fmt("p%03d.mpy", i), programs[i].source, programs[i].label.label);
    for (int i = 0; i < 15; ++i) {
        const auto& p = programs[static_cast<std::size_t>(i * 5)];
        put(fmt("q%03d.mpy", i), i % 3 == 0 ? p.source + "\n\n" : p.source, p.label.label);
    }
    const char* broken[] = {"def f(:\n    x = 1\n", "if x\n", "def g(a):\nreturn a\n", "x = (1 +\n", "def h(a):\n    y = = a\n"};
    for (int i = 0; i < 5; ++i) put(fmt("r%03d.mpy", i), broken[i], 0);
    std::ofstream(dir / "labels.json") << labels.dump();

    const CliResult r = cli({"corpus", "build", "--in", dir.string()});
    fs::remove_all(dir);
    if (r.code != 0) return {false, "corpus build exited " + std::to_string(r.code) + ": " + r.err};
    const auto p = nlohmann::json::parse(r.out).at("provenance");
    const long ingested = p.at("ingested"), failed = p.at("parse_failed"), deduped = p.at("deduped");
    const long trivial = p.at("trivial_dropped"), unlabeled = p.at("unlabeled");
    const bool pass = ingested == 100 && failed == 5 && deduped == 15 && trivial == 0 && unlabeled == 0;
    return {pass, fmt("ingested %ld (100), deduped %ld (15), parse_failed %ld (5), trivial %ld (0), unlabeled %ld (0)",
                      ingested, deduped, failed, trivial, unlabeled)};
}

} // namespace

int main() {
    tune_allocator();
    int failed = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2d %-26s %s  %s [%.1fs]\n", id, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    };

    report(1, "cyclomatic-oracle", cyclomatic_oracle);
    report(2, "gradient-check", gradient_check);
    report(3, "layer-oracle", layer_oracle);
    report(4, "permutation-equivariance", permutation);
    PipelineRun run;
    report(5, "headline-ordering", [&] {
        run = run_pipeline();
        return headline(run);
    });
    report(6, "complexity-drop", [&] { return complexity_drop(run); });
    report(7, "behavior-preservation", behavior_preservation);
    report(8, "determinism", [&] { return determinism(run); });
    report(9, "rule-thresholds", rule_thresholds);
    report(10, "pr-auc", pr_auc);
    report(11, "pipeline-bookkeeping", bookkeeping);
    std::printf("%d of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
