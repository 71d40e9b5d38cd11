#include "astref/report.hpp"

#include "astref/error.hpp"
#include "astref/parser.hpp"
#include "astref/split.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace astref {

using nlohmann::json;

namespace {

std::string fixed(std::optional<double> v, int digits) {
    if (!v) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
    return buf;
}

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

struct DropAccumulator {
    double pre_cc = 0, post_cc = 0, pre_cp = 0, post_cp = 0;
    long n = 0;

    void add(const SplitOutcome& o) {
        pre_cc += o.pre_cyclomatic;
        post_cc += o.post_cyclomatic;
        pre_cp += o.pre_coupling;
        post_cp += o.post_coupling;
        ++n;
    }

    void fill(ModelRow& row) const {
        row.splits_applied = n;
        if (n == 0) return;
        const double k = static_cast<double>(n);
        row.pre_cyclomatic = pre_cc / k;
        row.post_cyclomatic = post_cc / k;
        row.pre_coupling = pre_cp / k;
        row.post_coupling = post_cp / k;
        if (pre_cc > 0) row.complexity_drop = round1(metric_drop(pre_cc / k, post_cc / k));
        if (pre_cp > 0) row.coupling_drop = round1(metric_drop(pre_cp / k, post_cp / k));
    }
};

ModelRow score(std::string name, const std::vector<int>& preds, const std::vector<double>& scores,
               const std::vector<int>& labels) {
    ModelRow row;
    row.model = std::move(name);
    row.confusion = confusion(preds, labels);
    row.scores = prf1(row.confusion);
    try {
        PrCurve curve = pr_curve(scores, labels);
        row.pr_auc = curve.auc;
        row.pr_points = std::move(curve.points);
    } catch (const DataError&) {
        // no positives in the test split: the curve is undefined
    }
    return row;
}

} // namespace

double round1(double x) { return std::round(x * 10.0) / 10.0; }

SplitOutcome apply_split(const AstTree& tree, int split_node) {
    const auto [fn, k] = split_site(tree, split_node);
    const AstTree after = extract_split(tree, fn, k);
    return {max_function_cyclomatic(tree), max_function_cyclomatic(after), max_function_coupling(tree),
            max_function_coupling(after)};
}

std::optional<SplitOutcome> apply_suggestion(const GcnModel& model, const LabeledSample& sample) {
    const SplitSuggestion s = suggest_split(model, sample.graph);
    if (!s.eligible) return std::nullopt;
    return apply_split(parse_source(sample.source), s.node_id);
}

ComparisonReport compare(const Dataset& d, const DTreeModel& dtree, const GcnModel& gnn,
                         const RuleThresholds& thresholds) {
    if (d.test.empty()) throw DataError("EmptyDataset: no test split");
    ComparisonReport r;
    r.seed = d.seed;
    r.samples = d.samples.size();
    r.test = d.test.size();
    r.provenance = d.provenance;

    const std::size_t n = d.test.size();
    std::vector<int> labels(n), rule_pred(n), tree_pred(n), gnn_pred(n);
    std::vector<double> rule_score(n), tree_score(n), gnn_score(n), oracle_score(n);
    std::vector<std::optional<SplitOutcome>> gnn_split(n), oracle_split(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        try {
            const LabeledSample& s = d.samples[d.test[i]];
            const AstTree tree = parse_source(s.source);
            labels[i] = s.label;
            oracle_score[i] = s.label;
            rule_pred[i] = classify_rules(tree, {}, {}, thresholds);
            rule_score[i] = rule_pred[i];
            tree_score[i] = predict_dtree(dtree, s.flat.values);
            tree_pred[i] = tree_score[i] >= 0.5 ? 1 : 0;
            gnn_score[i] = forward(gnn, s.graph).graph_prob[0];
            gnn_pred[i] = gnn_score[i] >= 0.5 ? 1 : 0;
            if (gnn_pred[i] == 1) gnn_split[i] = apply_suggestion(gnn, s);
            if (s.label == 1 && s.split_node) oracle_split[i] = apply_split(tree, *s.split_node);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw DataError("compare: " + e);
    }
    for (int y : labels) r.test_positives += y;

    r.rows.push_back(score("rules", rule_pred, rule_score, labels));
    r.rows.push_back(score("dtree", tree_pred, tree_score, labels));
    r.rows.push_back(score("gnn", gnn_pred, gnn_score, labels));
    r.rows.push_back(score("oracle", labels, oracle_score, labels));
    DropAccumulator gnn_acc, oracle_acc;
    for (std::size_t i = 0; i < n; ++i) {
        if (gnn_split[i]) gnn_acc.add(*gnn_split[i]);
        if (oracle_split[i]) oracle_acc.add(*oracle_split[i]);
    }
    gnn_acc.fill(r.rows[2]);
    oracle_acc.fill(r.rows[3]);
    return r;
}

json report_to_json(const ComparisonReport& r) {
    json models = json::array();
    json points = json::object();
    for (const auto& row : r.rows) {
        models.push_back({{"model", row.model},
                          {"accuracy", opt(row.scores.accuracy)},
                          {"precision", opt(row.scores.precision)},
                          {"recall", opt(row.scores.recall)},
                          {"f1", opt(row.scores.f1)},
                          {"pr_auc", opt(row.pr_auc)},
                          {"complexity_drop_pct", opt(row.complexity_drop)},
                          {"coupling_drop_pct", opt(row.coupling_drop)},
                          {"mean_cyclomatic", {{"pre", opt(row.pre_cyclomatic)}, {"post", opt(row.post_cyclomatic)}}},
                          {"mean_coupling", {{"pre", opt(row.pre_coupling)}, {"post", opt(row.post_coupling)}}},
                          {"splits_applied", row.splits_applied},
                          {"confusion", {{"tp", row.confusion.tp}, {"fp", row.confusion.fp},
                                         {"tn", row.confusion.tn}, {"fn", row.confusion.fn}}}});
        json pts = json::array();
        for (const auto& p : row.pr_points) {
            pts.push_back({{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall}});
        }
        points[row.model] = std::move(pts);
    }
    const Provenance& p = r.provenance;
    return {{"version", "1"},
            {"kind", "report"},
            {"seed", r.seed},
            {"corpus", {{"samples", r.samples}, {"test", r.test}, {"test_positives", r.test_positives},
                        {"provenance", {{"ingested", p.ingested}, {"parse_failed", p.parse_failed},
                                        {"deduped", p.deduped}, {"trivial_dropped", p.trivial_dropped},
                                        {"unlabeled", p.unlabeled}, {"oversampled", p.oversampled}}}}},
            {"models", std::move(models)},
            {"pr_points", std::move(points)}};
}

std::string report_csv(const ComparisonReport& r) {
    std::ostringstream out;
    out << "model,accuracy,precision,recall,f1,complexity_drop,coupling_drop\n";
    for (const auto& row : r.rows) {
        out << row.model << ',' << fixed(row.scores.accuracy, 4) << ',' << fixed(row.scores.precision, 4) << ','
            << fixed(row.scores.recall, 4) << ',' << fixed(row.scores.f1, 4) << ',' << fixed(row.complexity_drop, 1)
            << ',' << fixed(row.coupling_drop, 1) << '\n';
    }
    return out.str();
}

std::string pr_points_csv(const ComparisonReport& r) {
    std::ostringstream out;
    out << "model,threshold,precision,recall\n";
    for (const auto& row : r.rows) {
        for (const auto& p : row.pr_points) {
            out << row.model << ',' << fixed(p.threshold, 6) << ',' << fixed(p.precision, 6) << ','
                << fixed(p.recall, 6) << '\n';
        }
    }
    return out.str();
}

std::string report_text(const ComparisonReport& r) {
    std::ostringstream out;
    out << "seed " << r.seed << ", " << r.test << " test samples (" << r.test_positives << " refactor)\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %8s %9s %7s %6s %7s %9s %9s\n", "model", "accuracy", "precision",
                  "recall", "f1", "pr_auc", "cc_drop%", "cpl_drop%");
    out << line;
    const auto cell = [](std::optional<double> v, int digits) { return v ? fixed(v, digits) : std::string("-"); };
    for (const auto& row : r.rows) {
        std::snprintf(line, sizeof line, "%-8s %8s %9s %7s %6s %7s %9s %9s\n", row.model.c_str(),
                      cell(row.scores.accuracy, 3).c_str(), cell(row.scores.precision, 3).c_str(),
                      cell(row.scores.recall, 3).c_str(), cell(row.scores.f1, 3).c_str(), cell(row.pr_auc, 3).c_str(),
                      cell(row.complexity_drop, 1).c_str(), cell(row.coupling_drop, 1).c_str());
        out << line;
    }
    return out.str();
}

} // namespace astref
