#pragma once

#include "astref/corpus.hpp"
#include "astref/dtree.hpp"
#include "astref/eval.hpp"
#include "astref/gcn.hpp"
#include "astref/rules.hpp"

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace astref {

/// Max-per-function metrics of one program before and after a split.
struct SplitOutcome {
    int pre_cyclomatic = 0;
    int post_cyclomatic = 0;
    int pre_coupling = 0;
    int post_coupling = 0;
};

/// Splits at `split_node` (a function body statement). Throws SplitError.
SplitOutcome apply_split(const AstTree& tree, int split_node);

/// Splits where the model points, or nothing when no eligible node exists.
std::optional<SplitOutcome> apply_suggestion(const GcnModel& model, const LabeledSample& sample);

struct ModelRow {
    std::string model;
    Confusion confusion;
    Scores scores;
    std::optional<double> pr_auc;
    std::vector<PrPoint> pr_points;
    /// Means over the refactor predictions that received a split; empty when
    /// the model proposes no split location.
    std::optional<double> pre_cyclomatic, post_cyclomatic, pre_coupling, post_coupling;
    std::optional<double> complexity_drop;
    std::optional<double> coupling_drop;
    long splits_applied = 0;
};

struct ComparisonReport {
    std::uint64_t seed = 42;
    std::size_t samples = 0;
    std::size_t test = 0;
    long test_positives = 0;
    Provenance provenance;
    std::vector<ModelRow> rows;  // rules, dtree, gnn, oracle
};

/// Scores every model on the dataset's test split. The gnn row splits each
/// refactor prediction at its suggested node; the oracle row predicts the
/// labels and splits at the labeled node. Rules and the tree propose no
/// location, so their drop columns stay empty.
ComparisonReport compare(const Dataset& dataset, const DTreeModel& dtree, const GcnModel& gnn,
                         const RuleThresholds& thresholds = {});

/// Rounds to one decimal, the precision drops are reported at.
double round1(double x);

nlohmann::json report_to_json(const ComparisonReport& report);
/// model,accuracy,precision,recall,f1,complexity_drop,coupling_drop; empty cells for undefined values.
std::string report_csv(const ComparisonReport& report);
/// model,threshold,precision,recall
std::string pr_points_csv(const ComparisonReport& report);
std::string report_text(const ComparisonReport& report);

} // namespace astref
