#pragma once

#include "astref/metrics.hpp"

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

namespace astref {

struct DTreeParams {
    int max_depth = 20;
    int min_samples_split = 5;
    bool operator==(const DTreeParams&) const = default;
};

/// Internal nodes send x[feature] <= threshold left. Leaves have feature -1.
struct DTreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    double prob = 0;  // fraction of refactor samples reaching the node
    bool operator==(const DTreeNode&) const = default;
};

struct DTreeModel {
    DTreeParams params;
    std::size_t feature_count = kFlatFeatureCount;
    std::vector<DTreeNode> nodes;  // nodes[0] is the root

    int depth() const;
    bool operator==(const DTreeModel&) const = default;
};

/// 1 - p0^2 - p1^2. Throws DataError on empty input.
double gini(std::span<const int> labels);

/// Greedy CART on Gini gain. Candidate thresholds are midpoints between
/// consecutive distinct values. Ties go to the lowest feature, then the lowest
/// threshold. A node becomes a leaf when pure, at max_depth, below
/// min_samples_split, or when all of its rows are identical. Training is
/// deterministic; `seed` is recorded for interface symmetry only.
DTreeModel train_dtree(const std::vector<std::vector<double>>& x, std::span<const int> y,
                       const DTreeParams& params = {}, std::uint64_t seed = 42);

/// Leaf probability; throws DimensionMismatch on a wrongly sized row.
double predict_dtree(const DTreeModel& model, std::span<const double> x);

nlohmann::json dtree_to_json(const DTreeModel& model);
/// Validates structure (indices in range, acyclic, probabilities in [0,1]).
DTreeModel dtree_from_json(const nlohmann::json& doc);

struct DTreeGridResult {
    int best_depth = 0;
    std::vector<std::pair<int, double>> mean_f1;  // depth -> mean fold F1
};

/// Cross-validated search over max_depth. `folds[i]` is sample i's fold.
/// Ties keep the shallower depth.
DTreeGridResult grid_search_dtree(const std::vector<std::vector<double>>& x, std::span<const int> y,
                                  std::span<const int> folds, std::span<const int> depths,
                                  int min_samples_split = 5);

/// The ten depths searched by default: 5 to 25.
std::vector<int> default_depth_grid();

} // namespace astref
