#pragma once

#include <optional>
#include <span>
#include <vector>

namespace astref {

struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

/// Throws DataError on length mismatch or labels outside {0,1}.
Confusion confusion(std::span<const int> preds, std::span<const int> labels);

/// Metrics whose denominator is zero are left empty rather than zeroed.
struct Scores {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

Scores prf1(const Confusion& c);

struct PrPoint {
    double threshold = 0;
    double precision = 0;
    double recall = 0;
};

struct PrCurve {
    /// One point per distinct score, thresholds descending.
    std::vector<PrPoint> points;
    double auc = 0;
};

/// Sweeps every distinct score as a threshold (score >= t predicts 1). The
/// area is the trapezoid rule over recall, starting from (recall 0, precision 1).
/// Throws DataError when no label is positive.
PrCurve pr_curve(std::span<const double> scores, std::span<const int> labels);

/// 100 * (pre - post) / pre. Throws DataError when pre <= 0.
double metric_drop(double pre, double post);

} // namespace astref
