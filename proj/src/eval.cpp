#include "astref/eval.hpp"

#include "astref/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace astref {

Confusion confusion(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size()) {
        throw DataError("LengthMismatch: " + std::to_string(preds.size()) + " predictions, " +
                        std::to_string(labels.size()) + " labels");
    }
    Confusion c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int p = preds[i];
        const int y = labels[i];
        if ((p != 0 && p != 1) || (y != 0 && y != 1)) throw DataError("labels must be 0 or 1");
        if (p == 1 && y == 1) ++c.tp;
        else if (p == 1) ++c.fp;
        else if (y == 0) ++c.tn;
        else ++c.fn;
    }
    return c;
}

Scores prf1(const Confusion& c) {
    Scores s;
    if (c.total() > 0) s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (s.precision && s.recall) {
        const double sum = *s.precision + *s.recall;
        s.f1 = sum > 0 ? 2 * *s.precision * *s.recall / sum : 0.0;
    }
    return s;
}

PrCurve pr_curve(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("LengthMismatch: scores vs labels");
    const long positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0) throw DataError("NoPositives: PR curve needs a positive label");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    PrCurve curve;
    long tp = 0;
    long seen = 0;
    double prev_r = 0.0;
    double prev_p = 1.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = scores[order[i]];
        // all samples tied at t enter together
        while (i < order.size() && scores[order[i]] == t) {
            tp += labels[order[i]] == 1;
            ++seen;
            ++i;
        }
        const double r = static_cast<double>(tp) / static_cast<double>(positives);
        const double p = static_cast<double>(tp) / static_cast<double>(seen);
        curve.auc += (r - prev_r) * (p + prev_p) / 2.0;
        curve.points.push_back({t, p, r});
        prev_r = r;
        prev_p = p;
    }
    return curve;
}

double metric_drop(double pre, double post) {
    if (!(pre > 0)) throw DataError("NonPositiveBase: metric drop needs a positive baseline");
    return 100.0 * (pre - post) / pre;
}

} // namespace astref
