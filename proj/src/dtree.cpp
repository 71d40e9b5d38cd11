#include "astref/dtree.hpp"

#include "astref/error.hpp"
#include "astref/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace astref {

namespace {

using Rows = std::vector<std::vector<double>>;

struct Candidate {
    int feature = -1;
    double threshold = 0;
    // score = (sum of squared class counts / size) summed over both sides;
    // kept as an exact fraction num / den so equal gains compare equal
    __int128 num = 0;
    __int128 den = 1;
};

bool better(const Candidate& a, const Candidate& b) {
    if (b.feature < 0) return true;
    return a.num * b.den > b.num * a.den;
}

class Builder {
public:
    Builder(const Rows& x, std::span<const int> y, const DTreeParams& p) : x_(x), y_(y), p_(p) {}

    int build(std::vector<std::size_t> idx, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        long pos = 0;
        for (auto i : idx) pos += y_[i];
        const long n = static_cast<long>(idx.size());
        nodes_[static_cast<std::size_t>(id)].prob = static_cast<double>(pos) / static_cast<double>(n);
        if (pos == 0 || pos == n || depth >= p_.max_depth || n < p_.min_samples_split) return id;

        const Candidate best = best_split(idx);
        if (best.feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (x_[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(i);
        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    std::vector<DTreeNode> take() { return std::move(nodes_); }

private:
    Candidate best_split(const std::vector<std::size_t>& idx) const {
        Candidate best;
        const std::size_t features = x_[idx[0]].size();
        std::vector<std::size_t> order = idx;
        long total_pos = 0;
        for (auto i : idx) total_pos += y_[i];
        const long n = static_cast<long>(idx.size());
        for (std::size_t f = 0; f < features; ++f) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
            long lp = 0;
            for (long k = 0; k + 1 < n; ++k) {
                lp += y_[order[static_cast<std::size_t>(k)]];
                const double a = x_[order[static_cast<std::size_t>(k)]][f];
                const double b = x_[order[static_cast<std::size_t>(k) + 1]][f];
                if (a == b) continue;
                const __int128 nl = k + 1;
                const __int128 nr = n - nl;
                const __int128 ln = nl - lp;
                const __int128 rp = total_pos - lp;
                const __int128 rn = nr - rp;
                Candidate c;
                c.feature = static_cast<int>(f);
                c.threshold = a + (b - a) / 2;
                c.num = (static_cast<__int128>(lp) * lp + ln * ln) * nr + (rp * rp + rn * rn) * nl;
                c.den = nl * nr;
                // thresholds ascend within a feature, features ascend: strict > keeps the lowest
                if (better(c, best)) best = c;
            }
        }
        return best;
    }

    const Rows& x_;
    std::span<const int> y_;
    DTreeParams p_;
    std::vector<DTreeNode> nodes_;
};

int depth_of(const std::vector<DTreeNode>& nodes, int id) {
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_of(nodes, n.left), depth_of(nodes, n.right));
}

} // namespace

int DTreeModel::depth() const { return nodes.empty() ? 0 : depth_of(nodes, 0); }

double gini(std::span<const int> labels) {
    if (labels.empty()) throw DataError("EmptyInput: gini of no labels");
    const double n = static_cast<double>(labels.size());
    const double p1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / n;
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

DTreeModel train_dtree(const Rows& x, std::span<const int> y, const DTreeParams& params, std::uint64_t) {
    if (x.empty()) throw DataError("EmptyDataset: no training rows");
    if (x.size() != y.size()) {
        throw DimensionMismatch("rows " + std::to_string(x.size()) + " vs labels " + std::to_string(y.size()));
    }
    const std::size_t width = x[0].size();
    for (const auto& row : x) {
        if (row.size() != width) throw DimensionMismatch("ragged feature rows");
        for (double v : row) {
            if (!std::isfinite(v)) throw DataError("non-finite feature value");
        }
    }
    if (params.max_depth < 0 || params.min_samples_split < 2) throw Error("invalid tree parameters");

    Builder b(x, y, params);
    std::vector<std::size_t> all(x.size());
    std::iota(all.begin(), all.end(), 0);
    b.build(std::move(all), 0);
    DTreeModel m;
    m.params = params;
    m.feature_count = width;
    m.nodes = b.take();
    return m;
}

double predict_dtree(const DTreeModel& model, std::span<const double> x) {
    if (x.size() != model.feature_count) {
        throw DimensionMismatch("expected " + std::to_string(model.feature_count) + " features, got " +
                                std::to_string(x.size()));
    }
    std::size_t i = 0;
    while (model.nodes[i].feature >= 0) {
        const auto& n = model.nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return model.nodes[i].prob;
}

nlohmann::json dtree_to_json(const DTreeModel& model) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : model.nodes) {
        if (n.feature < 0) {
            nodes.push_back({{"prob", n.prob}});
        } else {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"prob", n.prob}});
        }
    }
    return {{"version", "1"},
            {"model", "dtree"},
            {"params", {{"max_depth", model.params.max_depth}, {"min_samples_split", model.params.min_samples_split}}},
            {"feature_count", model.feature_count},
            {"nodes", std::move(nodes)}};
}

DTreeModel dtree_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version") != "1" || doc.at("model") != "dtree") throw SchemaError("not a version 1 dtree checkpoint");
        DTreeModel m;
        m.params.max_depth = doc.at("params").at("max_depth").get<int>();
        m.params.min_samples_split = doc.at("params").at("min_samples_split").get<int>();
        m.feature_count = doc.at("feature_count").get<std::size_t>();
        const auto& nodes = doc.at("nodes");
        if (!nodes.is_array() || nodes.empty()) throw SchemaError("$.nodes: expected a nonempty array");
        const int count = static_cast<int>(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& j = nodes[i];
            const std::string at = "$.nodes[" + std::to_string(i) + "]";
            DTreeNode n;
            n.prob = j.at("prob").get<double>();
            if (!(n.prob >= 0 && n.prob <= 1)) throw SchemaError(at + ".prob: outside [0,1]");
            if (j.contains("feature")) {
                n.feature = j.at("feature").get<int>();
                n.threshold = j.at("threshold").get<double>();
                n.left = j.at("left").get<int>();
                n.right = j.at("right").get<int>();
                // children always follow their parent, which rules out cycles
                const int self = static_cast<int>(i);
                if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= m.feature_count) {
                    throw SchemaError(at + ".feature: out of range");
                }
                if (n.left <= self || n.right <= self || n.left >= count || n.right >= count) {
                    throw SchemaError(at + ": child index out of range");
                }
            }
            m.nodes.push_back(n);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("dtree checkpoint: ") + e.what());
    }
}

std::vector<int> default_depth_grid() { return {5, 7, 9, 12, 14, 16, 18, 21, 23, 25}; }

DTreeGridResult grid_search_dtree(const Rows& x, std::span<const int> y, std::span<const int> folds,
                                  std::span<const int> depths, int min_samples_split) {
    if (depths.empty()) throw Error("empty depth grid");
    if (folds.size() != x.size()) throw DimensionMismatch("fold assignment length");
    const int k = folds.empty() ? 0 : *std::max_element(folds.begin(), folds.end()) + 1;
    DTreeGridResult out;
    double best = -1;
    for (int depth : depths) {
        double sum = 0;
        for (int f = 0; f < k; ++f) {
            Rows tx;
            std::vector<int> ty;
            std::vector<std::size_t> held;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (folds[i] == f) {
                    held.push_back(i);
                } else {
                    tx.push_back(x[i]);
                    ty.push_back(y[i]);
                }
            }
            const DTreeModel m = train_dtree(tx, ty, {depth, min_samples_split});
            std::vector<int> preds, labels;
            for (auto i : held) {
                preds.push_back(predict_dtree(m, x[i]) >= 0.5);
                labels.push_back(y[i]);
            }
            sum += prf1(confusion(preds, labels)).f1.value_or(0.0);
        }
        const double mean = k ? sum / k : 0.0;
        out.mean_f1.emplace_back(depth, mean);
        if (mean > best) {
            best = mean;
            out.best_depth = depth;
        }
    }
    return out;
}

} // namespace astref
