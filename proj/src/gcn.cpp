#include "astref/gcn.hpp"

#include "astref/error.hpp"
#include "astref/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace astref {

namespace {

constexpr double kClamp = 1e-12;

// -(y ln s(z) + (1-y) ln(1-s(z))) evaluated from the logit without saturating.
double bce_logit(double z, int y) {
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - y * z;
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::size_t layer_input(const GcnConfig& c, int l) {
    return l == 0 ? kNodeFeatureCount : static_cast<std::size_t>(c.units);
}

void check_config(const GcnConfig& c) {
    if (c.layers < 1 || c.units < 1 || !(c.dropout >= 0 && c.dropout < 1)) {
        throw Error("invalid GCN configuration");
    }
}

void check_model(const GcnModel& m) {
    const auto& c = m.config;
    const auto units = static_cast<std::size_t>(c.units);
    bool ok = m.weights.size() == static_cast<std::size_t>(c.layers) && m.biases.size() == m.weights.size() &&
              m.graph_w.size() == units && m.node_w.size() == units && m.mean.size() == kNodeFeatureCount &&
              m.scale.size() == kNodeFeatureCount;
    for (int l = 0; ok && l < c.layers; ++l) {
        const auto& w = m.weights[static_cast<std::size_t>(l)];
        ok = w.rows == layer_input(c, l) && w.cols == units && w.data.size() == w.rows * w.cols &&
             m.biases[static_cast<std::size_t>(l)].size() == units;
    }
    if (!ok) throw DimensionMismatch("GCN parameter shapes do not match the configuration");
}

Matrix standardized(const GcnModel& m, const Matrix& x) {
    if (x.cols != kNodeFeatureCount) {
        throw DimensionMismatch("node features have " + std::to_string(x.cols) + " columns, expected 12");
    }
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows; ++r) {
        for (std::size_t c = 0; c < out.cols; ++c) out(r, c) = (out(r, c) - m.mean[c]) / m.scale[c];
    }
    return out;
}

void add_bias(Matrix& y, std::span<const double> b) {
    for (std::size_t r = 0; r < y.rows; ++r) {
        auto row = y.row(r);
        for (std::size_t c = 0; c < y.cols; ++c) row[c] += b[c];
    }
}

// Everything the backward pass needs from one forward pass.
struct Trace {
    std::vector<Matrix> h;     // h[0] standardized input, h[l+1] layer l output
    std::vector<Matrix> z;     // A h[l]
    std::vector<Matrix> y;     // z W + b
    std::vector<Matrix> mask;  // empty when no dropout was applied at layer l
    std::vector<std::vector<double>> pooled;
    std::vector<double> graph_logit;
    std::vector<double> node_logit;
};

Trace run_forward(const GcnModel& model, const GraphBatch& batch, bool training, Rng* rng) {
    check_model(model);
    if (training && model.config.dropout > 0 && rng == nullptr) throw Error("dropout needs a generator");
    const auto& cfg = model.config;
    const std::size_t units = static_cast<std::size_t>(cfg.units);
    Trace t;
    t.h.push_back(standardized(model, batch.features));
    for (int l = 0; l < cfg.layers; ++l) {
        const auto li = static_cast<std::size_t>(l);
        Matrix z, y;
        parallel::spmm(batch.adjacency, t.h[li], z);
        parallel::gemm(z, model.weights[li], y);
        add_bias(y, model.biases[li]);
        Matrix out = y;
        for (double& v : out.data) v = v > 0 ? v : 0.0;
        Matrix mask;
        if (training && cfg.dropout > 0 && l + 1 < cfg.layers) {
            mask = Matrix(out.rows, out.cols);
            const double keep = 1.0 / (1.0 - cfg.dropout);
            for (std::size_t i = 0; i < mask.data.size(); ++i) {
                mask.data[i] = rng->uniform() < cfg.dropout ? 0.0 : keep;
                out.data[i] *= mask.data[i];
            }
        }
        t.z.push_back(std::move(z));
        t.y.push_back(std::move(y));
        t.mask.push_back(std::move(mask));
        t.h.push_back(std::move(out));
    }
    const Matrix& e = t.h.back();
    const std::size_t graphs = batch.graph_count();
    t.pooled.assign(graphs, std::vector<double>(units, 0.0));
    t.graph_logit.assign(graphs, 0.0);
    for (std::size_t g = 0; g < graphs; ++g) {
        const std::size_t lo = batch.offsets[g];
        const std::size_t hi = batch.offsets[g + 1];
        auto& p = t.pooled[g];
        for (std::size_t v = lo; v < hi; ++v) {
            const auto row = e.row(v);
            for (std::size_t c = 0; c < units; ++c) p[c] += row[c];
        }
        const double inv = hi > lo ? 1.0 / static_cast<double>(hi - lo) : 0.0;
        double logit = model.graph_b;
        for (std::size_t c = 0; c < units; ++c) {
            p[c] *= inv;
            logit += p[c] * model.graph_w[c];
        }
        t.graph_logit[g] = logit;
    }
    t.node_logit.assign(e.rows, 0.0);
    for (std::size_t v = 0; v < e.rows; ++v) {
        const auto row = e.row(v);
        double s = model.node_b;
        for (std::size_t c = 0; c < units; ++c) s += row[c] * model.node_w[c];
        t.node_logit[v] = s;
    }
    return t;
}

std::vector<std::vector<int>> children_lists(const CodeGraph& g) {
    std::vector<std::vector<int>> kids(g.nodes.size());
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::Parent) kids[static_cast<std::size_t>(e.src)].push_back(e.dst);
    }
    for (auto& k : kids) std::sort(k.begin(), k.end());
    return kids;
}

} // namespace

GcnModel GcnModel::zeros(const GcnConfig& config) {
    check_config(config);
    GcnModel m;
    m.config = config;
    const auto units = static_cast<std::size_t>(config.units);
    for (int l = 0; l < config.layers; ++l) {
        m.weights.emplace_back(layer_input(config, l), units);
        m.biases.emplace_back(units, 0.0);
    }
    m.graph_w.assign(units, 0.0);
    m.node_w.assign(units, 0.0);
    return m;
}

GcnModel GcnModel::init(const GcnConfig& config, std::uint64_t seed) {
    GcnModel m = zeros(config);
    Rng rng(seed);
    auto glorot = [&](std::span<double> w, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : w) v = rng.uniform(-limit, limit);
    };
    for (auto& w : m.weights) glorot(w.data, w.rows, w.cols);
    glorot(m.graph_w, m.graph_w.size(), 1);
    glorot(m.node_w, m.node_w.size(), 1);
    return m;
}

std::vector<std::span<double>> GcnModel::parameters() {
    std::vector<std::span<double>> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.emplace_back(weights[l].data);
        out.emplace_back(biases[l]);
    }
    out.emplace_back(graph_w);
    out.emplace_back(&graph_b, 1);
    out.emplace_back(node_w);
    out.emplace_back(&node_b, 1);
    return out;
}

std::size_t GcnModel::parameter_count() const {
    std::size_t n = graph_w.size() + node_w.size() + 2;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].data.size() + biases[l].size();
    return n;
}

GraphBatch make_batch(std::span<const CodeGraph* const> graphs, bool normalize) {
    GraphBatch b;
    b.offsets.push_back(0);
    std::size_t total = 0;
    for (const CodeGraph* g : graphs) total += g->nodes.size();
    b.features = Matrix(total, kNodeFeatureCount);
    std::vector<std::vector<std::pair<int, double>>> rows(total);

    for (const CodeGraph* g : graphs) {
        const std::size_t base = b.offsets.back();
        const std::size_t n = g->nodes.size();
        for (std::size_t v = 0; v < n; ++v) {
            if (g->nodes[v].id != static_cast<int>(v)) throw SchemaError("graph node ids must be dense");
            std::copy(g->nodes[v].features.begin(), g->nodes[v].features.end(), b.features.row(base + v).begin());
            rows[base + v].emplace_back(static_cast<int>(base + v), 1.0);
        }
        for (const auto& e : g->edges) {
            if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n || static_cast<std::size_t>(e.dst) >= n) {
                throw SchemaError("edge endpoint outside the graph");
            }
            const double w = e.features[ef::kStrength];
            const auto s = base + static_cast<std::size_t>(e.src);
            const auto d = base + static_cast<std::size_t>(e.dst);
            rows[d].emplace_back(static_cast<int>(s), w);
            rows[s].emplace_back(static_cast<int>(d), w);
        }
        b.offsets.push_back(base + n);
        b.labels.push_back(g->label ? *g->label : -1);
        b.eligible.push_back(eligible_split_nodes(*g));
        b.split.push_back(g->split_node ? *g->split_node : -1);
    }

    std::vector<double> degree(total, 0.0);
    if (normalize) {
        for (std::size_t v = 0; v < total; ++v) {
            for (const auto& [u, w] : rows[v]) degree[v] += w;
        }
    }
    b.adjacency.rows = b.adjacency.cols = total;
    for (std::size_t v = 0; v < total; ++v) {
        for (const auto& [u, w] : rows[v]) {
            b.adjacency.indices.push_back(u);
            b.adjacency.values.push_back(
                normalize ? w / std::sqrt(degree[v] * degree[static_cast<std::size_t>(u)]) : w);
        }
        b.adjacency.offsets.push_back(b.adjacency.indices.size());
    }
    return b;
}

GraphBatch make_batch(const CodeGraph& graph, bool normalize) {
    const CodeGraph* one[] = {&graph};
    return make_batch(one, normalize);
}

Matrix gcn_layer_forward(const Matrix& h, const Csr& adjacency, const Matrix& w, std::span<const double> b) {
    if (b.size() != w.cols) throw DimensionMismatch("bias length vs weight columns");
    Matrix z, y;
    parallel::spmm(adjacency, h, z);
    parallel::gemm(z, w, y);
    add_bias(y, b);
    for (double& v : y.data) v = v > 0 ? v : 0.0;
    return y;
}

ForwardResult forward(const GcnModel& model, const GraphBatch& batch, bool training, Rng* rng) {
    const Trace t = run_forward(model, batch, training, rng);
    ForwardResult r;
    // reported probabilities stay inside (0, 1) even when the logit saturates
    for (double l : t.graph_logit) r.graph_prob.push_back(std::clamp(sigmoid(l), kClamp, 1.0 - kClamp));
    for (double l : t.node_logit) r.node_scores.push_back(std::clamp(sigmoid(l), kClamp, 1.0 - kClamp));
    return r;
}

ForwardResult forward(const GcnModel& model, const CodeGraph& graph) {
    return forward(model, make_batch(graph, model.config.normalize));
}

double loss_bce(double p, int y) {
    p = std::clamp(p, kClamp, 1.0 - kClamp);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

std::vector<int> eligible_split_nodes(const CodeGraph& graph) {
    const auto kids = children_lists(graph);
    std::vector<int> out;
    for (const auto& node : graph.nodes) {
        if (node.kind != NodeKind::FunctionDef) continue;
        const auto& body = kids[static_cast<std::size_t>(node.id)];
        if (body.empty()) continue;
        // preorder ids: the head statements own the id range [body[0], body[i])
        for (std::size_t i = 1; i < body.size(); ++i) {
            bool ret = false;
            for (int v = body[i - 1]; v < body[i] && !ret; ++v) {
                ret = graph.nodes[static_cast<std::size_t>(v)].kind == NodeKind::Return;
            }
            if (ret) break;
            out.push_back(body[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

LossAndGrad loss_and_gradient(const GcnModel& model, const GraphBatch& batch, bool training, Rng* rng) {
    const Trace t = run_forward(model, batch, training, rng);
    const auto& cfg = model.config;
    const std::size_t units = static_cast<std::size_t>(cfg.units);
    const std::size_t graphs = batch.graph_count();
    LossAndGrad out{0.0, GcnModel::zeros(cfg), {}};
    out.grad.mean = model.mean;
    out.grad.scale = model.scale;
    for (double l : t.graph_logit) out.graph_prob.push_back(sigmoid(l));

    std::size_t labeled = 0;
    for (int y : batch.labels) labeled += y >= 0;
    if (labeled == 0) return out;
    const double inv_b = 1.0 / static_cast<double>(labeled);

    const Matrix& e = t.h.back();
    Matrix de(e.rows, e.cols);
    for (std::size_t g = 0; g < graphs; ++g) {
        const int y = batch.labels[g];
        if (y < 0) continue;
        const double p = sigmoid(t.graph_logit[g]);
        out.loss += bce_logit(t.graph_logit[g], y) * inv_b;
        const double dlogit = (p - y) * inv_b;
        out.grad.graph_b += dlogit;
        for (std::size_t c = 0; c < units; ++c) out.grad.graph_w[c] += dlogit * t.pooled[g][c];
        const std::size_t lo = batch.offsets[g];
        const std::size_t hi = batch.offsets[g + 1];
        const double share = dlogit / static_cast<double>(hi - lo);
        for (std::size_t v = lo; v < hi; ++v) {
            auto row = de.row(v);
            for (std::size_t c = 0; c < units; ++c) row[c] += share * model.graph_w[c];
        }

        const auto& elig = batch.eligible[g];
        if (batch.split[g] < 0 || elig.empty()) continue;
        const double inv_n = inv_b / static_cast<double>(elig.size());
        for (int local : elig) {
            const std::size_t v = lo + static_cast<std::size_t>(local);
            const int target = local == batch.split[g] ? 1 : 0;
            const double s = sigmoid(t.node_logit[v]);
            out.loss += bce_logit(t.node_logit[v], target) * inv_n;
            const double ds = (s - target) * inv_n;
            out.grad.node_b += ds;
            auto erow = e.row(v);
            auto drow = de.row(v);
            for (std::size_t c = 0; c < units; ++c) {
                out.grad.node_w[c] += ds * erow[c];
                drow[c] += ds * model.node_w[c];
            }
        }
    }

    const Csr at = batch.adjacency.transpose();
    Matrix dh = std::move(de);
    for (int l = cfg.layers - 1; l >= 0; --l) {
        const auto li = static_cast<std::size_t>(l);
        Matrix dy = std::move(dh);
        const Matrix& mask = t.mask[li];
        const Matrix& y = t.y[li];
        for (std::size_t i = 0; i < dy.data.size(); ++i) {
            if (!mask.data.empty()) dy.data[i] *= mask.data[i];
            if (!(y.data[i] > 0)) dy.data[i] = 0.0;
        }
        parallel::gemm_tn(t.z[li], dy, out.grad.weights[li]);
        auto& db = out.grad.biases[li];
        for (std::size_t r = 0; r < dy.rows; ++r) {
            const auto row = dy.row(r);
            for (std::size_t c = 0; c < dy.cols; ++c) db[c] += row[c];
        }
        if (l == 0) break;
        Matrix dz;
        parallel::gemm_nt(dy, model.weights[li], dz);
        parallel::spmm(at, dz, dh);
    }
    return out;
}

namespace {

void fit_standardization(GcnModel& m, std::span<const CodeGraph> train) {
    std::vector<double> sum(kNodeFeatureCount, 0.0), sq(kNodeFeatureCount, 0.0);
    double n = 0;
    for (const auto& g : train) {
        for (const auto& node : g.nodes) {
            for (std::size_t c = 0; c < kNodeFeatureCount; ++c) sum[c] += node.features[c];
            n += 1;
        }
    }
    if (n == 0) return;
    for (std::size_t c = 0; c < kNodeFeatureCount; ++c) m.mean[c] = sum[c] / n;
    for (const auto& g : train) {
        for (const auto& node : g.nodes) {
            for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
                const double d = node.features[c] - m.mean[c];
                sq[c] += d * d;
            }
        }
    }
    for (std::size_t c = 0; c < kNodeFeatureCount; ++c) {
        const double sd = std::sqrt(sq[c] / n);
        m.scale[c] = sd > 1e-12 ? sd : 1.0;
    }
}

double accuracy_of(const GcnModel& model, std::span<const CodeGraph> graphs, std::size_t chunk) {
    std::size_t correct = 0, total = 0;
    for (std::size_t i = 0; i < graphs.size(); i += chunk) {
        std::vector<const CodeGraph*> ptrs;
        for (std::size_t j = i; j < std::min(graphs.size(), i + chunk); ++j) ptrs.push_back(&graphs[j]);
        const auto r = forward(model, make_batch(ptrs, model.config.normalize));
        for (std::size_t j = 0; j < ptrs.size(); ++j) {
            if (!ptrs[j]->label) continue;
            correct += (r.graph_prob[j] >= 0.5 ? 1 : 0) == *ptrs[j]->label;
            ++total;
        }
    }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

} // namespace

TrainResult train_gcn(GcnModel model, std::span<const CodeGraph> train, std::span<const CodeGraph> val,
                      const TrainConfig& config) {
    if (train.empty()) throw DataError("EmptyDataset: no training graphs");
    if (!(config.learning_rate > 0) || config.epochs < 1 || config.batch_size < 1) {
        throw Error("invalid training configuration");
    }
    check_model(model);
    fit_standardization(model, train);

    GcnModel m1 = GcnModel::zeros(model.config);
    GcnModel m2 = GcnModel::zeros(model.config);
    auto params = model.parameters();
    auto first = m1.parameters();
    auto second = m2.parameters();

    Rng order_rng(config.seed);
    Rng dropout_rng = order_rng.fork(1);
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    long step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        order_rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0;
        std::size_t correct = 0, seen = 0;
        for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(config.batch_size)) {
            std::vector<const CodeGraph*> ptrs;
            for (std::size_t j = i; j < std::min(order.size(), i + static_cast<std::size_t>(config.batch_size)); ++j) {
                ptrs.push_back(&train[order[j]]);
            }
            const GraphBatch batch = make_batch(ptrs, model.config.normalize);
            LossAndGrad lg = loss_and_gradient(model, batch, true, &dropout_rng);

            std::size_t labeled = 0;
            for (int y : batch.labels) labeled += y >= 0;
            loss_sum += lg.loss * static_cast<double>(labeled);
            seen += labeled;
            // accuracy of the training pass itself, dropout included
            for (std::size_t g = 0; g < ptrs.size(); ++g) {
                if (batch.labels[g] >= 0) correct += (lg.graph_prob[g] >= 0.5 ? 1 : 0) == batch.labels[g];
            }

            ++step;
            const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
            auto grads = lg.grad.parameters();
            for (std::size_t p = 0; p < params.size(); ++p) {
                for (std::size_t k = 0; k < params[p].size(); ++k) {
                    const double g = grads[p][k];
                    first[p][k] = config.beta1 * first[p][k] + (1 - config.beta1) * g;
                    second[p][k] = config.beta2 * second[p][k] + (1 - config.beta2) * g * g;
                    const double mh = first[p][k] / c1;
                    const double vh = second[p][k] / c2;
                    params[p][k] -= config.learning_rate * mh / (std::sqrt(vh) + config.eps);
                }
            }
        }
        EpochStats s;
        s.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
        s.train_acc = seen ? static_cast<double>(correct) / static_cast<double>(seen) : 0.0;
        if (!val.empty()) s.val_acc = accuracy_of(model, val, 256);
        result.history.push_back(s);
    }
    result.model = std::move(model);
    return result;
}

SplitSuggestion suggest_split(const GcnModel& model, const CodeGraph& graph) {
    SplitSuggestion s;
    const auto elig = eligible_split_nodes(graph);
    if (elig.empty()) return s;
    const auto r = forward(model, graph);
    s.eligible = true;
    s.node_id = elig[0];
    s.score = r.node_scores[static_cast<std::size_t>(elig[0])];
    for (int v : elig) {
        const double sc = r.node_scores[static_cast<std::size_t>(v)];
        if (sc > s.score) {
            s.score = sc;
            s.node_id = v;
        }
    }
    return s;
}

std::vector<GridPoint> default_gcn_grid() {
    std::vector<GridPoint> grid;
    for (int layers : {2, 4, 6}) {
        for (int units : {64, 128, 256}) {
            for (double rate : {1e-4, 5e-4, 1e-3}) {
                GridPoint p;
                p.config.layers = layers;
                p.config.units = units;
                p.learning_rate = rate;
                grid.push_back(p);
            }
        }
    }
    return grid;
}

GridResult grid_search_gcn(std::span<const CodeGraph> train, std::span<const CodeGraph> val,
                           std::span<const GridPoint> grid, const TrainConfig& base) {
    if (grid.empty()) throw Error("empty GCN grid");
    GridResult out;
    std::vector<int> labels;
    for (const auto& g : val) labels.push_back(g.label.value_or(0));
    for (const GridPoint& point : grid) {
        TrainConfig tc = base;
        tc.learning_rate = point.learning_rate;
        const auto trained = train_gcn(GcnModel::init(point.config, base.seed), train, {}, tc);
        std::vector<double> scores;
        for (const auto& g : val) scores.push_back(forward(trained.model, g).graph_prob[0]);
        GridPoint scored = point;
        scored.val_auc = pr_curve(scores, labels).auc;
        out.table.push_back(scored);
    }
    auto key = [](const GridPoint& p) { return std::make_tuple(p.config.layers, p.config.units, p.learning_rate); };
    out.best = out.table[0];
    for (const auto& p : out.table) {
        if (p.val_auc > out.best.val_auc || (p.val_auc == out.best.val_auc && key(p) < key(out.best))) out.best = p;
    }
    return out;
}

nlohmann::json gcn_to_json(const GcnModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        layers.push_back({{"rows", model.weights[l].rows},
                          {"cols", model.weights[l].cols},
                          {"weights", model.weights[l].data},
                          {"bias", model.biases[l]}});
    }
    const auto& c = model.config;
    return {{"version", "1"},
            {"model", "gcn"},
            {"config", {{"layers", c.layers}, {"units", c.units}, {"dropout", c.dropout}, {"normalize", c.normalize}}},
            {"standardization", {{"mean", model.mean}, {"scale", model.scale}}},
            {"layers", std::move(layers)},
            {"graph_head", {{"w", model.graph_w}, {"b", model.graph_b}}},
            {"node_head", {{"w", model.node_w}, {"b", model.node_b}}}};
}

GcnModel gcn_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version") != "1" || doc.at("model") != "gcn") throw SchemaError("not a version 1 gcn checkpoint");
        GcnConfig c;
        const auto& jc = doc.at("config");
        c.layers = jc.at("layers").get<int>();
        c.units = jc.at("units").get<int>();
        c.dropout = jc.at("dropout").get<double>();
        c.normalize = jc.at("normalize").get<bool>();
        GcnModel m = GcnModel::zeros(c);
        m.mean = doc.at("standardization").at("mean").get<std::vector<double>>();
        m.scale = doc.at("standardization").at("scale").get<std::vector<double>>();
        const auto& layers = doc.at("layers");
        if (layers.size() != static_cast<std::size_t>(c.layers)) throw SchemaError("$.layers: count differs from config");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto& w = m.weights[l];
            if (layers[l].at("rows").get<std::size_t>() != w.rows || layers[l].at("cols").get<std::size_t>() != w.cols) {
                throw SchemaError("$.layers[" + std::to_string(l) + "]: shape differs from config");
            }
            w.data = layers[l].at("weights").get<std::vector<double>>();
            m.biases[l] = layers[l].at("bias").get<std::vector<double>>();
        }
        m.graph_w = doc.at("graph_head").at("w").get<std::vector<double>>();
        m.graph_b = doc.at("graph_head").at("b").get<double>();
        m.node_w = doc.at("node_head").at("w").get<std::vector<double>>();
        m.node_b = doc.at("node_head").at("b").get<double>();
        try {
            check_model(m);
        } catch (const DimensionMismatch& e) {
            throw SchemaError(e.what());
        }
        for (auto span : m.parameters()) {
            for (double v : span) {
                if (!std::isfinite(v)) throw SchemaError("non-finite parameter");
            }
        }
        for (double s : m.scale) {
            if (!(s > 0)) throw SchemaError("$.standardization.scale: must be positive");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("gcn checkpoint: ") + e.what());
    }
}

} // namespace astref
