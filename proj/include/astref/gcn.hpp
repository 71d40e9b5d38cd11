#pragma once

#include "astref/graph.hpp"
#include "astref/kernels.hpp"
#include "astref/rng.hpp"

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <vector>

namespace astref {

struct GcnConfig {
    int layers = 4;
    int units = 128;
    double dropout = 0.4;
    /// D^-1/2 (A + I) D^-1/2 instead of the plain sum.
    bool normalize = false;
    bool operator==(const GcnConfig&) const = default;
};

struct GcnModel {
    GcnConfig config;
    /// Input standardization: x' = (x - mean) / scale, fitted on training nodes.
    std::vector<double> mean = std::vector<double>(kNodeFeatureCount, 0.0);
    std::vector<double> scale = std::vector<double>(kNodeFeatureCount, 1.0);
    std::vector<Matrix> weights;              // layer l: d_l x units
    std::vector<std::vector<double>> biases;  // layer l: units
    std::vector<double> graph_w;              // units
    double graph_b = 0;
    std::vector<double> node_w;  // units
    double node_b = 0;

    /// Glorot-uniform weights, zero biases.
    static GcnModel init(const GcnConfig& config, std::uint64_t seed);
    /// Same shapes, every parameter zero.
    static GcnModel zeros(const GcnConfig& config);

    /// Every trainable parameter as a mutable view, in a fixed order
    /// (layer weights and biases, graph head, node head).
    std::vector<std::span<double>> parameters();
    std::size_t parameter_count() const;

    bool operator==(const GcnModel&) const = default;
};

/// Several graphs packed block-diagonally.
struct GraphBatch {
    Csr adjacency;                     // A + I, gated by edge strength
    Matrix features;                   // raw node features, total_nodes x 12
    std::vector<std::size_t> offsets;  // graph g owns rows [offsets[g], offsets[g+1])
    std::vector<int> labels;           // -1 when unlabeled
    /// Per graph: local node ids allowed to start a split, and the labeled one (or -1).
    std::vector<std::vector<int>> eligible;
    std::vector<int> split;

    std::size_t graph_count() const { return offsets.size() - 1; }
};

/// Neighborhood of v: itself (weight 1) and both endpoints of every edge
/// touching v, each weighted by that edge's strength feature.
GraphBatch make_batch(std::span<const CodeGraph* const> graphs, bool normalize = false);
GraphBatch make_batch(const CodeGraph& graph, bool normalize = false);

/// ReLU(A H W + b) for one layer; throws DimensionMismatch.
Matrix gcn_layer_forward(const Matrix& h, const Csr& adjacency, const Matrix& w, std::span<const double> b);

struct ForwardResult {
    std::vector<double> graph_prob;   // one per graph
    std::vector<double> node_scores;  // one per node of the batch
};

/// Dropout (inverted, rate config.dropout) masks the outputs of every layer
/// but the last, and only when `training` is set. Probabilities are clamped to
/// [1e-12, 1 - 1e-12].
ForwardResult forward(const GcnModel& model, const GraphBatch& batch, bool training = false, Rng* rng = nullptr);
ForwardResult forward(const GcnModel& model, const CodeGraph& graph);

/// -(y ln p + (1-y) ln(1-p)) with p clamped to [1e-12, 1 - 1e-12].
double loss_bce(double p, int y);

/// Eligible split starts of a graph: body statements of a FunctionDef at
/// position >= 1 with no Return anywhere in the preceding statements.
std::vector<int> eligible_split_nodes(const CodeGraph& graph);

struct LossAndGrad {
    double loss = 0;
    GcnModel grad;  // same shapes as the model
    std::vector<double> graph_prob;
};

/// Mean over graphs of BCE(graph_prob, label), plus, for graphs carrying a
/// split label, the mean node BCE against the one-hot split over eligible nodes.
/// Unlabeled graphs contribute nothing. The loss is evaluated from logits, which
/// equals loss_bce on the sigmoid but stays exact where the sigmoid saturates.
LossAndGrad loss_and_gradient(const GcnModel& model, const GraphBatch& batch, bool training = false,
                              Rng* rng = nullptr);

struct TrainConfig {
    double learning_rate = 5e-4;
    int epochs = 75;
    int batch_size = 128;
    std::uint64_t seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    bool deterministic = true;
};

struct EpochStats {
    double train_loss = 0;
    double train_acc = 0;
    std::optional<double> val_acc;
    bool operator==(const EpochStats&) const = default;
};

using TrainHistory = std::vector<EpochStats>;

struct TrainResult {
    GcnModel model;
    TrainHistory history;
};

/// Mini-batch Adam. Standardization is fitted on `train` first. Train
/// accuracy is read off the dropout pass of each batch. Throws
/// DataError on an empty training set.
TrainResult train_gcn(GcnModel model, std::span<const CodeGraph> train, std::span<const CodeGraph> val,
                      const TrainConfig& config);

struct SplitSuggestion {
    int node_id = -1;
    double score = 0;
    bool eligible = false;
};

/// Highest node score among eligible split starts; lowest id on ties.
SplitSuggestion suggest_split(const GcnModel& model, const CodeGraph& graph);

struct GridPoint {
    GcnConfig config;
    double learning_rate = 5e-4;
    double val_auc = 0;
};

struct GridResult {
    GridPoint best;
    std::vector<GridPoint> table;
};

/// Trains each (config, rate) pair on `train` and ranks by PR-AUC of graph_prob
/// on `val`. Equal AUCs keep the lexicographically smaller (layers, units, rate).
GridResult grid_search_gcn(std::span<const CodeGraph> train, std::span<const CodeGraph> val,
                           std::span<const GridPoint> grid, const TrainConfig& base);

/// layers {2,4,6} x units {64,128,256} x rates {1e-4, 5e-4, 1e-3}.
std::vector<GridPoint> default_gcn_grid();

nlohmann::json gcn_to_json(const GcnModel& model);
/// Validates version and every dimension; throws SchemaError.
GcnModel gcn_from_json(const nlohmann::json& doc);

} // namespace astref
