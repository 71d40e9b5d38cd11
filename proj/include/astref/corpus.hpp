#pragma once

#include "astref/graph.hpp"
#include "astref/metrics.hpp"
#include "astref/source.hpp"

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace astref {

struct PostMetrics {
    int cyclomatic = 0;
    int coupling = 0;
    bool operator==(const PostMetrics&) const = default;
};

struct LabeledSample {
    std::string id;      // source path, or "<source>#smote<k>" for oversampled rows
    std::string source;  // normalized MiniPy text the graph was built from
    CodeGraph graph;
    FlatFeatures flat;
    int label = 0;  // 1 refactor, 0 keep
    std::optional<int> split_node;
    std::optional<PostMetrics> post_metrics;
    bool oversampled = false;
    bool operator==(const LabeledSample&) const = default;
};

struct Provenance {
    long ingested = 0;
    long parse_failed = 0;
    long deduped = 0;
    long trivial_dropped = 0;
    long unlabeled = 0;
    long oversampled = 0;
    bool operator==(const Provenance&) const = default;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<int> folds;  // fold of each sample, empty when not assigned
    std::uint64_t seed = 42;
    Provenance provenance;
    bool operator==(const Dataset&) const = default;
};

struct Label {
    int label = 0;
    std::optional<int> split_node;
};

/// One raw input file with an optional ground-truth label.
struct LabeledUnit {
    SourceUnit unit;
    std::optional<Label> label;
};

struct IngestResult {
    std::vector<LabeledUnit> units;
    long ingested = 0;
    long unreadable = 0;
};

/// Reads every *.mpy file below `dir` in path order. Labels come from an
/// optional `labels.json` in `dir`: {"<relative path>": {"label":0|1, "split_node"?:id}}.
/// Unreadable files are logged to stderr and skipped. Throws IoError when
/// `dir` is not a readable directory.
IngestResult ingest_dir(const std::filesystem::path& dir);

/// Keeps the first unit (by path) of every normalized-body digest.
std::vector<LabeledUnit> dedup(std::vector<LabeledUnit> units);

/// True for units with fewer than 2 statements, or with no FunctionDef and
/// fewer than 3 nodes.
bool is_trivial(const AstTree& tree);

/// refactor iff some function body holds a top-level loop enclosing at least
/// two decision nodes, followed by another statement, with no return before
/// that statement. The split node is that statement (first match in preorder).
Label structural_label(const AstTree& tree);

/// Extract-method at a split node: returns the enclosing FunctionDef id and
/// the index of the node within the function body. Throws SplitError.
std::pair<int, std::size_t> split_site(const AstTree& tree, int split_node);

struct BuildOptions {
    std::uint64_t seed = 42;
    double test_fraction = 0.20;
    double target_minority = 0.40;
    double cap_percentile = 99;
    int folds = 5;
};

/// dedup, parse, filter, label, featurize, cap, split, oversample (train
/// only) and fold. Units without a label are counted and dropped.
Dataset build_dataset(std::vector<LabeledUnit> units, const BuildOptions& options = {});

/// Stratified split: per class, a seeded shuffle puts a share of the test
/// quota proportional to class size (largest remainder) into test. Train gets
/// ceil((1 - f) n). Throws DataError (TooSmall) for n < 2.
void split_dataset(Dataset& dataset, double test_fraction = 0.20, std::uint64_t seed = 42);

/// Stratified k-fold over `labels`: classes are shuffled and dealt round-robin.
/// Throws DataError (TooSmall) when n < k.
std::vector<int> kfold(std::span<const int> labels, int k, std::uint64_t seed);

/// SMOTE over the train indices, appending the new rows to samples and train.
/// Throws DataError (SingleClass) when train holds one class.
void oversample(Dataset& dataset, double target_minority = 0.40, std::uint64_t seed = 42);

/// Smallest m with m / (majority + m) >= target.
long minority_target(long majority, double target);

nlohmann::json dataset_to_json(const Dataset& dataset);
/// Throws SchemaError.
Dataset dataset_from_json(const nlohmann::json& doc);

struct SynthProgram {
    std::string path;
    std::string source;
    Label label;
};

/// Seeded MiniPy programs. Positives carry the loop-then-statement pattern
/// at low and high complexity; negatives include loop-last twins, loops with
/// a single decision, high-complexity nested ifs and plain functions.
/// Labels come from structural_label. Throws Error for n < 10.
std::vector<SynthProgram> synth_programs(int n, std::uint64_t seed);

std::vector<LabeledUnit> to_units(const std::vector<SynthProgram>& programs);

/// synth_programs fed through build_dataset.
Dataset synth_corpus(int n, std::uint64_t seed, const BuildOptions& options = {});

/// {"version":"1","kind":"bundle","seed","files":[{"path","source","label","split_node"?}]}
nlohmann::json bundle_to_json(const std::vector<SynthProgram>& programs, std::uint64_t seed);
std::vector<LabeledUnit> bundle_from_json(const nlohmann::json& doc);

} // namespace astref
