#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slp/ensembles.hpp"
#include "slp/gnn.hpp"
#include "slp/rng.hpp"

namespace slp {

struct ExternalDataset {
    std::string edge_file;
    std::string feature_file;
    std::string label_file;
};

// One experiment setting: either a generated SBM family or a fixed external
// dataset on disk.
struct Setting {
    std::string id;
    std::optional<SbmConfig> sbm;
    std::optional<ExternalDataset> external;
};

struct ExperimentPlan {
    std::vector<Setting> settings;
    std::vector<int> depths = {1, 2, 3, 4, 5, 6};
    std::vector<bool> modes = {true, false};  // self-loops: with, without
    int runs = 50;
    std::vector<ModelKind> model_kinds = {ModelKind::gcn, ModelKind::mlp};
    int epochs = 70;
    double learning_rate = 0.01;
    double train_fraction = 0.8;
    // Unset means the per-setting default: 0 for generated graphs, 0.2 for
    // external datasets.
    std::optional<double> dropout;
    int hidden_dim = 16;
    int walk_k_max = 6;
    int walk_runs = 10;  // graphs pooled per walk-table row
    RngSeed base_seed;

    void validate() const;
};

ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);

// One accuracy measurement. self_loops is -1 for mlp cells, where the flag
// has no meaning (written as "na" in the CSV). A failed run keeps its row
// with the message in error and no accuracy.
struct AccuracyRow {
    std::string setting_id;
    ModelKind kind = ModelKind::gcn;
    int k = 0;
    int self_loops = -1;
    int run_index = 0;
    std::uint64_t seed = 0;
    double test_accuracy = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct WalkRow {
    std::string setting_id;
    bool self_loops = false;
    int k = 0;
    double mean_value = 0.0;
    double std_value = 0.0;
    std::optional<double> estimate;  // only k = 1, 2 carry one
};

struct ExperimentResult {
    std::vector<AccuracyRow> accuracy_rows;
    std::vector<WalkRow> walk_rows;
};

// Walk-proportion tables: per setting, walk_runs loop-free graphs are
// generated and each is evaluated together with its self-loop counterpart,
// pooling proportions over all nodes of all graphs. Estimates for k <= 2
// average the per-graph realized-degree estimates. External settings use
// their single fixed graph.
std::vector<WalkRow> run_walk_tables(const ExperimentPlan& plan);

// Accuracy grid: for every (setting, kind, depth, mode, run) cell a child
// seed is derived from base_seed via the cell's position, the data is
// regenerated, split, trained and scored. Rows come back in plan order
// regardless of worker count.
std::vector<AccuracyRow> run_accuracy_grid(const ExperimentPlan& plan,
                                           int workers = 1);

// Reads the three files, symmetrizes edges, drops existing self-loops,
// removes isolated nodes and realigns features/labels to the surviving
// nodes.
LabeledGraphData ingest_external(const ExternalDataset& ds);

// Feature file: one CSV row of numbers per node, '#' comments allowed.
// Label file: "node,label" rows covering every node exactly once.
Matrix read_feature_csv(const std::string& path);
std::vector<int> read_label_csv(const std::string& path, std::size_t n);
void write_features_csv(const Matrix& x, std::ostream& out);
void write_labels_csv(const std::vector<int>& labels, std::ostream& out);

// CSV renderings with header row; doubles in shortest round-trip form.
std::string accuracy_rows_csv(const std::vector<AccuracyRow>& rows);
std::string walk_rows_csv(const std::vector<WalkRow>& rows);

// Writes accuracies.csv, walk_stats.csv and summary.json into out_dir
// (created if missing). Reruns of the same plan produce byte-identical
// files.
void emit_report(const ExperimentResult& results, const std::string& out_dir);

}  // namespace slp
