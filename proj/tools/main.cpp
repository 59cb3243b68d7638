// Command-line surface for the self-loop paradox toolkit. Every subcommand
// is deterministic under --seed and writes a run_config.json sidecar with
// its fully resolved configuration.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slp/common.hpp"
#include "slp/ensembles.hpp"
#include "slp/experiments.hpp"
#include "slp/gnn.hpp"
#include "slp/graph.hpp"
#include "slp/rng.hpp"
#include "slp/walk_stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;  // documented default, never wall-clock
    std::string out = ".";
    int workers = 1;
};

void write_sidecar(const GlobalOptions& global, const std::string& command,
                   json resolved) {
    resolved["command"] = command;
    resolved["seed"] = global.seed;
    resolved["out"] = global.out;
    resolved["workers"] = global.workers;
    fs::create_directories(global.out);
    fs::path path = fs::path(global.out) / "run_config.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw slp::DataError("cannot write " + path.string());
    out << resolved.dump(2) << '\n';
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw slp::DataError("cannot write " + path.string());
    out << content;
    if (!out) throw slp::DataError("write failed for " + path.string());
}

std::vector<int> parse_degree_list(const std::string& text) {
    std::vector<int> degrees;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            degrees.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw slp::ConfigError("cannot parse degree \"" + item + "\"");
        }
    }
    if (degrees.empty()) throw slp::ConfigError("empty degree list");
    return degrees;
}

// Shared flags for subcommands that can generate their input graph.
struct ModelSource {
    std::string model;  // "sbm" or "config"
    std::string p_intra = "6/100";
    std::string p_inter = "3/900";
    int classes = 10;
    int per_class = 100;
    int feature_dim = 16;
    double sigma = 0.4;
    std::string degrees;

    void add_options(CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--model", model,
                                    "Graph model: sbm or config");
        if (required) opt->required();
        cmd->add_option("--p-intra", p_intra,
                        "Intra-class edge probability, decimal or a/b")
            ->capture_default_str();
        cmd->add_option("--p-inter", p_inter,
                        "Inter-class edge probability, decimal or a/b")
            ->capture_default_str();
        cmd->add_option("--classes", classes, "Number of classes")
            ->capture_default_str();
        cmd->add_option("--per-class", per_class, "Nodes per class")
            ->capture_default_str();
        cmd->add_option("--feature-dim", feature_dim, "Feature dimension")
            ->capture_default_str();
        cmd->add_option("--sigma", sigma, "Feature noise std deviation")
            ->capture_default_str();
        cmd->add_option("--degrees", degrees,
                        "Comma-separated degree sequence (model config)");
    }

    slp::SbmConfig sbm_config() const {
        slp::SbmConfig cfg;
        cfg.num_classes = classes;
        cfg.nodes_per_class = per_class;
        cfg.p_intra = slp::Prob::parse(p_intra);
        cfg.p_inter = slp::Prob::parse(p_inter);
        cfg.feature_dim = feature_dim;
        cfg.feature_sigma = sigma;
        return cfg;
    }

    json describe() const {
        json j{{"model", model}};
        if (model == "sbm") {
            j["p_intra"] = slp::Prob::parse(p_intra);
            j["p_inter"] = slp::Prob::parse(p_inter);
            j["classes"] = classes;
            j["per_class"] = per_class;
            j["feature_dim"] = feature_dim;
            j["sigma"] = sigma;
        } else {
            j["degrees"] = degrees;
        }
        return j;
    }
};

std::string graph_header_comment(const slp::Graph& g) {
    return "# nodes " + std::to_string(g.num_nodes()) + "\n# edges " +
           std::to_string(g.num_edges()) + "\n";
}

int run_generate(const GlobalOptions& global, const ModelSource& src) {
    write_sidecar(global, "generate", src.describe());
    fs::path dir(global.out);
    if (src.model == "sbm") {
        auto data = slp::sbm(src.sbm_config(), slp::RngSeed{global.seed});
        std::ostringstream edges;
        edges << graph_header_comment(data.graph);
        slp::write_edge_list(data.graph, edges);
        write_text_file(dir / "edges.txt", edges.str());
        std::ostringstream features;
        slp::write_features_csv(data.features, features);
        write_text_file(dir / "features.csv", features.str());
        std::ostringstream labels;
        slp::write_labels_csv(data.labels, labels);
        write_text_file(dir / "labels.csv", labels.str());
        std::cerr << "generate: wrote edges.txt, features.csv, labels.csv ("
                  << data.graph.num_nodes() << " nodes, "
                  << data.graph.num_edges() << " edges)\n";
    } else if (src.model == "config") {
        auto degrees = parse_degree_list(src.degrees);
        auto g = slp::configuration_model(degrees, slp::RngSeed{global.seed});
        std::ostringstream edges;
        edges << graph_header_comment(g);
        slp::write_edge_list(g, edges);
        write_text_file(dir / "edges.txt", edges.str());
        std::cerr << "generate: wrote edges.txt (" << g.num_nodes()
                  << " nodes, " << g.num_edges() << " edges)\n";
    } else {
        throw slp::ConfigError("unknown --model \"" + src.model +
                               "\" (want sbm or config)");
    }
    return 0;
}

slp::Graph load_or_generate_graph(const ModelSource& src,
                                  const std::string& input, slp::NodeId nodes,
                                  std::uint64_t seed) {
    if (!input.empty()) return slp::read_edge_list_file(input, nodes);
    if (src.model == "sbm")
        return slp::sbm(src.sbm_config(), slp::RngSeed{seed}).graph;
    if (src.model == "config")
        return slp::configuration_model(parse_degree_list(src.degrees),
                                        slp::RngSeed{seed});
    throw slp::ConfigError("need --input or --model");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-ensemble analytics and GNN experiments around the "
                 "self-loop paradox"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Base seed (default 0)")
        ->capture_default_str();
    app.add_option("--out", global.out, "Output directory")
        ->capture_default_str();
    app.add_option("--workers", global.workers,
                   "Worker threads (grid only)")
        ->capture_default_str();

    // generate
    auto* cmd_generate = app.add_subcommand(
        "generate", "Generate a random graph (plus features/labels for sbm)");
    ModelSource gen_src;
    gen_src.add_options(cmd_generate, true);
    cmd_generate->callback([&] { run_generate(global, gen_src); });

    // stats
    auto* cmd_stats =
        app.add_subcommand("stats", "Degree statistics of an edge list");
    std::string stats_input;
    slp::NodeId stats_nodes = -1;
    bool stats_loops = false;
    cmd_stats->add_option("--input", stats_input, "Edge-list file")
        ->required();
    cmd_stats->add_option("--nodes", stats_nodes,
                          "Node count (default: max index + 1)");
    cmd_stats->add_flag("--self-loops", stats_loops,
                        "Add self-loops before computing");
    cmd_stats->callback([&] {
        write_sidecar(global, "stats",
                      {{"input", stats_input},
                       {"nodes", stats_nodes},
                       {"self_loops", stats_loops}});
        auto g = slp::set_self_loops(
            slp::read_edge_list_file(stats_input, stats_nodes), stats_loops);
        auto s = slp::degree_stats(g);
        json out{{"n", s.n},
                 {"edges", g.num_edges()},
                 {"self_loops", g.has_self_loops()},
                 {"mean_degree", s.mean_degree},
                 {"mean_sq_degree", s.mean_sq_degree},
                 {"mean_neighbor_degree", s.mean_neighbor_degree}};
        std::cout << out.dump(2) << '\n';
    });

    // verify-paradox
    auto* cmd_verify = app.add_subcommand(
        "verify-paradox",
        "Walk proportions with/without self-loops and the length-2 verdict");
    std::string verify_input;
    slp::NodeId verify_nodes = -1;
    int verify_kmax = 6;
    ModelSource verify_src;
    cmd_verify->add_option("--input", verify_input, "Edge-list file");
    cmd_verify->add_option("--nodes", verify_nodes,
                           "Node count (default: max index + 1)");
    cmd_verify->add_option("--kmax", verify_kmax, "Largest walk length")
        ->capture_default_str();
    verify_src.add_options(cmd_verify, false);
    cmd_verify->callback([&] {
        json cfg = verify_src.model.empty() ? json{{"input", verify_input}}
                                            : verify_src.describe();
        cfg["kmax"] = verify_kmax;
        write_sidecar(global, "verify-paradox", cfg);
        auto g = slp::remove_isolated(load_or_generate_graph(
            verify_src, verify_input, verify_nodes, global.seed));
        if (g.num_nodes() == 0)
            throw slp::DataError("graph is empty after cleaning");
        auto stats = slp::degree_stats(g);
        auto without = slp::proportions(g, verify_kmax);
        auto with =
            slp::proportions(slp::set_self_loops(g, true), verify_kmax);
        std::string setting =
            verify_input.empty() ? verify_src.model : verify_input;

        std::vector<slp::WalkRow> rows;
        for (int mode = 0; mode < 2; ++mode) {
            for (int k = 1; k <= verify_kmax; ++k) {
                const auto& report =
                    (mode ? with : without)[static_cast<std::size_t>(k - 1)];
                slp::WalkRow row;
                row.setting_id = setting;
                row.self_loops = mode == 1;
                row.k = k;
                row.mean_value = report.mean;
                row.std_value = report.std;
                if (k == 1) row.estimate = slp::estimate_k1(stats, mode == 1);
                if (k == 2) row.estimate = slp::estimate_k2(stats, mode == 1);
                rows.push_back(std::move(row));
            }
        }
        write_text_file(fs::path(global.out) / "walk_stats.csv",
                        slp::walk_rows_csv(rows));

        std::cout << std::left << std::setw(4) << "k" << std::setw(14)
                  << "mean_without" << std::setw(14) << "std_without"
                  << std::setw(14) << "mean_with" << std::setw(14)
                  << "std_with" << std::setw(14) << "est_without"
                  << "est_with\n";
        std::cout << std::setprecision(6);
        for (int k = 1; k <= verify_kmax; ++k) {
            auto ki = static_cast<std::size_t>(k - 1);
            std::cout << std::setw(4) << k << std::setw(14) << without[ki].mean
                      << std::setw(14) << without[ki].std << std::setw(14)
                      << with[ki].mean << std::setw(14) << with[ki].std;
            if (k <= 2) {
                std::cout << std::setw(14)
                          << (k == 1 ? slp::estimate_k1(stats, false)
                                     : slp::estimate_k2(stats, false))
                          << (k == 1 ? slp::estimate_k1(stats, true)
                                     : slp::estimate_k2(stats, true));
            }
            std::cout << '\n';
        }
        auto verdict = slp::paradox_verdict(g);
        std::cout << "verdict: k=2 proportion without self-loops "
                  << (verdict.holds_empirically ? "exceeds" : "does not exceed")
                  << " with self-loops (" << verdict.empirical_without
                  << " vs " << verdict.empirical_with << "); estimates "
                  << verdict.estimate_without << " vs "
                  << verdict.estimate_with << '\n';
    });

    // influence
    auto* cmd_influence = app.add_subcommand(
        "influence", "Relative influence of node u on node v at depth k "
                     "under the linear message pass");
    std::string influence_input;
    slp::NodeId influence_nodes = -1;
    int influence_k = 2;
    slp::NodeId influence_u = 0;
    slp::NodeId influence_v = 0;
    bool influence_loops = false;
    cmd_influence->add_option("--input", influence_input, "Edge-list file")
        ->required();
    cmd_influence->add_option("--nodes", influence_nodes,
                              "Node count (default: max index + 1)");
    cmd_influence->add_option("--k", influence_k, "Walk length")
        ->capture_default_str();
    cmd_influence->add_option("--u", influence_u, "Source node")->required();
    cmd_influence->add_option("--v", influence_v, "Target node")->required();
    cmd_influence->add_flag("--self-loops", influence_loops,
                            "Use the adjacency with self-loops");
    cmd_influence->callback([&] {
        write_sidecar(global, "influence",
                      {{"input", influence_input},
                       {"k", influence_k},
                       {"u", influence_u},
                       {"v", influence_v},
                       {"self_loops", influence_loops}});
        auto g = slp::read_edge_list_file(influence_input, influence_nodes);
        double ratio = slp::influence_ratio(g, influence_loops, influence_k,
                                            influence_u, influence_v);
        std::cout << slp::format_double(ratio) << '\n';
    });

    // train
    auto* cmd_train = app.add_subcommand(
        "train", "Train one model on generated or on-disk data");
    ModelSource train_src;
    train_src.add_options(cmd_train, false);
    std::string train_edges, train_features, train_labels;
    std::string train_kind = "gcn";
    int train_layers = 2;
    int train_hidden = 16;
    bool train_self_loops = true;
    int train_epochs = 70;
    double train_lr = 0.01;
    double train_fraction = 0.8;
    double train_dropout = -1.0;  // resolved per data source below
    cmd_train->add_option("--edges", train_edges, "Edge-list file");
    cmd_train->add_option("--features", train_features, "Feature CSV");
    cmd_train->add_option("--labels", train_labels, "Label CSV");
    cmd_train->add_option("--kind", train_kind, "Model kind: gcn or mlp")
        ->capture_default_str();
    cmd_train->add_option("--layers", train_layers, "Number of layers")
        ->capture_default_str();
    cmd_train->add_option("--hidden", train_hidden, "Hidden width")
        ->capture_default_str();
    cmd_train->add_flag("--self-loops,!--no-self-loops", train_self_loops,
                        "Propagate with self-loops (default on)");
    cmd_train->add_option("--epochs", train_epochs, "Training epochs")
        ->capture_default_str();
    cmd_train->add_option("--lr", train_lr, "Adam learning rate")
        ->capture_default_str();
    cmd_train->add_option("--train-fraction", train_fraction,
                          "Fraction of nodes used for training")
        ->capture_default_str();
    cmd_train->add_option(
        "--dropout", train_dropout,
        "Dropout rate (default 0 generated, 0.2 on-disk data)");
    cmd_train->callback([&] {
        bool external = !train_edges.empty();
        slp::LabeledGraphData data;
        if (external) {
            if (train_features.empty() || train_labels.empty())
                throw slp::ConfigError(
                    "train: --edges needs --features and --labels");
            data = slp::ingest_external(
                {train_edges, train_features, train_labels});
        } else if (train_src.model == "sbm") {
            data = slp::clean_data(
                slp::sbm(train_src.sbm_config(),
                         slp::derive_seed(slp::RngSeed{global.seed}, 0)));
        } else {
            throw slp::ConfigError(
                "train: need --edges/--features/--labels or --model sbm");
        }
        double dropout =
            train_dropout >= 0.0 ? train_dropout : (external ? 0.2 : 0.0);
        slp::ModelConfig mc;
        mc.kind = slp::model_kind_from_string(train_kind);
        mc.self_loops = train_self_loops;
        mc.num_layers = train_layers;
        mc.hidden_dim = train_hidden;
        slp::TrainConfig tc;
        tc.epochs = train_epochs;
        tc.learning_rate = train_lr;
        tc.train_fraction = train_fraction;
        tc.dropout = dropout;
        tc.seed = slp::derive_seed(slp::RngSeed{global.seed}, 1);
        json cfg{{"kind", train_kind},
                 {"layers", train_layers},
                 {"hidden", train_hidden},
                 {"self_loops", train_self_loops},
                 {"epochs", train_epochs},
                 {"learning_rate", train_lr},
                 {"train_fraction", train_fraction},
                 {"dropout", dropout}};
        if (external) {
            cfg["edges"] = train_edges;
            cfg["features"] = train_features;
            cfg["labels"] = train_labels;
        } else {
            cfg["source"] = train_src.describe();
        }
        write_sidecar(global, "train", cfg);
        auto result = slp::train(data.graph, data, mc, tc);
        json model_dump = slp::model_to_json(result.model);
        model_dump["test_accuracy"] = result.test_accuracy;
        write_text_file(fs::path(global.out) / "model.json",
                        model_dump.dump(2) + "\n");
        json out{{"test_accuracy", result.test_accuracy},
                 {"final_train_loss", result.final_train_loss}};
        std::cout << out.dump(2) << '\n';
    });

    // grid
    auto* cmd_grid = app.add_subcommand(
        "grid", "Run an experiment plan: accuracy grid + walk tables");
    std::string grid_plan;
    cmd_grid->add_option("--plan", grid_plan, "Plan JSON file")->required();
    cmd_grid->callback([&] {
        auto plan = slp::load_plan(grid_plan);
        // The plan's own base_seed applies unless --seed overrides it.
        if (global.seed != 0) plan.base_seed = slp::RngSeed{global.seed};
        write_sidecar(global, "grid",
                      {{"plan", grid_plan},
                       {"base_seed", plan.base_seed.value},
                       {"runs", plan.runs},
                       {"settings", plan.settings.size()}});
        slp::ExperimentResult results;
        results.walk_rows = slp::run_walk_tables(plan);
        results.accuracy_rows = slp::run_accuracy_grid(plan, global.workers);
        slp::emit_report(results, global.out);
        std::size_t errors = 0;
        for (const auto& row : results.accuracy_rows) errors += !row.ok();
        std::cerr << "grid: " << results.accuracy_rows.size()
                  << " accuracy rows (" << errors << " errors), "
                  << results.walk_rows.size() << " walk rows -> " << global.out
                  << '\n';
        if (errors == results.accuracy_rows.size() &&
            !results.accuracy_rows.empty())
            throw slp::DataError("grid: every cell failed; see accuracies.csv");
    });

    // ingest
    auto* cmd_ingest = app.add_subcommand(
        "ingest", "Clean an external dataset and write the canonical files");
    std::string ingest_edges, ingest_features, ingest_labels;
    cmd_ingest->add_option("--edges", ingest_edges, "Edge-list file")
        ->required();
    cmd_ingest->add_option("--features", ingest_features, "Feature CSV")
        ->required();
    cmd_ingest->add_option("--labels", ingest_labels, "Label CSV")
        ->required();
    cmd_ingest->callback([&] {
        write_sidecar(global, "ingest",
                      {{"edges", ingest_edges},
                       {"features", ingest_features},
                       {"labels", ingest_labels}});
        auto data = slp::ingest_external(
            {ingest_edges, ingest_features, ingest_labels});
        if (data.graph.num_nodes() == 0)
            std::cerr << "ingest: warning: graph is empty after self-loop "
                         "stripping and isolated-node removal\n";
        fs::path dir(global.out);
        std::ostringstream edges;
        edges << graph_header_comment(data.graph);
        slp::write_edge_list(data.graph, edges);
        write_text_file(dir / "edges.txt", edges.str());
        std::ostringstream features;
        slp::write_features_csv(data.features, features);
        write_text_file(dir / "features.csv", features.str());
        std::ostringstream labels;
        slp::write_labels_csv(data.labels, labels);
        write_text_file(dir / "labels.csv", labels.str());
        json out{{"nodes", data.graph.num_nodes()},
                 {"edges", data.graph.num_edges()},
                 {"feature_dim", data.features.cols()}};
        std::cout << out.dump(2) << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const slp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
