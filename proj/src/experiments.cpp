#include "slp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "slp/common.hpp"
#include "slp/stats_util.hpp"
#include "slp/walk_stats.hpp"

namespace slp {

namespace fs = std::filesystem;

void ExperimentPlan::validate() const {
    if (settings.empty()) throw ConfigError("plan: settings must be nonempty");
    std::set<std::string> ids;
    for (const auto& s : settings) {
        if (s.id.empty()) throw ConfigError("plan: setting without id");
        if (!ids.insert(s.id).second)
            throw ConfigError("plan: duplicate setting id \"" + s.id + "\"");
        if (s.sbm.has_value() == s.external.has_value())
            throw ConfigError("plan: setting \"" + s.id +
                              "\" needs exactly one of sbm or external");
        if (s.sbm) s.sbm->validate();
        if (s.external) {
            for (const std::string* path :
                 {&s.external->edge_file, &s.external->feature_file,
                  &s.external->label_file}) {
                if (!fs::exists(*path))
                    throw ConfigError("plan: setting \"" + s.id +
                                      "\" references missing file " + *path);
            }
        }
    }
    if (depths.empty()) throw ConfigError("plan: depths must be nonempty");
    for (int k : depths)
        if (k < 1) throw ConfigError("plan: depths must be >= 1");
    if (modes.empty()) throw ConfigError("plan: modes must be nonempty");
    if (runs < 1) throw ConfigError("plan: runs must be >= 1");
    if (model_kinds.empty())
        throw ConfigError("plan: model_kinds must be nonempty");
    if (walk_k_max < 1) throw ConfigError("plan: walk_k_max must be >= 1");
    if (walk_runs < 1) throw ConfigError("plan: walk_runs must be >= 1");
    if (hidden_dim < 1) throw ConfigError("plan: hidden_dim must be >= 1");
    if (epochs < 1) throw ConfigError("plan: epochs must be >= 1");
    if (learning_rate <= 0.0)
        throw ConfigError("plan: learning_rate must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("plan: train_fraction must lie in (0, 1)");
    if (dropout && !(*dropout >= 0.0 && *dropout < 1.0))
        throw ConfigError("plan: dropout must lie in [0, 1)");
}

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return item.key() == k;
            }) == known.end()) {
            throw ConfigError("plan: unknown key \"" + item.key() + "\" in " +
                              where);
        }
    }
}

}  // namespace

ExperimentPlan plan_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"settings", "depths", "modes", "runs", "model_kinds",
                         "train", "hidden_dim", "walk_k_max", "walk_runs",
                         "base_seed"},
                        "plan");
    ExperimentPlan plan;
    for (const auto& js : j.at("settings")) {
        reject_unknown_keys(js, {"id", "sbm", "external"}, "setting");
        Setting s;
        s.id = js.at("id").get<std::string>();
        if (js.contains("sbm")) s.sbm = js["sbm"].get<SbmConfig>();
        if (js.contains("external")) {
            const auto& je = js["external"];
            reject_unknown_keys(je, {"edges", "features", "labels"},
                                "setting \"" + s.id + "\" external");
            ExternalDataset ds;
            ds.edge_file = je.at("edges").get<std::string>();
            ds.feature_file = je.at("features").get<std::string>();
            ds.label_file = je.at("labels").get<std::string>();
            s.external = std::move(ds);
        }
        plan.settings.push_back(std::move(s));
    }
    if (j.contains("depths")) plan.depths = j["depths"].get<std::vector<int>>();
    if (j.contains("modes")) {
        plan.modes.clear();
        for (const auto& jm : j["modes"]) {
            std::string m = jm.get<std::string>();
            if (m == "with")
                plan.modes.push_back(true);
            else if (m == "without")
                plan.modes.push_back(false);
            else
                throw ConfigError("plan: mode must be \"with\" or \"without\","
                                  " got \"" + m + "\"");
        }
    }
    if (j.contains("runs")) plan.runs = j["runs"].get<int>();
    if (j.contains("model_kinds")) {
        plan.model_kinds.clear();
        for (const auto& jk : j["model_kinds"])
            plan.model_kinds.push_back(
                model_kind_from_string(jk.get<std::string>()));
    }
    if (j.contains("train")) {
        const auto& jt = j["train"];
        reject_unknown_keys(
            jt, {"epochs", "learning_rate", "train_fraction", "dropout"},
            "train");
        if (jt.contains("epochs")) plan.epochs = jt["epochs"].get<int>();
        if (jt.contains("learning_rate"))
            plan.learning_rate = jt["learning_rate"].get<double>();
        if (jt.contains("train_fraction"))
            plan.train_fraction = jt["train_fraction"].get<double>();
        if (jt.contains("dropout")) plan.dropout = jt["dropout"].get<double>();
    }
    if (j.contains("hidden_dim"))
        plan.hidden_dim = j["hidden_dim"].get<int>();
    if (j.contains("walk_k_max"))
        plan.walk_k_max = j["walk_k_max"].get<int>();
    if (j.contains("walk_runs")) plan.walk_runs = j["walk_runs"].get<int>();
    if (j.contains("base_seed"))
        plan.base_seed = RngSeed{j["base_seed"].get<std::uint64_t>()};
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open plan: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("plan " + path + ": " + e.what());
    }
    return plan_from_json(j);
}

// --- data file helpers ------------------------------------------------

namespace {

bool skippable(const std::string& line) {
    auto start = line.find_first_not_of(" \t\r");
    return start == std::string::npos || line[start] == '#';
}

double parse_double_field(const std::string& field, const std::string& where) {
    auto begin = field.find_first_not_of(" \t\r");
    auto end = field.find_last_not_of(" \t\r");
    if (begin == std::string::npos)
        throw DataError(where + ": empty numeric field");
    double v = 0.0;
    auto r = std::from_chars(field.data() + begin, field.data() + end + 1, v);
    if (r.ec != std::errc{} || r.ptr != field.data() + end + 1)
        throw DataError(where + ": cannot parse number \"" + field + "\"");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

Matrix read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open feature file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::string where = path + ":" + std::to_string(line_no);
        auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double_field(f, where));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(where + ": expected " +
                            std::to_string(rows.front().size()) +
                            " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": no feature rows");
    Matrix x(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
    return x;
}

std::vector<int> read_label_csv(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label file: " + path);
    std::vector<int> labels(n, -1);
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        std::string where = path + ":" + std::to_string(line_no);
        auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw DataError(where + ": expected \"node,label\"");
        auto node = static_cast<std::size_t>(
            parse_double_field(fields[0], where));
        auto label = static_cast<long>(parse_double_field(fields[1], where));
        if (node >= n)
            throw DataError(where + ": node " + std::to_string(node) +
                            " out of range for " + std::to_string(n) +
                            " feature rows");
        if (labels[node] != -1)
            throw DataError(where + ": duplicate label for node " +
                            std::to_string(node));
        if (label < 0) throw DataError(where + ": negative label");
        labels[node] = static_cast<int>(label);
    }
    for (std::size_t v = 0; v < n; ++v)
        if (labels[v] == -1)
            throw DataError(path + ": node " + std::to_string(v) +
                            " has no label");
    return labels;
}

void write_features_csv(const Matrix& x, std::ostream& out) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            out << format_double(x(i, j));
        }
        out << '\n';
    }
}

void write_labels_csv(const std::vector<int>& labels, std::ostream& out) {
    for (std::size_t v = 0; v < labels.size(); ++v)
        out << v << ',' << labels[v] << '\n';
}

LabeledGraphData ingest_external(const ExternalDataset& ds) {
    LabeledGraphData raw;
    raw.features = read_feature_csv(ds.feature_file);
    const auto n = raw.features.rows();
    raw.labels = read_label_csv(ds.label_file, n);
    raw.graph = read_edge_list_file(ds.edge_file, static_cast<NodeId>(n));
    return clean_data(raw);
}

// --- walk tables ------------------------------------------------------

namespace {

// Pooled per-node proportions and averaged realized-degree estimates for
// one setting, both self-loop modes side by side.
struct WalkAccumulator {
    int k_max;
    // [mode][k-1]; mode 0 = without, 1 = with
    std::vector<std::vector<double>> per_node[2];
    double estimate_sum[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [mode][k-1]
    int graphs = 0;

    explicit WalkAccumulator(int k)
        : k_max(k) {
        per_node[0].resize(static_cast<std::size_t>(k));
        per_node[1].resize(static_cast<std::size_t>(k));
    }

    void add_graph(const Graph& loop_free) {
        DegreeStats stats = degree_stats(loop_free);
        auto without = proportions(loop_free, k_max);
        auto with = proportions(set_self_loops(loop_free, true), k_max);
        for (int k = 1; k <= k_max; ++k) {
            auto ki = static_cast<std::size_t>(k - 1);
            auto& dst_wo = per_node[0][ki];
            auto& dst_w = per_node[1][ki];
            dst_wo.insert(dst_wo.end(), without[ki].per_node.begin(),
                          without[ki].per_node.end());
            dst_w.insert(dst_w.end(), with[ki].per_node.begin(),
                         with[ki].per_node.end());
        }
        estimate_sum[0][0] += estimate_k1(stats, false);
        estimate_sum[1][0] += estimate_k1(stats, true);
        if (k_max >= 2) {
            estimate_sum[0][1] += estimate_k2(stats, false);
            estimate_sum[1][1] += estimate_k2(stats, true);
        }
        ++graphs;
    }

    WalkRow row(const std::string& setting_id, bool self_loops, int k) const {
        auto mi = static_cast<std::size_t>(self_loops ? 1 : 0);
        const auto& values = per_node[mi][static_cast<std::size_t>(k - 1)];
        WalkRow r;
        r.setting_id = setting_id;
        r.self_loops = self_loops;
        r.k = k;
        r.mean_value = mean(values);
        r.std_value = population_std(values);
        if (k <= 2)
            r.estimate = estimate_sum[mi][static_cast<std::size_t>(k - 1)] /
                         static_cast<double>(graphs);
        return r;
    }
};

}  // namespace

std::vector<WalkRow> run_walk_tables(const ExperimentPlan& plan) {
    plan.validate();
    RngSeed walk_root = derive_seed(plan.base_seed, 2);
    std::vector<WalkRow> rows;
    for (std::size_t si = 0; si < plan.settings.size(); ++si) {
        const Setting& setting = plan.settings[si];
        RngSeed setting_seed = derive_seed(walk_root, si);
        WalkAccumulator acc(plan.walk_k_max);
        if (setting.sbm) {
            for (int r = 0; r < plan.walk_runs; ++r) {
                auto data = sbm(*setting.sbm,
                                derive_seed(setting_seed,
                                            static_cast<std::uint64_t>(r)));
                acc.add_graph(remove_isolated(data.graph));
            }
        } else {
            acc.add_graph(ingest_external(*setting.external).graph);
        }
        for (bool mode : plan.modes)
            for (int k = 1; k <= plan.walk_k_max; ++k)
                rows.push_back(acc.row(setting.id, mode, k));
    }
    return rows;
}

// --- accuracy grid ----------------------------------------------------

namespace {

struct GridJob {
    std::size_t row_index;
    std::size_t setting_index;
    ModelKind kind;
    int depth;
    int self_loops;  // -1 for mlp
    int run;
    RngSeed run_seed;
};

struct IngestedSetting {
    std::optional<LabeledGraphData> data;
    std::string error;
};

}  // namespace

std::vector<AccuracyRow> run_accuracy_grid(const ExperimentPlan& plan,
                                           int workers) {
    plan.validate();
    if (workers < 1) throw ConfigError("grid: workers must be >= 1");

    // External settings are ingested once and shared read-only; an ingest
    // failure becomes an error row in every cell of that setting.
    std::vector<IngestedSetting> ingested(plan.settings.size());
    for (std::size_t si = 0; si < plan.settings.size(); ++si) {
        if (!plan.settings[si].external) continue;
        try {
            ingested[si].data = ingest_external(*plan.settings[si].external);
        } catch (const std::exception& e) {
            ingested[si].error = e.what();
        }
    }

    RngSeed grid_root = derive_seed(plan.base_seed, 1);
    std::vector<GridJob> jobs;
    std::uint64_t cell_index = 0;
    std::size_t row_index = 0;
    for (std::size_t si = 0; si < plan.settings.size(); ++si) {
        for (ModelKind kind : plan.model_kinds) {
            for (int depth : plan.depths) {
                // mlp cells ignore the propagation step, so the self-loop
                // mode axis collapses to a single "na" cell.
                std::vector<int> cell_modes;
                if (kind == ModelKind::gcn)
                    for (bool m : plan.modes) cell_modes.push_back(m ? 1 : 0);
                else
                    cell_modes.push_back(-1);
                for (int mode : cell_modes) {
                    RngSeed cell_seed = derive_seed(grid_root, cell_index);
                    ++cell_index;
                    for (int run = 0; run < plan.runs; ++run) {
                        GridJob job;
                        job.row_index = row_index++;
                        job.setting_index = si;
                        job.kind = kind;
                        job.depth = depth;
                        job.self_loops = mode;
                        job.run = run;
                        job.run_seed = derive_seed(
                            cell_seed, static_cast<std::uint64_t>(run));
                        jobs.push_back(job);
                    }
                }
            }
        }
    }

    std::vector<AccuracyRow> rows(jobs.size());
    auto execute = [&](const GridJob& job) {
        const Setting& setting = plan.settings[job.setting_index];
        AccuracyRow row;
        row.setting_id = setting.id;
        row.kind = job.kind;
        row.k = job.depth;
        row.self_loops = job.self_loops;
        row.run_index = job.run;
        row.seed = job.run_seed.value;
        try {
            LabeledGraphData data;
            double dropout;
            if (setting.sbm) {
                data = clean_data(
                    sbm(*setting.sbm, derive_seed(job.run_seed, 0)));
                dropout = plan.dropout.value_or(0.0);
            } else {
                const IngestedSetting& cached = ingested[job.setting_index];
                if (!cached.data) throw DataError(cached.error);
                data = *cached.data;
                dropout = plan.dropout.value_or(0.2);
            }
            ModelConfig mc;
            mc.kind = job.kind;
            mc.self_loops = job.self_loops == 1;
            mc.num_layers = job.depth;
            mc.hidden_dim = plan.hidden_dim;
            TrainConfig tc;
            tc.epochs = plan.epochs;
            tc.learning_rate = plan.learning_rate;
            tc.train_fraction = plan.train_fraction;
            tc.dropout = dropout;
            tc.seed = derive_seed(job.run_seed, 1);
            row.test_accuracy =
                train(data.graph, data, mc, tc).test_accuracy;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows[job.row_index] = std::move(row);
    };

    if (workers == 1 || jobs.size() <= 1) {
        for (const auto& job : jobs) execute(job);
    } else {
        std::atomic<std::size_t> next{0};
        auto drain = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                execute(jobs[i]);
            }
        };
        std::vector<std::thread> pool;
        auto count = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                           jobs.size());
        pool.reserve(count);
        for (std::size_t t = 0; t < count; ++t) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }
    return rows;
}

// --- report writing ---------------------------------------------------

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const char* mode_label(int self_loops) {
    if (self_loops < 0) return "na";
    return self_loops ? "true" : "false";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed for " + path.string());
}

nlohmann::json summary_cells(const std::vector<AccuracyRow>& rows) {
    nlohmann::json cells = nlohmann::json::array();
    // Rows arrive grouped by cell already (grid order), so one linear scan
    // closes a cell whenever the key changes.
    std::size_t begin = 0;
    auto same_cell = [](const AccuracyRow& a, const AccuracyRow& b) {
        return a.setting_id == b.setting_id && a.kind == b.kind &&
               a.k == b.k && a.self_loops == b.self_loops;
    };
    for (std::size_t i = 1; i <= rows.size(); ++i) {
        if (i < rows.size() && same_cell(rows[begin], rows[i])) continue;
        std::vector<double> values;
        std::size_t errors = 0;
        for (std::size_t r = begin; r < i; ++r) {
            if (rows[r].ok())
                values.push_back(rows[r].test_accuracy);
            else
                ++errors;
        }
        nlohmann::json cell{{"setting", rows[begin].setting_id},
                            {"kind", to_string(rows[begin].kind)},
                            {"k", rows[begin].k},
                            {"self_loops", mode_label(rows[begin].self_loops)},
                            {"runs_ok", values.size()},
                            {"runs_error", errors}};
        if (!values.empty()) {
            BoxStats stats = box_stats(std::move(values));
            cell["mean"] = stats.mean;
            cell["std"] = stats.std;
            cell["min"] = stats.min;
            cell["max"] = stats.max;
            cell["q1"] = stats.q1;
            cell["median"] = stats.median;
            cell["q3"] = stats.q3;
            cell["whisker_low"] = stats.whisker_low;
            cell["whisker_high"] = stats.whisker_high;
            cell["outliers"] = stats.outliers;
        }
        cells.push_back(std::move(cell));
        begin = i;
    }
    return cells;
}

}  // namespace

std::string accuracy_rows_csv(const std::vector<AccuracyRow>& rows) {
    std::string acc = "setting,kind,k,self_loops,run,seed,accuracy,error\n";
    for (const auto& row : rows) {
        acc += csv_escape(row.setting_id);
        acc += ',';
        acc += to_string(row.kind);
        acc += ',';
        acc += std::to_string(row.k);
        acc += ',';
        acc += mode_label(row.self_loops);
        acc += ',';
        acc += std::to_string(row.run_index);
        acc += ',';
        acc += std::to_string(row.seed);
        acc += ',';
        if (row.ok()) acc += format_double(row.test_accuracy);
        acc += ',';
        acc += csv_escape(row.error);
        acc += '\n';
    }
    return acc;
}

std::string walk_rows_csv(const std::vector<WalkRow>& rows) {
    std::string walks = "setting,self_loops,k,mean,std,estimate\n";
    for (const auto& row : rows) {
        walks += csv_escape(row.setting_id);
        walks += ',';
        walks += row.self_loops ? "true" : "false";
        walks += ',';
        walks += std::to_string(row.k);
        walks += ',';
        walks += format_double(row.mean_value);
        walks += ',';
        walks += format_double(row.std_value);
        walks += ',';
        if (row.estimate) walks += format_double(*row.estimate);
        walks += '\n';
    }
    return walks;
}

void emit_report(const ExperimentResult& results, const std::string& out_dir) {
    if (results.accuracy_rows.empty() && results.walk_rows.empty())
        throw ConfigError("emit_report: no rows to write");
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "accuracies.csv",
               accuracy_rows_csv(results.accuracy_rows));
    write_file(fs::path(out_dir) / "walk_stats.csv",
               walk_rows_csv(results.walk_rows));

    nlohmann::json summary{
        {"quantile_convention",
         "linear interpolation between order statistics, rank (n-1)*p"},
        {"std_convention", "population (divide by n)"},
        {"whiskers", "most extreme points within 1.5*IQR of the quartiles"},
        {"cells", summary_cells(results.accuracy_rows)}};
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
}

}  // namespace slp
