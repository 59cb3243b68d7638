#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "slp/common.hpp"
#include "slp/experiments.hpp"
#include "slp/stats_util.hpp"
#include "test_util.hpp"

using namespace slp;

namespace {

// Reference values below come from an independent statistics stack and are
// frozen here to full double precision.

nlohmann::json tiny_plan_json() {
    nlohmann::json sbm{{"num_classes", 2},    {"nodes_per_class", 12},
                       {"p_intra", "1/3"},    {"p_inter", "1/12"},
                       {"feature_dim", 2},    {"feature_sigma", 0.4}};
    nlohmann::json setting{{"id", "tiny"}, {"sbm", sbm}};
    nlohmann::json plan;
    plan["settings"] = nlohmann::json::array({setting});
    plan["depths"] = {1, 2};
    plan["modes"] = {"with", "without"};
    plan["runs"] = 2;
    plan["model_kinds"] = {"gcn", "mlp"};
    plan["train"] = {{"epochs", 3},
                     {"learning_rate", 0.01},
                     {"train_fraction", 0.8},
                     {"dropout", 0.0}};
    plan["hidden_dim"] = 4;
    plan["walk_k_max"] = 3;
    plan["walk_runs"] = 2;
    plan["base_seed"] = 7;
    return plan;
}

}  // namespace

TEST_CASE("mean and population std") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(xs) == 2.5);
    CHECK(population_std(xs) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(population_std(std::vector<double>{5.0}) == 0.0);
}

TEST_CASE("quantiles interpolate between order statistics") {
    std::vector<double> xs{1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 9.0};
    CHECK(quantile_sorted(xs, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(quantile_sorted(xs, 0.5) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(quantile_sorted(xs, 0.75) == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(quantile_sorted(xs, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(quantile_sorted(xs, 0.0) == 1.0);
    CHECK(quantile_sorted(xs, 1.0) == 9.0);

    std::vector<double> small{1.0, 2.0, 3.0, 4.0};
    CHECK(quantile_sorted(small, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(quantile_sorted(small, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(quantile_sorted(small, 0.75) == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("box stats flag points beyond the whisker fences") {
    BoxStats s = box_stats({1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 10.0});
    CHECK(s.q1 == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(s.median == 3.0);
    CHECK(s.q3 == doctest::Approx(3.75).epsilon(1e-15));
    CHECK(s.mean == doctest::Approx(3.7142857142857144).epsilon(1e-15));
    CHECK(s.std == doctest::Approx(2.7236679949910885).epsilon(1e-14));
    CHECK(s.min == 1.0);
    CHECK(s.max == 10.0);
    // Fences are 0 and 6; the extreme points inside are 1 and 4.
    CHECK(s.whisker_low == 1.0);
    CHECK(s.whisker_high == 4.0);
    CHECK(s.outliers == std::vector<double>{10.0});
}

TEST_CASE("box stats without outliers puts whiskers at the extremes") {
    BoxStats s = box_stats({1.0, 2.0, 3.0, 4.0});
    CHECK(s.whisker_low == 1.0);
    CHECK(s.whisker_high == 4.0);
    CHECK(s.outliers.empty());
}

TEST_CASE("regularized incomplete beta against reference values") {
    CHECK(reg_incomplete_beta(0.5, 0.5, 0.3) ==
          doctest::Approx(0.36901011956554536).epsilon(1e-12));
    CHECK(reg_incomplete_beta(2.0, 3.0, 0.4) ==
          doctest::Approx(0.5247999999999999).epsilon(1e-12));
    CHECK(reg_incomplete_beta(5.5, 1.5, 0.9) ==
          doctest::Approx(0.7507799220750363).epsilon(1e-12));
    CHECK(reg_incomplete_beta(4.0, 4.0, 0.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
    // I_x(1, 1) = x and the reflection identity hold everywhere.
    for (double x : {0.1, 0.42, 0.9}) {
        CHECK(reg_incomplete_beta(1.0, 1.0, x) ==
              doctest::Approx(x).epsilon(1e-12));
        CHECK(reg_incomplete_beta(2.5, 4.0, x) ==
              doctest::Approx(1.0 - reg_incomplete_beta(4.0, 2.5, 1.0 - x))
                  .epsilon(1e-12));
    }
    CHECK(reg_incomplete_beta(1.0, 1.0, 0.0) == 0.0);
    CHECK(reg_incomplete_beta(1.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("student t cdf against reference values") {
    CHECK(student_t_cdf(1.0, 3.0) ==
          doctest::Approx(0.8044988905221148).epsilon(1e-12));
    CHECK(student_t_cdf(-2.5, 7.5) ==
          doctest::Approx(0.019410129136812757).epsilon(1e-12));
    CHECK(student_t_cdf(0.0, 4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(student_t_cdf(3.2, 1.0) ==
          doctest::Approx(0.9035887520207704).epsilon(1e-12));
    CHECK(student_t_cdf(-0.7, 12.0) ==
          doctest::Approx(0.2486370768953537).epsilon(1e-12));
    for (double t : {0.3, 1.7, 4.2})
        CHECK(student_t_cdf(t, 5.0) + student_t_cdf(-t, 5.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("welch test against reference values") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b{2.0, 3.0, 4.0, 5.0, 6.0};
    WelchResult r = welch_t_test(a, b);
    CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.p_greater == doctest::Approx(0.8267032464563329).epsilon(1e-12));

    std::vector<double> c{2.9, 3.1, 3.3, 2.8, 3.4, 3.0, 3.2};
    std::vector<double> d{2.5, 2.7, 2.4, 2.6};
    r = welch_t_test(c, d);
    CHECK(r.t == doctest::Approx(5.284229075567876).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(8.89473684210526).epsilon(1e-12));
    CHECK(r.p_greater ==
          doctest::Approx(0.0002621239995090877).epsilon(1e-10));
}

TEST_CASE("welch test rejects degenerate inputs") {
    std::vector<double> one{1.0};
    std::vector<double> two{1.0, 2.0};
    std::vector<double> flat{3.0, 3.0, 3.0};
    CHECK_THROWS_AS(welch_t_test(one, two), NumericError);
    CHECK_THROWS_AS(welch_t_test(flat, flat), NumericError);
}

TEST_CASE("plan json applies defaults and overrides") {
    nlohmann::json j = tiny_plan_json();
    ExperimentPlan plan = plan_from_json(j);
    CHECK(plan.settings.size() == 1);
    CHECK(plan.settings[0].id == "tiny");
    CHECK(plan.settings[0].sbm->nodes_per_class == 12);
    CHECK(plan.depths == std::vector<int>{1, 2});
    CHECK(plan.modes == std::vector<bool>{true, false});
    CHECK(plan.runs == 2);
    CHECK(plan.epochs == 3);
    CHECK(plan.dropout.has_value());
    CHECK(*plan.dropout == 0.0);
    CHECK(plan.base_seed.value == 7);

    nlohmann::json minimal{{"settings", j["settings"]}};
    ExperimentPlan defaults = plan_from_json(minimal);
    CHECK(defaults.depths == std::vector<int>{1, 2, 3, 4, 5, 6});
    CHECK(defaults.runs == 50);
    CHECK(defaults.epochs == 70);
    CHECK(defaults.learning_rate == 0.01);
    CHECK_FALSE(defaults.dropout.has_value());
    CHECK(defaults.hidden_dim == 16);
    CHECK(defaults.walk_runs == 10);
}

TEST_CASE("plan json rejects malformed input") {
    nlohmann::json j = tiny_plan_json();
    j["surprise"] = 1;
    CHECK_THROWS_WITH_AS(plan_from_json(j), doctest::Contains("surprise"),
                         ConfigError);

    j = tiny_plan_json();
    j["settings"][0]["extra"] = 1;
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);

    j = tiny_plan_json();
    j["train"]["momentum"] = 0.9;
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);

    j = tiny_plan_json();
    j["modes"] = {"sometimes"};
    CHECK_THROWS_WITH_AS(plan_from_json(j), doctest::Contains("sometimes"),
                         ConfigError);

    j = tiny_plan_json();
    j["settings"][0].erase("sbm");
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);

    j = tiny_plan_json();
    j["settings"].push_back(j["settings"][0]);
    CHECK_THROWS_WITH_AS(plan_from_json(j), doctest::Contains("duplicate"),
                         ConfigError);

    j = tiny_plan_json();
    j["runs"] = 0;
    CHECK_THROWS_AS(plan_from_json(j), ConfigError);
}

TEST_CASE("plans load from disk with parse errors wrapped") {
    auto dir = test::temp_dir("plan_load");
    auto good = dir / "plan.json";
    test::write_file(good, tiny_plan_json().dump());
    ExperimentPlan plan = load_plan(good.string());
    CHECK(plan.settings[0].id == "tiny");

    auto bad = dir / "broken.json";
    test::write_file(bad, "{ not json");
    CHECK_THROWS_AS(load_plan(bad.string()), DataError);
    CHECK_THROWS_AS(load_plan((dir / "missing.json").string()), DataError);
}

TEST_CASE("the accuracy grid enumerates cells in plan order") {
    ExperimentPlan plan = plan_from_json(tiny_plan_json());
    std::vector<AccuracyRow> rows = run_accuracy_grid(plan);
    // gcn: 2 depths x 2 modes x 2 runs; mlp: 2 depths x 1 x 2 runs.
    REQUIRE(rows.size() == 12);
    for (const auto& row : rows) {
        CHECK(row.setting_id == "tiny");
        CHECK(row.ok());
        CHECK(row.test_accuracy >= 0.0);
        CHECK(row.test_accuracy <= 1.0);
    }
    // First the gcn block: depth 1 with, depth 1 without, depth 2 ...
    CHECK(to_string(rows[0].kind) == "gcn");
    CHECK(rows[0].k == 1);
    CHECK(rows[0].self_loops == 1);
    CHECK(rows[0].run_index == 0);
    CHECK(rows[1].run_index == 1);
    CHECK(rows[2].self_loops == 0);
    CHECK(rows[4].k == 2);
    // Then the mlp block with the mode axis collapsed.
    for (std::size_t i = 8; i < 12; ++i) {
        CHECK(to_string(rows[i].kind) == "mlp");
        CHECK(rows[i].self_loops == -1);
    }
    CHECK(rows[8].k == 1);
    CHECK(rows[10].k == 2);

    std::set<std::uint64_t> seeds;
    for (const auto& row : rows) seeds.insert(row.seed);
    CHECK(seeds.size() == 12);
}

TEST_CASE("the accuracy grid is deterministic and worker-count invariant") {
    ExperimentPlan plan = plan_from_json(tiny_plan_json());
    std::string first = accuracy_rows_csv(run_accuracy_grid(plan));
    std::string second = accuracy_rows_csv(run_accuracy_grid(plan));
    std::string threaded = accuracy_rows_csv(run_accuracy_grid(plan, 3));
    CHECK(first == second);
    CHECK(first == threaded);
}

TEST_CASE("failed runs keep their row with the error recorded") {
    nlohmann::json j = tiny_plan_json();
    // A single node per class with no possible intra edges: after cleaning
    // the graph is empty and every training run fails.
    j["settings"][0]["sbm"]["num_classes"] = 1;
    j["settings"][0]["sbm"]["nodes_per_class"] = 1;
    ExperimentPlan plan = plan_from_json(j);
    std::vector<AccuracyRow> rows = run_accuracy_grid(plan);
    REQUIRE(rows.size() == 12);
    for (const auto& row : rows) {
        CHECK_FALSE(row.ok());
        CHECK_FALSE(row.error.empty());
    }
    std::string csv = accuracy_rows_csv(rows);
    // The accuracy column stays empty on error rows.
    CHECK(csv.find(",,") != std::string::npos);
}

TEST_CASE("walk tables pool nodes over graphs and carry small-k estimates") {
    ExperimentPlan plan = plan_from_json(tiny_plan_json());
    std::vector<WalkRow> rows = run_walk_tables(plan);
    REQUIRE(rows.size() == 6);  // 2 modes x k = 1..3
    // Mode order follows the plan: with-loops first, then without.
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows[i].self_loops);
        CHECK(rows[i].k == static_cast<int>(i) + 1);
    }
    for (std::size_t i = 3; i < 6; ++i) CHECK_FALSE(rows[i].self_loops);

    const WalkRow& with_k1 = rows[0];
    REQUIRE(with_k1.estimate.has_value());
    CHECK(with_k1.mean_value > 0.0);
    CHECK(*with_k1.estimate > 0.0);
    CHECK(std::abs(with_k1.mean_value - *with_k1.estimate) < 0.05);

    const WalkRow& without_k1 = rows[3];
    CHECK(without_k1.mean_value == 0.0);
    CHECK(without_k1.std_value == 0.0);
    REQUIRE(without_k1.estimate.has_value());
    CHECK(*without_k1.estimate == 0.0);

    REQUIRE(rows[1].estimate.has_value());  // k = 2 with
    REQUIRE(rows[4].estimate.has_value());  // k = 2 without
    CHECK_FALSE(rows[2].estimate.has_value());  // k = 3 carries none
    CHECK_FALSE(rows[5].estimate.has_value());

    CHECK(walk_rows_csv(rows) == walk_rows_csv(run_walk_tables(plan)));
}

TEST_CASE("external datasets round-trip through ingest") {
    auto dir = test::temp_dir("ingest");
    test::write_file(dir / "edges.txt", "0 1\n1 3\n");
    test::write_file(dir / "features.csv",
                     "1.5,2\n3,4\n5,6\n7,8.25\n");
    test::write_file(dir / "labels.csv", "0,1\n1,0\n2,1\n3,0\n");
    ExternalDataset ds{(dir / "edges.txt").string(),
                       (dir / "features.csv").string(),
                       (dir / "labels.csv").string()};
    LabeledGraphData data = ingest_external(ds);
    // Node 2 is isolated and dropped; the rest keep their rows.
    CHECK(data.graph.num_nodes() == 3);
    CHECK(data.graph.node_ids() == std::vector<NodeId>{0, 1, 3});
    CHECK(data.labels == std::vector<int>{1, 0, 0});
    CHECK(data.features(0, 0) == 1.5);
    CHECK(data.features(2, 1) == 8.25);
}

TEST_CASE("ingest reports malformed files with their location") {
    auto dir = test::temp_dir("ingest_bad");
    test::write_file(dir / "edges.txt", "0 1\n");
    test::write_file(dir / "ragged.csv", "1,2\n3\n");
    test::write_file(dir / "labels.csv", "0,0\n1,1\n");
    ExternalDataset ragged{(dir / "edges.txt").string(),
                           (dir / "ragged.csv").string(),
                           (dir / "labels.csv").string()};
    CHECK_THROWS_WITH_AS(ingest_external(ragged), doctest::Contains(":2"),
                         DataError);

    test::write_file(dir / "features.csv", "1,2\n3,4\n");
    test::write_file(dir / "dup.csv", "0,0\n0,1\n");
    ExternalDataset dup{(dir / "edges.txt").string(),
                        (dir / "features.csv").string(),
                        (dir / "dup.csv").string()};
    CHECK_THROWS_WITH_AS(ingest_external(dup), doctest::Contains("duplicate"),
                         DataError);

    test::write_file(dir / "short.csv", "0,0\n");
    ExternalDataset missing{(dir / "edges.txt").string(),
                            (dir / "features.csv").string(),
                            (dir / "short.csv").string()};
    CHECK_THROWS_WITH_AS(ingest_external(missing),
                         doctest::Contains("no label"), DataError);

    test::write_file(dir / "bad_num.csv", "1,2\n3,oops\n");
    ExternalDataset bad_num{(dir / "edges.txt").string(),
                            (dir / "bad_num.csv").string(),
                            (dir / "labels.csv").string()};
    CHECK_THROWS_WITH_AS(ingest_external(bad_num), doctest::Contains("oops"),
                         DataError);
}

TEST_CASE("feature matrices round-trip through csv") {
    Matrix x(2, 3);
    x(0, 0) = 0.1;
    x(0, 1) = -2.0;
    x(0, 2) = 1e-17;
    x(1, 0) = 123456.75;
    x(1, 1) = 0.0;
    x(1, 2) = 1.0 / 3.0;
    auto dir = test::temp_dir("feature_rt");
    {
        std::ofstream out(dir / "x.csv");
        write_features_csv(x, out);
    }
    Matrix back = read_feature_csv((dir / "x.csv").string());
    CHECK(back == x);
}

TEST_CASE("reports render stable csv with escaping") {
    AccuracyRow good;
    good.setting_id = "a,b";
    good.kind = ModelKind::mlp;
    good.k = 2;
    good.self_loops = -1;
    good.run_index = 3;
    good.seed = 42;
    good.test_accuracy = 0.5;
    AccuracyRow failed;
    failed.setting_id = "tiny";
    failed.kind = ModelKind::gcn;
    failed.k = 1;
    failed.self_loops = 1;
    failed.run_index = 0;
    failed.seed = 7;
    failed.error = "went \"sideways\"";
    CHECK(accuracy_rows_csv({good, failed}) ==
          "setting,kind,k,self_loops,run,seed,accuracy,error\n"
          "\"a,b\",mlp,2,na,3,42,0.5,\n"
          "tiny,gcn,1,true,0,7,,\"went \"\"sideways\"\"\"\n");

    WalkRow w1;
    w1.setting_id = "tiny";
    w1.self_loops = true;
    w1.k = 1;
    w1.mean_value = 0.25;
    w1.std_value = 0.125;
    w1.estimate = 0.2;
    WalkRow w2 = w1;
    w2.self_loops = false;
    w2.k = 3;
    w2.estimate.reset();
    CHECK(walk_rows_csv({w1, w2}) ==
          "setting,self_loops,k,mean,std,estimate\n"
          "tiny,true,1,0.25,0.125,0.2\n"
          "tiny,false,3,0.25,0.125,\n");
}

TEST_CASE("emit_report writes the three artifacts") {
    ExperimentResult result;
    AccuracyRow row;
    row.setting_id = "tiny";
    row.kind = ModelKind::gcn;
    row.k = 1;
    row.self_loops = 0;
    row.seed = 1;
    row.test_accuracy = 0.75;
    result.accuracy_rows = {row, row};
    result.accuracy_rows[1].run_index = 1;
    result.accuracy_rows[1].test_accuracy = 0.25;
    WalkRow walk;
    walk.setting_id = "tiny";
    walk.k = 1;
    result.walk_rows = {walk};

    auto dir = test::temp_dir("report");
    emit_report(result, dir.string());
    CHECK(test::read_file(dir / "accuracies.csv") ==
          accuracy_rows_csv(result.accuracy_rows));
    CHECK(test::read_file(dir / "walk_stats.csv") ==
          walk_rows_csv(result.walk_rows));

    nlohmann::json summary;
    std::ifstream in(dir / "summary.json");
    in >> summary;
    CHECK(summary["std_convention"] == "population (divide by n)");
    REQUIRE(summary["cells"].size() == 1);
    const auto& cell = summary["cells"][0];
    CHECK(cell["setting"] == "tiny");
    CHECK(cell["runs_ok"] == 2);
    CHECK(cell["runs_error"] == 0);
    CHECK(cell["mean"] == 0.5);
    CHECK(cell["median"] == 0.5);
}
