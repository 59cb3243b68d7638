#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "slp/graph.hpp"
#include "slp/matrix.hpp"
#include "slp/rng.hpp"

namespace slp {

// Probability that remembers how it was written. Values given as "a/b"
// rationals keep numerator and denominator so configs round-trip exactly
// instead of decaying to a rounded decimal.
struct Prob {
    double value = 0.0;
    std::int64_t num = 0;
    std::int64_t den = 0;  // 0 means decimal form, no exact fraction

    static Prob from_decimal(double v);
    static Prob from_rational(std::int64_t num, std::int64_t den);
    // Accepts "0.06" or "6/100".
    static Prob parse(const std::string& text);

    bool is_rational() const { return den != 0; }
    std::string to_string() const;

    bool operator==(const Prob&) const = default;
};

void to_json(nlohmann::json& j, const Prob& p);
void from_json(const nlohmann::json& j, Prob& p);

struct SbmConfig {
    int num_classes = 10;
    int nodes_per_class = 100;
    Prob p_intra;
    Prob p_inter;
    int feature_dim = 16;
    double feature_sigma = 0.4;

    // Throws ConfigError on any violated bound (probabilities open in (0,1),
    // positive sigma, enough hypercube corners for the classes).
    void validate() const;

    bool operator==(const SbmConfig&) const = default;
};

void to_json(nlohmann::json& j, const SbmConfig& c);
void from_json(const nlohmann::json& j, SbmConfig& c);

struct LabeledGraphData {
    Graph graph;
    std::vector<int> labels;
    Matrix features;
};

// Erased configuration model: stubs are shuffled uniformly and paired off;
// pairings that would create a self-loop or a duplicate edge are dropped
// after matching, so realized degrees never exceed the requested ones.
Graph configuration_model(const std::vector<int>& degrees, RngSeed seed);

// Stochastic block model with contiguous class blocks: nodes
// [i*m, (i+1)*m) carry class i, each unordered pair gets an independent
// Bernoulli edge with p_intra (same class) or p_inter. Features come from
// hypercube_features on an independent sub-stream of seed.
LabeledGraphData sbm(const SbmConfig& config, RngSeed seed);

// Class i's center is the binary expansion of i (least significant bit at
// coordinate 0) as a 0/1 vector of length dim; each feature is its class
// center plus iid Gaussian noise with the given per-coordinate sigma.
Matrix hypercube_features(const std::vector<int>& labels, int dim,
                          double sigma, RngSeed seed);

// Shared pre-statistics cleanup: drop isolated nodes, optionally keep only
// the largest connected component, and realign labels and feature rows
// through the resulting node_ids map.
LabeledGraphData clean_data(const LabeledGraphData& data,
                            bool largest_component_only = false);

}  // namespace slp
