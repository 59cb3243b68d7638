#include "slp/ensembles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "slp/common.hpp"

namespace slp {

Prob Prob::from_decimal(double v) {
    Prob p;
    p.value = v;
    return p;
}

Prob Prob::from_rational(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw ConfigError("probability: denominator must be positive");
    if (num < 0) throw ConfigError("probability: numerator must be non-negative");
    Prob p;
    p.num = num;
    p.den = den;
    p.value = static_cast<double>(num) / static_cast<double>(den);
    return p;
}

Prob Prob::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t num = 0, den = 0;
        auto r1 = std::from_chars(text.data(), text.data() + slash, num);
        auto r2 = std::from_chars(text.data() + slash + 1,
                                  text.data() + text.size(), den);
        if (r1.ec != std::errc{} || r1.ptr != text.data() + slash ||
            r2.ec != std::errc{} || r2.ptr != text.data() + text.size()) {
            throw ConfigError("probability: cannot parse rational \"" + text +
                              "\"");
        }
        return from_rational(num, den);
    }
    double v = 0.0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
        throw ConfigError("probability: cannot parse \"" + text + "\"");
    return from_decimal(v);
}

std::string Prob::to_string() const {
    if (is_rational())
        return std::to_string(num) + "/" + std::to_string(den);
    return format_double(value);
}

void to_json(nlohmann::json& j, const Prob& p) {
    if (p.is_rational())
        j = p.to_string();
    else
        j = p.value;
}

void from_json(const nlohmann::json& j, Prob& p) {
    if (j.is_string())
        p = Prob::parse(j.get<std::string>());
    else if (j.is_number())
        p = Prob::from_decimal(j.get<double>());
    else
        throw ConfigError("probability: expected number or \"a/b\" string");
}

void SbmConfig::validate() const {
    if (num_classes < 1) throw ConfigError("sbm: num_classes must be >= 1");
    if (nodes_per_class < 1)
        throw ConfigError("sbm: nodes_per_class must be >= 1");
    for (const Prob* p : {&p_intra, &p_inter}) {
        if (!(p->value > 0.0 && p->value < 1.0))
            throw ConfigError("sbm: probabilities must lie in (0, 1), got " +
                              p->to_string());
    }
    if (feature_sigma <= 0.0)
        throw ConfigError("sbm: feature_sigma must be positive");
    if (feature_dim < 1 || feature_dim > 62 ||
        (std::int64_t{1} << feature_dim) < num_classes) {
        throw ConfigError("sbm: feature_dim " + std::to_string(feature_dim) +
                          " gives too few hypercube corners for " +
                          std::to_string(num_classes) + " classes");
    }
}

void to_json(nlohmann::json& j, const SbmConfig& c) {
    j = nlohmann::json{{"num_classes", c.num_classes},
                       {"nodes_per_class", c.nodes_per_class},
                       {"p_intra", c.p_intra},
                       {"p_inter", c.p_inter},
                       {"feature_dim", c.feature_dim},
                       {"feature_sigma", c.feature_sigma}};
}

void from_json(const nlohmann::json& j, SbmConfig& c) {
    c.num_classes = j.at("num_classes").get<int>();
    c.nodes_per_class = j.at("nodes_per_class").get<int>();
    c.p_intra = j.at("p_intra").get<Prob>();
    c.p_inter = j.at("p_inter").get<Prob>();
    c.feature_dim = j.value("feature_dim", 16);
    c.feature_sigma = j.value("feature_sigma", 0.4);
}

Graph configuration_model(const std::vector<int>& degrees, RngSeed seed) {
    if (degrees.empty())
        throw ConfigError("configuration_model: empty degree sequence");
    std::int64_t stub_sum = 0;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        if (degrees[v] < 0)
            throw ConfigError("configuration_model: negative degree at node " +
                              std::to_string(v));
        stub_sum += degrees[v];
    }
    if (stub_sum % 2 != 0)
        throw ConfigError("configuration_model: odd stub sum " +
                          std::to_string(stub_sum));
    std::vector<NodeId> stubs;
    stubs.reserve(static_cast<std::size_t>(stub_sum));
    for (std::size_t v = 0; v < degrees.size(); ++v)
        stubs.insert(stubs.end(), static_cast<std::size_t>(degrees[v]),
                     static_cast<NodeId>(v));
    Rng rng(seed);
    // A uniform shuffle followed by consecutive pairing is a uniform random
    // perfect matching of the stubs.
    rng.shuffle(stubs);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(stubs.size() / 2);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
        pairs.emplace_back(stubs[i], stubs[i + 1]);
    // from_edge_list drops self-pairs and collapses duplicates, which is
    // exactly the erasure step.
    return Graph::from_edge_list(pairs, static_cast<NodeId>(degrees.size()));
}

LabeledGraphData sbm(const SbmConfig& config, RngSeed seed) {
    config.validate();
    const NodeId n =
        static_cast<NodeId>(config.num_classes) * config.nodes_per_class;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v)
        labels[static_cast<std::size_t>(v)] = v / config.nodes_per_class;

    Rng edge_rng(derive_seed(seed, 0));
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            double p = labels[static_cast<std::size_t>(u)] ==
                               labels[static_cast<std::size_t>(v)]
                           ? config.p_intra.value
                           : config.p_inter.value;
            if (edge_rng.bernoulli(p)) pairs.emplace_back(u, v);
        }
    }
    LabeledGraphData data;
    data.graph = Graph::from_edge_list(pairs, n);
    data.labels = std::move(labels);
    data.features = hypercube_features(data.labels, config.feature_dim,
                                       config.feature_sigma,
                                       derive_seed(seed, 1));
    return data;
}

Matrix hypercube_features(const std::vector<int>& labels, int dim,
                          double sigma, RngSeed seed) {
    if (dim < 1 || dim > 62)
        throw ConfigError("hypercube_features: dim out of range");
    if (sigma <= 0.0)
        throw ConfigError("hypercube_features: sigma must be positive");
    int max_label = labels.empty()
                        ? 0
                        : *std::max_element(labels.begin(), labels.end());
    if ((std::int64_t{1} << dim) <= max_label)
        throw ConfigError("hypercube_features: too few corners for class " +
                          std::to_string(max_label));
    Rng rng(seed);
    Matrix x(labels.size(), static_cast<std::size_t>(dim));
    for (std::size_t v = 0; v < labels.size(); ++v) {
        if (labels[v] < 0)
            throw ConfigError("hypercube_features: negative label");
        for (int j = 0; j < dim; ++j) {
            double center = static_cast<double>((labels[v] >> j) & 1);
            x(v, static_cast<std::size_t>(j)) =
                center + sigma * rng.next_normal();
        }
    }
    return x;
}

LabeledGraphData clean_data(const LabeledGraphData& data,
                            bool largest_component_only) {
    if (data.labels.size() != static_cast<std::size_t>(data.graph.num_nodes()) ||
        data.features.rows() != data.labels.size()) {
        throw DataError("clean_data: labels/features/graph size mismatch");
    }
    Graph g = remove_isolated(data.graph);
    if (largest_component_only) g = largest_component(g);
    LabeledGraphData out;
    out.labels.reserve(static_cast<std::size_t>(g.num_nodes()));
    out.features = Matrix(static_cast<std::size_t>(g.num_nodes()),
                          data.features.cols());
    const auto& ids = g.node_ids();
    for (std::size_t v = 0; v < ids.size(); ++v) {
        auto orig = static_cast<std::size_t>(ids[v]);
        out.labels.push_back(data.labels[orig]);
        for (std::size_t j = 0; j < data.features.cols(); ++j)
            out.features(v, j) = data.features(orig, j);
    }
    out.graph = std::move(g);
    return out;
}

}  // namespace slp
