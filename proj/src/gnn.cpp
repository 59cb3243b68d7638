#include "slp/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slp/common.hpp"

namespace slp {

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "gcn") return ModelKind::gcn;
    if (s == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model kind \"" + s + "\" (want gcn or mlp)");
}

std::string to_string(ModelKind kind) {
    return kind == ModelKind::gcn ? "gcn" : "mlp";
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (learning_rate <= 0.0)
        throw ConfigError("train: learning_rate must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train: train_fraction must lie in (0, 1)");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw ConfigError("train: dropout must lie in [0, 1)");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
        !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw ConfigError("train: adam betas must lie in [0, 1)");
    if (adam_eps <= 0.0) throw ConfigError("train: adam_eps must be positive");
}

CsrMatrix propagation_matrix(const Graph& g, bool self_loops, ModelKind kind) {
    if (kind == ModelKind::mlp) return CsrMatrix::identity(g.num_nodes());
    Graph ga = set_self_loops(g, self_loops);
    std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(ga.num_nodes()));
    for (NodeId v = 0; v < ga.num_nodes(); ++v) {
        NodeId d = ga.degree(v);
        if (d == 0)
            throw NumericError("propagation_matrix: node " + std::to_string(v) +
                               " has degree 0, normalization undefined");
        inv_sqrt_deg[static_cast<std::size_t>(v)] =
            1.0 / std::sqrt(static_cast<double>(d));
    }
    return CsrMatrix::from_graph(ga, [&](NodeId v, NodeId u) {
        return inv_sqrt_deg[static_cast<std::size_t>(v)] *
               inv_sqrt_deg[static_cast<std::size_t>(u)];
    });
}

GcnModel init_model(const ModelConfig& config, int in_dim, int num_classes,
                    RngSeed seed) {
    if (config.num_layers < 1)
        throw ConfigError("model: num_layers must be >= 1");
    if (config.hidden_dim < 1)
        throw ConfigError("model: hidden_dim must be >= 1");
    if (in_dim < 1 || num_classes < 1)
        throw ConfigError("model: in_dim and num_classes must be >= 1");
    GcnModel model;
    model.kind = config.kind;
    model.self_loops = config.self_loops;
    model.hidden_dim = config.hidden_dim;
    model.hidden_activation = config.hidden_activation;
    Rng rng(seed);
    for (int l = 0; l < config.num_layers; ++l) {
        int fan_in = l == 0 ? in_dim : config.hidden_dim;
        int fan_out = l == config.num_layers - 1 ? num_classes
                                                 : config.hidden_dim;
        GcnLayer layer;
        layer.weight = Matrix(static_cast<std::size_t>(fan_in),
                              static_cast<std::size_t>(fan_out));
        double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& w : layer.weight.data()) w = rng.uniform(-limit, limit);
        layer.bias.assign(static_cast<std::size_t>(fan_out), 0.0);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

nlohmann::json model_to_json(const GcnModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        layers.push_back({{"in", layer.weight.rows()},
                          {"out", layer.weight.cols()},
                          {"weight", layer.weight.data()},
                          {"bias", layer.bias}});
    }
    return {{"version", 1},
            {"kind", to_string(model.kind)},
            {"self_loops", model.self_loops},
            {"hidden_dim", model.hidden_dim},
            {"activation", model.hidden_activation == Activation::relu
                               ? "relu"
                               : "identity"},
            {"layers", std::move(layers)}};
}

namespace {

void apply_activation(Matrix& z, Activation act) {
    if (act == Activation::identity) return;
    for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
}

}  // namespace

Matrix forward(const GcnModel& model, const CsrMatrix& s, const Matrix& x,
               double dropout, Rng* dropout_rng, ForwardCache* cache) {
    if (model.layers.empty()) throw ConfigError("forward: model has no layers");
    if (x.rows() != static_cast<std::size_t>(s.num_rows()))
        throw ConfigError("forward: feature rows do not match graph size");
    if (dropout > 0.0 && dropout_rng == nullptr)
        throw ConfigError("forward: dropout needs an rng");
    if (cache) {
        *cache = ForwardCache{};
        cache->activations.push_back(x);
    }
    const int num_layers = model.num_layers();
    Matrix h = x;
    for (int l = 0; l < num_layers; ++l) {
        const GcnLayer& layer = model.layers[static_cast<std::size_t>(l)];
        if (h.cols() != layer.weight.rows())
            throw ConfigError("forward: dimension mismatch at layer " +
                              std::to_string(l));
        Matrix propagated = s.apply(h);
        Matrix z = matmul(propagated, layer.weight);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            double* zi = z.row(i);
            for (std::size_t j = 0; j < z.cols(); ++j) zi[j] += layer.bias[j];
        }
        if (cache) {
            cache->propagated.push_back(std::move(propagated));
            cache->pre_activation.push_back(z);
        }
        if (l + 1 < num_layers) {
            apply_activation(z, model.hidden_activation);
            if (dropout > 0.0) {
                // Inverted dropout: surviving activations are rescaled here
                // so inference needs no correction.
                Matrix scale(z.rows(), z.cols());
                double keep = 1.0 - dropout;
                for (double& m : scale.data())
                    m = dropout_rng->next_double() < keep ? 1.0 / keep : 0.0;
                for (std::size_t i = 0; i < z.data().size(); ++i)
                    z.data()[i] *= scale.data()[i];
                if (cache) cache->dropout_scale.push_back(std::move(scale));
            }
        }
        if (cache) cache->activations.push_back(z);
        h = std::move(z);
    }
    return h;
}

double loss_and_grads(const GcnModel& model, const CsrMatrix& s,
                      const Matrix& x, const std::vector<int>& labels,
                      const std::vector<std::uint8_t>& train_mask,
                      double dropout, Rng* dropout_rng, Gradients* grads) {
    if (labels.size() != x.rows() || train_mask.size() != x.rows())
        throw ConfigError("loss_and_grads: labels/mask size mismatch");
    ForwardCache cache;
    Matrix logits = forward(model, s, x, dropout, dropout_rng, &cache);
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    std::size_t masked = 0;
    for (std::uint8_t m : train_mask) masked += m != 0;
    if (masked == 0) throw ConfigError("loss_and_grads: empty train set");

    double loss = 0.0;
    Matrix dz(n, c);
    const double inv_m = 1.0 / static_cast<double>(masked);
    for (std::size_t v = 0; v < n; ++v) {
        if (!train_mask[v]) continue;
        int label = labels[v];
        if (label < 0 || static_cast<std::size_t>(label) >= c)
            throw DataError("loss_and_grads: label out of range at node " +
                            std::to_string(v));
        const double* zv = logits.row(v);
        double zmax = zv[0];
        for (std::size_t j = 1; j < c; ++j) zmax = std::max(zmax, zv[j]);
        double sum_exp = 0.0;
        for (std::size_t j = 0; j < c; ++j) sum_exp += std::exp(zv[j] - zmax);
        double log_z = zmax + std::log(sum_exp);
        loss += (log_z - zv[static_cast<std::size_t>(label)]) * inv_m;
        double* dzv = dz.row(v);
        for (std::size_t j = 0; j < c; ++j) {
            double p = std::exp(zv[j] - log_z);
            dzv[j] = (p - (static_cast<std::size_t>(label) == j ? 1.0 : 0.0)) *
                     inv_m;
        }
    }
    if (grads == nullptr) return loss;

    const int num_layers = model.num_layers();
    grads->weight.assign(static_cast<std::size_t>(num_layers), Matrix{});
    grads->bias.assign(static_cast<std::size_t>(num_layers), {});
    Matrix dcur = std::move(dz);  // gradient of loss wrt Z^(l)
    for (int l = num_layers - 1; l >= 0; --l) {
        auto li = static_cast<std::size_t>(l);
        grads->weight[li] = matmul_at_b(cache.propagated[li], dcur);
        auto& db = grads->bias[li];
        db.assign(model.layers[li].bias.size(), 0.0);
        for (std::size_t i = 0; i < dcur.rows(); ++i) {
            const double* di = dcur.row(i);
            for (std::size_t j = 0; j < db.size(); ++j) db[j] += di[j];
        }
        if (l == 0) break;
        // dH^(l-1) = S^T (dZ W^T); S is symmetric so apply() serves both
        // directions.
        Matrix dh = s.apply(matmul_a_bt(dcur, model.layers[li].weight));
        if (dropout > 0.0) {
            const Matrix& scale = cache.dropout_scale[li - 1];
            for (std::size_t i = 0; i < dh.data().size(); ++i)
                dh.data()[i] *= scale.data()[i];
        }
        if (model.hidden_activation == Activation::relu) {
            const Matrix& z = cache.pre_activation[li - 1];
            for (std::size_t i = 0; i < dh.data().size(); ++i)
                if (z.data()[i] <= 0.0) dh.data()[i] = 0.0;
        }
        dcur = std::move(dh);
    }
    return loss;
}

double accuracy(const Matrix& logits, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    if (labels.size() != logits.rows() || mask.size() != logits.rows())
        throw ConfigError("accuracy: size mismatch");
    std::size_t total = 0;
    std::size_t correct = 0;
    for (std::size_t v = 0; v < logits.rows(); ++v) {
        if (!mask[v]) continue;
        ++total;
        const double* row = logits.row(v);
        std::size_t best = 0;
        for (std::size_t j = 1; j < logits.cols(); ++j)
            if (row[j] > row[best]) best = j;
        if (static_cast<std::size_t>(labels[v]) == best) ++correct;
    }
    if (total == 0) throw ConfigError("accuracy: empty mask");
    return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<std::vector<double>> mb, vb;
};

void adam_step(std::vector<double>& param, const std::vector<double>& grad,
               std::vector<double>& m, std::vector<double>& v,
               const TrainConfig& cfg, double bias1, double bias2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * grad[i];
        v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        double m_hat = m[i] / bias1;
        double v_hat = v[i] / bias2;
        param[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

}  // namespace

TrainResult train(const Graph& g, const LabeledGraphData& data,
                  const ModelConfig& model_config, const TrainConfig& config) {
    config.validate();
    const NodeId n = g.num_nodes();
    if (n < 2)
        throw ConfigError("train: need at least 2 nodes for a nonempty split");
    if (data.labels.size() != static_cast<std::size_t>(n) ||
        data.features.rows() != static_cast<std::size_t>(n))
        throw DataError("train: labels/features do not match graph size");
    int num_classes = 0;
    for (int label : data.labels) {
        if (label < 0) throw DataError("train: negative label");
        num_classes = std::max(num_classes, label + 1);
    }

    // Stream 0: split, stream 1: weight init, stream 2: dropout. Keeping
    // them separate means toggling dropout does not move the split.
    Rng split_rng(derive_seed(config.seed, 0));
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(order);
    auto num_train = static_cast<std::size_t>(std::llround(
        config.train_fraction * static_cast<double>(n)));
    num_train = std::clamp<std::size_t>(num_train, 1,
                                        static_cast<std::size_t>(n) - 1);
    std::vector<std::uint8_t> train_mask(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < num_train; ++i)
        train_mask[static_cast<std::size_t>(order[i])] = 1;

    GcnModel model = init_model(model_config,
                                static_cast<int>(data.features.cols()),
                                num_classes, derive_seed(config.seed, 1));
    Rng dropout_rng(derive_seed(config.seed, 2));
    CsrMatrix s = propagation_matrix(g, model_config.self_loops,
                                     model_config.kind);

    AdamState adam;
    for (const auto& layer : model.layers) {
        adam.mw.emplace_back(layer.weight.rows(), layer.weight.cols());
        adam.vw.emplace_back(layer.weight.rows(), layer.weight.cols());
        adam.mb.emplace_back(layer.bias.size(), 0.0);
        adam.vb.emplace_back(layer.bias.size(), 0.0);
    }

    Gradients grads;
    double last_loss = 0.0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        last_loss = loss_and_grads(model, s, data.features, data.labels,
                                   train_mask, config.dropout, &dropout_rng,
                                   &grads);
        double bias1 = 1.0 - std::pow(config.adam_beta1, epoch);
        double bias2 = 1.0 - std::pow(config.adam_beta2, epoch);
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            adam_step(model.layers[l].weight.data(), grads.weight[l].data(),
                      adam.mw[l].data(), adam.vw[l].data(), config, bias1,
                      bias2);
            adam_step(model.layers[l].bias, grads.bias[l], adam.mb[l],
                      adam.vb[l], config, bias1, bias2);
        }
    }

    Matrix logits = forward(model, s, data.features);
    std::vector<std::uint8_t> test_mask(train_mask.size());
    for (std::size_t v = 0; v < train_mask.size(); ++v)
        test_mask[v] = train_mask[v] ? 0 : 1;
    TrainResult result;
    result.test_accuracy = accuracy(logits, data.labels, test_mask);
    result.final_train_loss = last_loss;
    result.model = std::move(model);
    result.train_mask = std::move(train_mask);
    return result;
}

double influence_ratio(const Graph& g, bool self_loops, int k, NodeId u,
                       NodeId v) {
    if (k < 1) throw ConfigError("influence_ratio: k must be >= 1");
    if (u < 0 || v < 0 || u >= g.num_nodes() || v >= g.num_nodes())
        throw ConfigError("influence_ratio: node out of range");
    Graph ga = set_self_loops(g, self_loops);
    const auto n = static_cast<std::size_t>(ga.num_nodes());
    // The depth-k map h -> A^k h is linear, so its Jacobian is A^k itself:
    // pushing the basis vector e_u through k steps yields the column of
    // partial derivatives d h_.^(k) / d h_u^(0), and pushing the all-ones
    // vector yields each row's total derivative mass.
    std::vector<double> basis(n, 0.0), ones(n, 1.0);
    basis[static_cast<std::size_t>(u)] = 1.0;
    std::vector<double> next(n);
    for (int step = 0; step < k; ++step) {
        for (auto* vec : {&basis, &ones}) {
            std::fill(next.begin(), next.end(), 0.0);
            for (NodeId w = 0; w < ga.num_nodes(); ++w) {
                double acc = 0.0;
                for (NodeId nb : ga.neighbors(w))
                    acc += (*vec)[static_cast<std::size_t>(nb)];
                next[static_cast<std::size_t>(w)] = acc;
            }
            vec->swap(next);
        }
    }
    double denominator = ones[static_cast<std::size_t>(v)];
    if (denominator == 0.0)
        throw NumericError("influence_ratio: node " + std::to_string(v) +
                           " receives no length-" + std::to_string(k) +
                           " walks");
    return basis[static_cast<std::size_t>(v)] / denominator;
}

}  // namespace slp
