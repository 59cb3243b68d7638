#pragma once

#include <string>
#include <vector>

#include "slp/ensembles.hpp"
#include "slp/graph.hpp"
#include "slp/matrix.hpp"
#include "slp/rng.hpp"

namespace slp {

enum class ModelKind { gcn, mlp };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind kind);

// Hidden-layer nonlinearity. identity exists for the linear variant used
// in tests (a k-layer linear model computes S^k X exactly).
enum class Activation { relu, identity };

struct GcnLayer {
    Matrix weight;  // in_dim x out_dim
    std::vector<double> bias;
};

struct GcnModel {
    ModelKind kind = ModelKind::gcn;
    bool self_loops = true;  // meaningful for gcn only
    int hidden_dim = 16;
    Activation hidden_activation = Activation::relu;
    std::vector<GcnLayer> layers;

    int num_layers() const { return static_cast<int>(layers.size()); }
};

nlohmann::json model_to_json(const GcnModel& model);

struct ModelConfig {
    ModelKind kind = ModelKind::gcn;
    bool self_loops = true;
    int num_layers = 2;
    int hidden_dim = 16;
    Activation hidden_activation = Activation::relu;
};

struct TrainConfig {
    int epochs = 70;
    double learning_rate = 0.01;
    double train_fraction = 0.8;
    double dropout = 0.0;  // 0.2 for the real-world protocol
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    RngSeed seed;

    void validate() const;
};

// Symmetric propagation step of one layer: D^(-1/2) A D^(-1/2) over the
// graph with self-loops toggled per the flag (degrees taken from the same
// toggled adjacency), or the identity for an mlp. Zero-degree nodes make
// the normalization undefined.
CsrMatrix propagation_matrix(const Graph& g, bool self_loops, ModelKind kind);

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
GcnModel init_model(const ModelConfig& config, int in_dim, int num_classes,
                    RngSeed seed);

// Intermediates retained by forward for the backward pass. activations[0]
// is the input; dropout_scale entries are 0 or 1/(1-p).
struct ForwardCache {
    std::vector<Matrix> propagated;     // S * H^(l-1) per layer
    std::vector<Matrix> pre_activation; // Z^(l) = propagated * W + b
    std::vector<Matrix> activations;    // H^(l) after activation + dropout
    std::vector<Matrix> dropout_scale;  // empty when dropout is off
};

// H^(0) = X; H^(l) = act(S H^(l-1) W^(l) + b^(l)) on hidden layers, raw
// logits from the last. dropout_rng may be null when dropout == 0.
Matrix forward(const GcnModel& model, const CsrMatrix& s, const Matrix& x,
               double dropout = 0.0, Rng* dropout_rng = nullptr,
               ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;
};

// Mean softmax cross-entropy over the masked nodes plus reverse-mode
// gradients for every parameter. Deterministic given the dropout stream.
double loss_and_grads(const GcnModel& model, const CsrMatrix& s,
                      const Matrix& x, const std::vector<int>& labels,
                      const std::vector<std::uint8_t>& train_mask,
                      double dropout, Rng* dropout_rng, Gradients* grads);

// Fraction of masked nodes whose argmax logit matches the label (first
// index wins ties, so the value is deterministic).
double accuracy(const Matrix& logits, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

struct TrainResult {
    GcnModel model;
    std::vector<std::uint8_t> train_mask;  // complement is the test set
    double test_accuracy = 0.0;
    double final_train_loss = 0.0;
};

// Uniform train split of round(train_fraction * n) nodes (clamped so both
// sides are nonempty), full-batch Adam for exactly epochs steps, accuracy
// measured after the last epoch. Seed streams: 0 split, 1 init, 2 dropout.
TrainResult train(const Graph& g, const LabeledGraphData& data,
                  const ModelConfig& model_config, const TrainConfig& config);

// Relative influence of node u's input on node v's depth-k output under the
// linear unnormalized message pass h^(k) = A h^(k-1) (adjacency per the
// self_loops flag). The map is linear, so its Jacobian is A^k itself and the
// ratio equals the walk proportion A^k_uv / sum_u' A^k_u'v exactly.
double influence_ratio(const Graph& g, bool self_loops, int k, NodeId u,
                       NodeId v);

}  // namespace slp
