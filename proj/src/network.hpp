#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace kosim::dae {

enum class Activation { Sigmoid, ReLU, Identity };

struct LayerSpec {
    int in_dim = 0;
    int out_dim = 0;
    Activation activation = Activation::Sigmoid;

    bool operator==(const LayerSpec&) const = default;
};

struct Layer {
    int in_dim = 0;
    int out_dim = 0;
    Activation activation = Activation::Sigmoid;
    std::vector<double> weights;   // row-major, out_dim × in_dim
    std::vector<double> biases;    // out_dim

    bool operator==(const Layer&) const = default;
};

struct ModelParams {
    std::vector<Layer> layers;

    bool operator==(const ModelParams&) const = default;
    int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
};

// Glorot-uniform weights, zero biases, one deterministic draw order per seed.
ModelParams init_network(const std::vector<LayerSpec>& spec, std::uint64_t seed);

bool params_finite(const ModelParams& params);

// Adds N(0, sigma²) to every component whose clean_mask entry is false.
// Results are intentionally not clipped to [0,1].
std::vector<double> add_gaussian_noise(const std::vector<double>& v, double sigma, Rng& rng,
                                       const std::vector<bool>& clean_mask);

// act[0] is the input; act[i] and pre[i-1] belong to layer i-1.
struct ForwardCache {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
};

std::vector<double> forward(const ModelParams& params, const std::vector<double>& input,
                            ForwardCache* cache = nullptr);

// Mean over all elements; a batch flattens every vector into that mean.
double mse_loss(const std::vector<double>& pred, const std::vector<double>& target);
double rmse(const std::vector<std::vector<double>>& preds,
            const std::vector<std::vector<double>>& targets);

struct Gradients {
    std::vector<std::vector<double>> weights;   // same shapes as the layer tensors
    std::vector<std::vector<double>> biases;
};

Gradients make_zero_gradients(const ModelParams& params);
void accumulate_gradients(Gradients& into, const Gradients& grads);
void scale_gradients(Gradients& grads, double factor);

// Gradients of mse_loss(output, target) w.r.t. every weight and bias.
Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const std::vector<double>& target);

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    long t = 0;
};

AdamState make_adam_state(const ModelParams& params);
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& config);

} // namespace kosim::dae
