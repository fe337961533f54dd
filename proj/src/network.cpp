#include "network.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace kosim::dae {

ModelParams init_network(const std::vector<LayerSpec>& spec, std::uint64_t seed) {
    if (spec.empty())
        throw_error(ErrorKind::DimChainMismatch, "network needs at least one layer");
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i].in_dim < 1 || spec[i].out_dim < 1)
            throw_error(ErrorKind::RangeViolation,
                        "layer " + std::to_string(i) + " has non-positive dimensions");
        if (i > 0 && spec[i].in_dim != spec[i - 1].out_dim)
            throw_error(ErrorKind::DimChainMismatch,
                        "layer " + std::to_string(i) + " expects " + std::to_string(spec[i].in_dim) +
                        " inputs but the previous layer emits " + std::to_string(spec[i - 1].out_dim));
    }

    Rng rng(seed);
    ModelParams params;
    params.layers.reserve(spec.size());
    for (const LayerSpec& ls : spec) {
        Layer layer;
        layer.in_dim = ls.in_dim;
        layer.out_dim = ls.out_dim;
        layer.activation = ls.activation;
        double limit = std::sqrt(6.0 / (ls.in_dim + ls.out_dim));
        layer.weights.resize(std::size_t(ls.out_dim) * ls.in_dim);
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.biases.assign(ls.out_dim, 0.0);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

bool params_finite(const ModelParams& params) {
    for (const Layer& layer : params.layers) {
        for (double w : layer.weights)
            if (!std::isfinite(w)) return false;
        for (double b : layer.biases)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

std::vector<double> add_gaussian_noise(const std::vector<double>& v, double sigma, Rng& rng,
                                       const std::vector<bool>& clean_mask) {
    if (clean_mask.size() != v.size())
        throw_error(ErrorKind::DimensionMismatch,
                    "noise mask length " + std::to_string(clean_mask.size()) +
                    " does not match vector length " + std::to_string(v.size()));
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        out[j] = clean_mask[j] ? v[j] : v[j] + rng.normal(sigma);
    return out;
}

static double activate(Activation a, double z) {
    switch (a) {
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Identity: return z;
    }
    return z;
}

// Derivative expressed through the activation value, which the cache holds.
static double activate_grad(Activation a, double pre, double act) {
    switch (a) {
    case Activation::Sigmoid: return act * (1.0 - act);
    case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
    }
    return 1.0;
}

std::vector<double> forward(const ModelParams& params, const std::vector<double>& input,
                            ForwardCache* cache) {
    if (int(input.size()) != params.input_dim())
        throw_error(ErrorKind::DimensionMismatch,
                    "input has " + std::to_string(input.size()) + " values, network expects " +
                    std::to_string(params.input_dim()));
    if (cache) {
        cache->pre.clear();
        cache->act.clear();
        cache->act.push_back(input);
    }
    std::vector<double> current = input;
    for (const Layer& layer : params.layers) {
        std::vector<double> pre(layer.out_dim);
        for (int i = 0; i < layer.out_dim; ++i) {
            double z = layer.biases[i];
            const double* wrow = &layer.weights[std::size_t(i) * layer.in_dim];
            for (int j = 0; j < layer.in_dim; ++j) z += wrow[j] * current[j];
            pre[i] = z;
        }
        std::vector<double> act(layer.out_dim);
        for (int i = 0; i < layer.out_dim; ++i) act[i] = activate(layer.activation, pre[i]);
        if (cache) {
            cache->pre.push_back(pre);
            cache->act.push_back(act);
        }
        current = std::move(act);
    }
    return current;
}

double mse_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size())
        throw_error(ErrorKind::DimensionMismatch,
                    "prediction and target have lengths " + std::to_string(pred.size()) +
                    " and " + std::to_string(target.size()));
    if (pred.empty())
        throw_error(ErrorKind::DimensionMismatch, "mse over zero elements is undefined");
    double sum = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        double d = pred[j] - target[j];
        sum += d * d;
    }
    return sum / double(pred.size());
}

double rmse(const std::vector<std::vector<double>>& preds,
            const std::vector<std::vector<double>>& targets) {
    if (preds.size() != targets.size())
        throw_error(ErrorKind::DimensionMismatch,
                    "batches have " + std::to_string(preds.size()) + " and " +
                    std::to_string(targets.size()) + " rows");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].size() != targets[i].size())
            throw_error(ErrorKind::DimensionMismatch,
                        "batch row " + std::to_string(i) + " has mismatched lengths");
        for (std::size_t j = 0; j < preds[i].size(); ++j) {
            double d = preds[i][j] - targets[i][j];
            sum += d * d;
        }
        count += preds[i].size();
    }
    if (count == 0)
        throw_error(ErrorKind::DimensionMismatch, "rmse over zero elements is undefined");
    return std::sqrt(sum / double(count));
}

Gradients make_zero_gradients(const ModelParams& params) {
    Gradients grads;
    grads.weights.reserve(params.layers.size());
    grads.biases.reserve(params.layers.size());
    for (const Layer& layer : params.layers) {
        grads.weights.emplace_back(layer.weights.size(), 0.0);
        grads.biases.emplace_back(layer.biases.size(), 0.0);
    }
    return grads;
}

void accumulate_gradients(Gradients& into, const Gradients& grads) {
    for (std::size_t l = 0; l < into.weights.size(); ++l) {
        for (std::size_t k = 0; k < into.weights[l].size(); ++k)
            into.weights[l][k] += grads.weights[l][k];
        for (std::size_t k = 0; k < into.biases[l].size(); ++k)
            into.biases[l][k] += grads.biases[l][k];
    }
}

void scale_gradients(Gradients& grads, double factor) {
    for (auto& layer : grads.weights)
        for (double& g : layer) g *= factor;
    for (auto& layer : grads.biases)
        for (double& g : layer) g *= factor;
}

Gradients backward(const ModelParams& params, const ForwardCache& cache,
                   const std::vector<double>& target) {
    const std::size_t n_layers = params.layers.size();
    if (cache.pre.size() != n_layers || cache.act.size() != n_layers + 1)
        throw_error(ErrorKind::DimensionMismatch, "forward cache does not match the network");
    const std::vector<double>& output = cache.act.back();
    if (output.size() != target.size())
        throw_error(ErrorKind::DimensionMismatch,
                    "target has " + std::to_string(target.size()) + " values, output has " +
                    std::to_string(output.size()));

    Gradients grads = make_zero_gradients(params);
    const double n_out = double(output.size());
    std::vector<double> delta(output.size());
    for (std::size_t j = 0; j < output.size(); ++j) {
        double dloss = 2.0 * (output[j] - target[j]) / n_out;
        delta[j] = dloss * activate_grad(params.layers.back().activation,
                                         cache.pre.back()[j], output[j]);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const Layer& layer = params.layers[l];
        const std::vector<double>& in_act = cache.act[l];
        for (int i = 0; i < layer.out_dim; ++i) {
            grads.biases[l][i] = delta[i];
            double* grow = &grads.weights[l][std::size_t(i) * layer.in_dim];
            for (int j = 0; j < layer.in_dim; ++j) grow[j] = delta[i] * in_act[j];
        }
        if (l == 0) break;
        const Layer& below = params.layers[l - 1];
        std::vector<double> next_delta(layer.in_dim, 0.0);
        for (int j = 0; j < layer.in_dim; ++j) {
            double sum = 0.0;
            for (int i = 0; i < layer.out_dim; ++i)
                sum += layer.weights[std::size_t(i) * layer.in_dim + j] * delta[i];
            next_delta[j] = sum * activate_grad(below.activation, cache.pre[l - 1][j],
                                                cache.act[l][j]);
        }
        delta = std::move(next_delta);
    }
    return grads;
}

AdamState make_adam_state(const ModelParams& params) {
    AdamState state;
    for (const Layer& layer : params.layers) {
        state.m_weights.emplace_back(layer.weights.size(), 0.0);
        state.v_weights.emplace_back(layer.weights.size(), 0.0);
        state.m_biases.emplace_back(layer.biases.size(), 0.0);
        state.v_biases.emplace_back(layer.biases.size(), 0.0);
    }
    return state;
}

static void adam_update(std::vector<double>& params, const std::vector<double>& grads,
                        std::vector<double>& m, std::vector<double>& v,
                        const AdamConfig& cfg, double bc1, double bc2) {
    for (std::size_t k = 0; k < params.size(); ++k) {
        m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * grads[k];
        v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * grads[k] * grads[k];
        double m_hat = m[k] / bc1;
        double v_hat = v[k] / bc2;
        params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               const AdamConfig& config) {
    if (grads.weights.size() != params.layers.size())
        throw_error(ErrorKind::DimensionMismatch, "gradient shapes do not match the network");
    state.t += 1;
    double bc1 = 1.0 - std::pow(config.beta1, double(state.t));
    double bc2 = 1.0 - std::pow(config.beta2, double(state.t));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        adam_update(params.layers[l].weights, grads.weights[l], state.m_weights[l],
                    state.v_weights[l], config, bc1, bc2);
        adam_update(params.layers[l].biases, grads.biases[l], state.m_biases[l],
                    state.v_biases[l], config, bc1, bc2);
    }
}

} // namespace kosim::dae
