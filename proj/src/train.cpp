#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "error.hpp"

namespace kosim::dae {

using nlohmann::json;

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::Team ? "team" : "player";
}

std::vector<LayerSpec> default_team_spec() {
    const int d = features::kTeamInputDim;
    return {{d, 32, Activation::Sigmoid},
            {32, 16, Activation::Sigmoid},
            {16, 32, Activation::Sigmoid},
            {32, d, Activation::Sigmoid}};
}

std::vector<LayerSpec> default_player_spec() {
    const int d = features::kPlayerInputDim;
    return {{d, 24, Activation::Sigmoid},
            {24, 12, Activation::Sigmoid},
            {12, 24, Activation::Sigmoid},
            {24, d, Activation::Sigmoid}};
}

TrainedModel train(const features::Dataset& dataset, const std::vector<LayerSpec>& spec,
                   const TrainConfig& config, ModelKind kind,
                   const features::ScalerParams& scaler) {
    const std::size_t n = dataset.inputs.size();
    if (n == 0)
        throw_error(ErrorKind::EmptyDataset, "training dataset has no samples");
    if (config.batch_size < 1)
        throw_error(ErrorKind::RangeViolation, "batch_size must be at least 1");
    if (config.epochs < 1)
        throw_error(ErrorKind::RangeViolation, "epochs must be at least 1");
    if (config.noise_sigma < 0.0)
        throw_error(ErrorKind::RangeViolation, "noise_sigma must be non-negative");
    if (config.val_fraction < 0.0 || config.val_fraction >= 1.0)
        throw_error(ErrorKind::RangeViolation, "val_fraction must lie in [0,1)");
    const std::size_t dim = dataset.inputs.front().size();
    for (const auto& row : dataset.inputs)
        if (row.size() != dim)
            throw_error(ErrorKind::DimensionMismatch, "training samples have mixed dimensions");
    if (dataset.clean_mask.size() != dim)
        throw_error(ErrorKind::DimensionMismatch, "clean mask does not match sample dimension");

    ModelParams params = init_network(spec, derive_stream(config.seed, 0));
    if (int(dim) != params.input_dim() || int(dim) != params.output_dim())
        throw_error(ErrorKind::DimensionMismatch,
                    "network must map sample dimension " + std::to_string(dim) + " to itself");

    Rng data_rng(derive_stream(config.seed, 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    data_rng.shuffle(order);
    const std::size_t n_val = std::size_t(std::floor(double(n) * config.val_fraction));
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty())
        throw_error(ErrorKind::EmptyDataset, "validation split leaves no training samples");

    AdamState adam = make_adam_state(params);
    const AdamConfig adam_cfg = config.adam();

    TrainedModel model;
    model.kind = kind;
    model.spec = spec;
    model.scaler = scaler;
    model.config = config;

    ModelParams best_params = params;
    double best_val = std::numeric_limits<double>::infinity();

    ForwardCache cache;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        data_rng.shuffle(train_idx);
        double sq_sum = 0.0;
        std::size_t sq_count = 0;
        for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
            std::size_t end = std::min(train_idx.size(), start + config.batch_size);
            Gradients batch_grads = make_zero_gradients(params);
            for (std::size_t k = start; k < end; ++k) {
                const std::vector<double>& clean = dataset.inputs[train_idx[k]];
                std::vector<double> noisy =
                    add_gaussian_noise(clean, config.noise_sigma, data_rng, dataset.clean_mask);
                std::vector<double> output = forward(params, noisy, &cache);
                for (std::size_t j = 0; j < clean.size(); ++j) {
                    double d = output[j] - clean[j];
                    sq_sum += d * d;
                }
                sq_count += clean.size();
                accumulate_gradients(batch_grads, backward(params, cache, clean));
            }
            scale_gradients(batch_grads, 1.0 / double(end - start));
            adam_step(params, batch_grads, adam, adam_cfg);
            if (!params_finite(params))
                throw_error(ErrorKind::TrainingDiverged,
                            "non-finite parameters at epoch " + std::to_string(epoch));
        }

        EpochStats stats;
        stats.train_rmse = std::sqrt(sq_sum / double(sq_count));
        if (val_idx.empty()) {
            stats.val_rmse = stats.train_rmse;
        } else {
            double val_sq = 0.0;
            std::size_t val_count = 0;
            for (std::size_t idx : val_idx) {
                const std::vector<double>& clean = dataset.inputs[idx];
                std::vector<double> noisy =
                    add_gaussian_noise(clean, config.noise_sigma, data_rng, dataset.clean_mask);
                std::vector<double> output = forward(params, noisy, nullptr);
                for (std::size_t j = 0; j < clean.size(); ++j) {
                    double d = output[j] - clean[j];
                    val_sq += d * d;
                }
                val_count += clean.size();
            }
            stats.val_rmse = std::sqrt(val_sq / double(val_count));
        }
        model.history.push_back(stats);
        if (stats.val_rmse < best_val) {
            best_val = stats.val_rmse;
            best_params = params;
        }
    }

    model.params = std::move(best_params);
    return model;
}

std::vector<double> predict(const TrainedModel& model, const std::vector<double>& input) {
    return forward(model.params, input, nullptr);
}

namespace {

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::ReLU: return "relu";
    case Activation::Identity: return "identity";
    }
    return "sigmoid";
}

Activation parse_activation(const std::string& s) {
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "relu") return Activation::ReLU;
    if (s == "identity") return Activation::Identity;
    throw_error(ErrorKind::CorruptArtifact, "unknown activation '" + s + "'");
}

} // namespace

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["version"] = 1;
    j["kind"] = model_kind_name(model.kind);
    json spec = json::array();
    for (const LayerSpec& ls : model.spec)
        spec.push_back({{"in_dim", ls.in_dim},
                        {"out_dim", ls.out_dim},
                        {"activation", activation_name(ls.activation)}});
    j["spec"] = std::move(spec);
    j["scaler"] = json::parse(features::scaler_to_json(model.scaler));
    j["config"] = {{"learning_rate", model.config.learning_rate},
                   {"batch_size", model.config.batch_size},
                   {"epochs", model.config.epochs},
                   {"noise_sigma", model.config.noise_sigma},
                   {"beta1", model.config.beta1},
                   {"beta2", model.config.beta2},
                   {"epsilon", model.config.epsilon},
                   {"seed", model.config.seed},
                   {"val_fraction", model.config.val_fraction}};
    json weights = json::array();
    for (const Layer& layer : model.params.layers) {
        json rows = json::array();
        for (int i = 0; i < layer.out_dim; ++i) {
            json row = json::array();
            for (int k = 0; k < layer.in_dim; ++k)
                row.push_back(layer.weights[std::size_t(i) * layer.in_dim + k]);
            rows.push_back(std::move(row));
        }
        weights.push_back({{"weights", std::move(rows)}, {"biases", layer.biases}});
    }
    j["weights"] = std::move(weights);
    json history = json::array();
    for (const EpochStats& e : model.history)
        history.push_back({{"train_rmse", e.train_rmse}, {"val_rmse", e.val_rmse}});
    j["history"] = std::move(history);
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact,
                    std::string("model artifact is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("version"))
            throw_error(ErrorKind::CorruptArtifact, "model artifact has no version field");
        if (j.at("version").get<int>() != 1)
            throw_error(ErrorKind::VersionMismatch,
                        "model artifact version " + j.at("version").dump() + " is not supported");
        TrainedModel model;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "team") model.kind = ModelKind::Team;
        else if (kind == "player") model.kind = ModelKind::Player;
        else throw_error(ErrorKind::CorruptArtifact, "unknown model kind '" + kind + "'");

        for (const auto& ls : j.at("spec"))
            model.spec.push_back({ls.at("in_dim").get<int>(), ls.at("out_dim").get<int>(),
                                  parse_activation(ls.at("activation").get<std::string>())});
        model.scaler = features::scaler_from_json(j.at("scaler").dump());
        const json& cfg = j.at("config");
        model.config.learning_rate = cfg.at("learning_rate").get<double>();
        model.config.batch_size = cfg.at("batch_size").get<int>();
        model.config.epochs = cfg.at("epochs").get<int>();
        model.config.noise_sigma = cfg.at("noise_sigma").get<double>();
        model.config.beta1 = cfg.at("beta1").get<double>();
        model.config.beta2 = cfg.at("beta2").get<double>();
        model.config.epsilon = cfg.at("epsilon").get<double>();
        model.config.seed = cfg.at("seed").get<std::uint64_t>();
        model.config.val_fraction = cfg.at("val_fraction").get<double>();

        const json& weights = j.at("weights");
        if (weights.size() != model.spec.size())
            throw_error(ErrorKind::CorruptArtifact, "weight count does not match the layer spec");
        for (std::size_t l = 0; l < model.spec.size(); ++l) {
            const LayerSpec& ls = model.spec[l];
            Layer layer;
            layer.in_dim = ls.in_dim;
            layer.out_dim = ls.out_dim;
            layer.activation = ls.activation;
            const json& rows = weights[l].at("weights");
            if (int(rows.size()) != ls.out_dim)
                throw_error(ErrorKind::CorruptArtifact,
                            "layer " + std::to_string(l) + " has the wrong weight row count");
            for (const auto& row : rows) {
                if (int(row.size()) != ls.in_dim)
                    throw_error(ErrorKind::CorruptArtifact,
                                "layer " + std::to_string(l) + " has a wrong-length weight row");
                for (const auto& w : row) layer.weights.push_back(w.get<double>());
            }
            layer.biases = weights[l].at("biases").get<std::vector<double>>();
            if (int(layer.biases.size()) != ls.out_dim)
                throw_error(ErrorKind::CorruptArtifact,
                            "layer " + std::to_string(l) + " has the wrong bias count");
            model.params.layers.push_back(std::move(layer));
        }
        for (std::size_t l = 1; l < model.spec.size(); ++l)
            if (model.spec[l].in_dim != model.spec[l - 1].out_dim)
                throw_error(ErrorKind::CorruptArtifact, "layer dimensions do not chain");
        if (!params_finite(model.params))
            throw_error(ErrorKind::CorruptArtifact, "model artifact holds non-finite parameters");

        for (const auto& e : j.at("history"))
            model.history.push_back({e.at("train_rmse").get<double>(),
                                     e.at("val_rmse").get<double>()});
        if (model.history.empty())
            throw_error(ErrorKind::CorruptArtifact, "model artifact has an empty history");
        return model;
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact,
                    std::string("model artifact is malformed: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    ingest::write_file(path, model_to_json(model));
}

TrainedModel load_model(const std::string& path) {
    return model_from_json(ingest::read_file(path));
}

} // namespace kosim::dae
