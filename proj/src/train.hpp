#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "features.hpp"
#include "network.hpp"

namespace kosim::dae {

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 10;
    int epochs = 150;
    double noise_sigma = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    double val_fraction = 0.15;

    bool operator==(const TrainConfig&) const = default;
    AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
};

enum class ModelKind { Team, Player };

const char* model_kind_name(ModelKind kind);

struct EpochStats {
    double train_rmse = 0.0;
    double val_rmse = 0.0;

    bool operator==(const EpochStats&) const = default;
};

struct TrainedModel {
    ModelKind kind = ModelKind::Team;
    std::vector<LayerSpec> spec;
    ModelParams params;
    features::ScalerParams scaler;
    TrainConfig config;
    std::vector<EpochStats> history;

    bool operator==(const TrainedModel&) const = default;
};

std::vector<LayerSpec> default_team_spec();
std::vector<LayerSpec> default_player_spec();

// Denoising autoencoder fit: each epoch reshuffles (seeded), corrupts the
// unmasked components with fresh Gaussian noise, and steps toward the clean
// input. Keeps the parameters from the epoch with the best validation RMSE.
TrainedModel train(const features::Dataset& dataset, const std::vector<LayerSpec>& spec,
                   const TrainConfig& config, ModelKind kind,
                   const features::ScalerParams& scaler);

std::vector<double> predict(const TrainedModel& model, const std::vector<double>& input);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace kosim::dae
