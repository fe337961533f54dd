#include <kosim/kosim.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"
#include "simulate.hpp"
#include "train.hpp"

struct ko_corpus {
    kosim::ingest::Corpus value;
};
struct ko_model {
    kosim::dae::TrainedModel value;
};
struct ko_bracket {
    kosim::sim::Bracket value;
};
struct ko_simulation {
    kosim::sim::SimulationReport value;
};

namespace {

thread_local std::string tl_error;

ko_status status_for(kosim::ErrorKind kind) {
    using kosim::ErrorKind;
    switch (kind) {
    case ErrorKind::Io:
        return KO_ERR_IO;
    case ErrorKind::CorruptArtifact:
    case ErrorKind::VersionMismatch:
        return KO_ERR_FORMAT;
    case ErrorKind::EmptyCorpus:
    case ErrorKind::EmptyDataset:
    case ErrorKind::TrainingDiverged:
        return KO_ERR_TRAIN;
    case ErrorKind::InvalidBracket:
    case ErrorKind::UnknownTeam:
    case ErrorKind::MissingSquad:
    case ErrorKind::NoPlayersForScoringTeam:
        return KO_ERR_SIM;
    default:
        return KO_ERR_INPUT;
    }
}

template <typename Fn>
ko_status wrap(Fn&& fn) {
    try {
        fn();
        return KO_OK;
    } catch (const kosim::Error& e) {
        tl_error = e.what();
        return status_for(e.kind());
    } catch (const std::exception& e) {
        tl_error = e.what();
        return KO_ERR_INPUT;
    } catch (...) {
        tl_error = "unknown error";
        return KO_ERR_INPUT;
    }
}

ko_status arg_error(const char* msg) {
    tl_error = msg;
    return KO_ERR_ARG;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

kosim::dae::TrainConfig to_core(const ko_train_config& c) {
    kosim::dae::TrainConfig config;
    config.learning_rate = c.learning_rate;
    config.batch_size = c.batch_size;
    config.epochs = c.epochs;
    config.noise_sigma = c.noise_sigma;
    config.beta1 = c.beta1;
    config.beta2 = c.beta2;
    config.epsilon = c.epsilon;
    config.seed = c.seed;
    config.val_fraction = c.val_fraction;
    return config;
}

} // namespace

extern "C" {

int ko_abi_version(void) { return KOSIM_ABI_VERSION; }

const char* ko_last_error(void) { return tl_error.c_str(); }

void ko_string_free(char* s) { delete[] s; }

ko_status ko_corpus_from_csv_files(const char* team_csv_path, const char* player_csv_path,
                                   ko_corpus** out) {
    if (!team_csv_path || !player_csv_path) return arg_error("null csv path");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        auto team_rows = kosim::ingest::parse_team_matches(
            kosim::ingest::read_file(team_csv_path));
        auto player_rows = kosim::ingest::parse_player_matches(
            kosim::ingest::read_file(player_csv_path));
        *out = new ko_corpus{kosim::ingest::make_corpus(std::move(team_rows),
                                                        std::move(player_rows))};
    });
}

ko_status ko_corpus_from_csv_text(const char* team_csv, const char* player_csv,
                                  ko_corpus** out) {
    if (!team_csv || !player_csv) return arg_error("null csv text");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        auto team_rows = kosim::ingest::parse_team_matches(team_csv);
        auto player_rows = kosim::ingest::parse_player_matches(player_csv);
        *out = new ko_corpus{kosim::ingest::make_corpus(std::move(team_rows),
                                                        std::move(player_rows))};
    });
}

ko_status ko_corpus_synthetic(uint64_t seed, int n_teams, int n_matches,
                              int players_per_team, ko_corpus** out) {
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        *out = new ko_corpus{kosim::ingest::generate_synthetic_corpus(seed, n_teams, n_matches,
                                                                      players_per_team)};
    });
}

ko_status ko_corpus_save(const ko_corpus* corpus, const char* path) {
    if (!corpus) return arg_error("null corpus");
    if (!path) return arg_error("null path");
    return wrap([&] { kosim::ingest::save_corpus(corpus->value, path); });
}

ko_status ko_corpus_load(const char* path, ko_corpus** out) {
    if (!path) return arg_error("null path");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = new ko_corpus{kosim::ingest::load_corpus(path)}; });
}

ko_status ko_corpus_stats_json(const ko_corpus* corpus, char** out) {
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        const auto& s = corpus->value.stats;
        nlohmann::json j;
        j["n_matches"] = s.n_matches;
        j["n_team_rows"] = s.n_team_rows;
        j["n_player_rows"] = s.n_player_rows;
        j["teams"] = s.teams;
        j["players"] = s.players;
        j["seasons"] = s.seasons;
        j["warnings"] = s.warnings;
        *out = dup_string(j.dump(2) + "\n");
    });
}

ko_status ko_corpus_team_csv(const ko_corpus* corpus, char** out) {
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        *out = dup_string(kosim::ingest::serialize_team_matches(corpus->value.team_rows));
    });
}

ko_status ko_corpus_player_csv(const ko_corpus* corpus, char** out) {
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        *out = dup_string(kosim::ingest::serialize_player_matches(corpus->value.player_rows));
    });
}

ko_status ko_corpus_correlations_csv(const ko_corpus* corpus, char** out) {
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::features::correlations_csv(corpus->value)); });
}

ko_status ko_corpus_distributions_csv(const ko_corpus* corpus, char** out) {
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::features::distributions_csv(corpus->value)); });
}

void ko_corpus_free(ko_corpus* corpus) { delete corpus; }

void ko_train_config_init(ko_train_config* config) {
    if (!config) return;
    kosim::dae::TrainConfig defaults;
    config->learning_rate = defaults.learning_rate;
    config->batch_size = defaults.batch_size;
    config->epochs = defaults.epochs;
    config->noise_sigma = defaults.noise_sigma;
    config->beta1 = defaults.beta1;
    config->beta2 = defaults.beta2;
    config->epsilon = defaults.epsilon;
    config->seed = defaults.seed;
    config->val_fraction = defaults.val_fraction;
}

ko_status ko_train(const ko_corpus* corpus, const ko_train_config* config,
                   ko_model_kind kind, ko_model** out) {
    if (!corpus) return arg_error("null corpus");
    if (!config) return arg_error("null config");
    if (!out) return arg_error("null out-parameter");
    if (kind != KO_MODEL_TEAM && kind != KO_MODEL_PLAYER) return arg_error("bad model kind");
    return wrap([&] {
        kosim::features::CorpusIndex index(corpus->value);
        kosim::dae::TrainConfig core_config = to_core(*config);
        if (kind == KO_MODEL_TEAM) {
            auto scaler = kosim::features::fit_team_scaler(corpus->value);
            auto dataset = kosim::features::build_team_dataset(index, scaler);
            *out = new ko_model{kosim::dae::train(dataset, kosim::dae::default_team_spec(),
                                                  core_config, kosim::dae::ModelKind::Team,
                                                  scaler)};
        } else {
            auto team_scaler = kosim::features::fit_team_scaler(corpus->value);
            auto player_scaler = kosim::features::fit_player_scaler(corpus->value);
            auto dataset =
                kosim::features::build_player_dataset(index, team_scaler, player_scaler);
            *out = new ko_model{kosim::dae::train(dataset, kosim::dae::default_player_spec(),
                                                  core_config, kosim::dae::ModelKind::Player,
                                                  player_scaler)};
        }
    });
}

ko_status ko_model_save(const ko_model* model, const char* path) {
    if (!model) return arg_error("null model");
    if (!path) return arg_error("null path");
    return wrap([&] { kosim::dae::save_model(model->value, path); });
}

ko_status ko_model_load(const char* path, ko_model** out) {
    if (!path) return arg_error("null path");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = new ko_model{kosim::dae::load_model(path)}; });
}

ko_status ko_model_summary_json(const ko_model* model, char** out) {
    if (!model) return arg_error("null model");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        const auto& m = model->value;
        nlohmann::json j;
        j["kind"] = kosim::dae::model_kind_name(m.kind);
        nlohmann::json layers = nlohmann::json::array();
        for (const auto& ls : m.spec)
            layers.push_back({{"in_dim", ls.in_dim}, {"out_dim", ls.out_dim}});
        j["layers"] = std::move(layers);
        j["epochs_trained"] = m.history.size();
        j["final_train_rmse"] = m.history.back().train_rmse;
        j["final_val_rmse"] = m.history.back().val_rmse;
        j["config"] = {{"learning_rate", m.config.learning_rate},
                       {"batch_size", m.config.batch_size},
                       {"epochs", m.config.epochs},
                       {"noise_sigma", m.config.noise_sigma},
                       {"seed", m.config.seed},
                       {"val_fraction", m.config.val_fraction}};
        *out = dup_string(j.dump(2) + "\n");
    });
}

void ko_model_free(ko_model* model) { delete model; }

ko_status ko_bracket_load_file(const char* path, ko_bracket** out) {
    if (!path) return arg_error("null path");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = new ko_bracket{kosim::sim::load_bracket(path)}; });
}

ko_status ko_bracket_load_text(const char* json_text, ko_bracket** out) {
    if (!json_text) return arg_error("null bracket text");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = new ko_bracket{kosim::sim::bracket_from_json(json_text)}; });
}

void ko_bracket_free(ko_bracket* bracket) { delete bracket; }

ko_status ko_simulate(const ko_bracket* bracket, const ko_model* team_model,
                      const ko_model* player_model, const ko_corpus* corpus,
                      int runs, uint64_t seed, ko_simulation** out) {
    if (!bracket) return arg_error("null bracket");
    if (!team_model || !player_model) return arg_error("null model");
    if (!corpus) return arg_error("null corpus");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] {
        *out = new ko_simulation{kosim::sim::simulate_bracket(
            bracket->value, team_model->value, player_model->value, corpus->value, runs, seed)};
    });
}

ko_status ko_simulation_report_json(const ko_simulation* sim, char** out) {
    if (!sim) return arg_error("null simulation");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::sim::report_to_json(sim->value)); });
}

ko_status ko_simulation_legs_csv(const ko_simulation* sim, char** out) {
    if (!sim) return arg_error("null simulation");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::sim::report_legs_csv(sim->value)); });
}

ko_status ko_simulation_distributions_csv(const ko_simulation* sim, char** out) {
    if (!sim) return arg_error("null simulation");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::sim::report_distributions_csv(sim->value)); });
}

ko_status ko_simulation_summary_text(const ko_simulation* sim, char** out) {
    if (!sim) return arg_error("null simulation");
    if (!out) return arg_error("null out-parameter");
    return wrap([&] { *out = dup_string(kosim::sim::report_summary_text(sim->value)); });
}

void ko_simulation_free(ko_simulation* sim) { delete sim; }

} // extern "C"
