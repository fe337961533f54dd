// kosim: ingest -> train -> simulate -> report pipeline driver.
// Links only the public C API; all domain work happens behind it.

#include <kosim/kosim.h>

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// Exit codes: 0 ok, 2 input error, 3 training error, 4 simulation error.
int exit_code_for(ko_status status) {
    switch (status) {
        case KO_OK: return 0;
        case KO_ERR_TRAIN: return 3;
        case KO_ERR_SIM: return 4;
        default: return 2;
    }
}

int fail(ko_status status) {
    std::cerr << "error: " << ko_last_error() << "\n";
    return exit_code_for(status);
}

int fail_input(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 2;
}

// Owned C string from the API; frees on scope exit.
class ApiString {
  public:
    ~ApiString() { ko_string_free(value); }
    char* value = nullptr;
    std::string str() const { return value ? std::string(value) : std::string(); }
};

template <typename T, void (*Free)(T*)>
class Handle {
  public:
    ~Handle() { Free(value); }
    T* value = nullptr;
};

using CorpusHandle = Handle<ko_corpus, ko_corpus_free>;
using ModelHandle = Handle<ko_model, ko_model_free>;
using BracketHandle = Handle<ko_bracket, ko_bracket_free>;
using SimulationHandle = Handle<ko_simulation, ko_simulation_free>;

bool write_text_file(const std::string& path, const std::string& text, std::string& error) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        error = "cannot open '" + path + "' for writing";
        return false;
    }
    out << text;
    out.flush();
    if (!out) {
        error = "failed while writing '" + path + "'";
        return false;
    }
    return true;
}

bool read_text_file(const std::string& path, std::string& text, std::string& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        error = "cannot open '" + path + "' for reading";
        return false;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
    return true;
}

bool ensure_directory(const std::string& path, std::string& error) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) {
        error = "cannot create directory '" + path + "': " + ec.message();
        return false;
    }
    return true;
}

// Fills flag values from a JSON config file. Command-line flags win: a key is
// applied only when its flag was not passed. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
class ConfigMerge {
  public:
    bool load(const std::string& path, std::string& error) {
        if (path.empty()) return true;
        std::string text;
        if (!read_text_file(path, text, error)) return false;
        json parsed = json::parse(text, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            error = "config '" + path + "' is not a JSON object";
            return false;
        }
        config_ = std::move(parsed);
        path_ = path;
        return true;
    }

    template <typename T>
    bool merge(const CLI::App& sub, const std::string& flag, T& value, std::string& error) {
        std::string key = flag.substr(2);
        consumed_.insert(key);
        if (!config_.contains(key) || sub.count(flag) > 0) return true;
        try {
            value = config_.at(key).get<T>();
        } catch (const json::exception&) {
            error = "config '" + path_ + "': key '" + key + "' has the wrong type";
            return false;
        }
        return true;
    }

    bool finish(std::string& error) const {
        for (const auto& item : config_.items()) {
            if (consumed_.count(item.key()) == 0) {
                error = "config '" + path_ + "': unknown key '" + item.key() + "'";
                return false;
            }
        }
        return true;
    }

  private:
    json config_ = json::object();
    std::string path_;
    std::set<std::string> consumed_;
};

struct IngestOptions {
    std::string config_path;
    std::string team_csv;
    std::string player_csv;
    std::string out;
    bool synthetic = false;
    std::uint64_t seed = 0;
    int synthetic_teams = 8;
    int synthetic_matches = 100;
    int synthetic_players = 18;
};

int run_ingest(const CLI::App& sub, IngestOptions& opt) {
    ConfigMerge config;
    std::string error;
    if (!config.load(opt.config_path, error)) return fail_input(error);
    if (!config.merge(sub, "--team-csv", opt.team_csv, error) ||
        !config.merge(sub, "--player-csv", opt.player_csv, error) ||
        !config.merge(sub, "--out", opt.out, error) ||
        !config.merge(sub, "--synthetic", opt.synthetic, error) ||
        !config.merge(sub, "--seed", opt.seed, error) ||
        !config.merge(sub, "--synthetic-teams", opt.synthetic_teams, error) ||
        !config.merge(sub, "--synthetic-matches", opt.synthetic_matches, error) ||
        !config.merge(sub, "--synthetic-players", opt.synthetic_players, error) ||
        !config.finish(error)) {
        return fail_input(error);
    }
    if (opt.out.empty()) return fail_input("ingest: --out is required");

    CorpusHandle corpus;
    ko_status status;
    if (opt.synthetic) {
        status = ko_corpus_synthetic(opt.seed, opt.synthetic_teams, opt.synthetic_matches,
                                     opt.synthetic_players, &corpus.value);
    } else {
        if (opt.team_csv.empty() || opt.player_csv.empty()) {
            return fail_input("ingest: --team-csv and --player-csv are required unless --synthetic");
        }
        status = ko_corpus_from_csv_files(opt.team_csv.c_str(), opt.player_csv.c_str(),
                                          &corpus.value);
    }
    if (status != KO_OK) return fail(status);

    status = ko_corpus_save(corpus.value, opt.out.c_str());
    if (status != KO_OK) return fail(status);

    ApiString stats;
    status = ko_corpus_stats_json(corpus.value, &stats.value);
    if (status != KO_OK) return fail(status);
    std::cout << stats.value;
    std::cerr << "wrote " << opt.out << "\n";
    return 0;
}

struct TrainOptions {
    std::string config_path;
    std::string corpus;
    std::string out;
    std::uint64_t seed = 0;
    int epochs = 150;
    double lr = 0.01;
    int batch = 10;
    double sigma = 0.1;
    double val_fraction = 0.15;
};

int train_one(const ko_corpus* corpus, const ko_train_config& config, ko_model_kind kind,
              const std::string& label, const std::string& path) {
    ModelHandle model;
    ko_status status = ko_train(corpus, &config, kind, &model.value);
    if (status != KO_OK) return fail(status);
    status = ko_model_save(model.value, path.c_str());
    if (status != KO_OK) return fail(status);

    ApiString summary;
    status = ko_model_summary_json(model.value, &summary.value);
    if (status != KO_OK) return fail(status);
    json parsed = json::parse(summary.str());
    std::printf("%s model: epochs=%d train_rmse=%.4f val_rmse=%.4f -> %s\n", label.c_str(),
                parsed.at("epochs_trained").get<int>(),
                parsed.at("final_train_rmse").get<double>(),
                parsed.at("final_val_rmse").get<double>(), path.c_str());
    return 0;
}

int run_train(const CLI::App& sub, TrainOptions& opt) {
    ConfigMerge config;
    std::string error;
    if (!config.load(opt.config_path, error)) return fail_input(error);
    if (!config.merge(sub, "--corpus", opt.corpus, error) ||
        !config.merge(sub, "--out", opt.out, error) ||
        !config.merge(sub, "--seed", opt.seed, error) ||
        !config.merge(sub, "--epochs", opt.epochs, error) ||
        !config.merge(sub, "--lr", opt.lr, error) ||
        !config.merge(sub, "--batch", opt.batch, error) ||
        !config.merge(sub, "--sigma", opt.sigma, error) ||
        !config.merge(sub, "--val-fraction", opt.val_fraction, error) ||
        !config.finish(error)) {
        return fail_input(error);
    }
    if (opt.corpus.empty()) return fail_input("train: --corpus is required");
    if (opt.out.empty()) return fail_input("train: --out is required");
    if (!ensure_directory(opt.out, error)) return fail_input(error);

    CorpusHandle corpus;
    ko_status status = ko_corpus_load(opt.corpus.c_str(), &corpus.value);
    if (status != KO_OK) return fail(status);

    ko_train_config train_config;
    ko_train_config_init(&train_config);
    train_config.learning_rate = opt.lr;
    train_config.batch_size = opt.batch;
    train_config.epochs = opt.epochs;
    train_config.noise_sigma = opt.sigma;
    train_config.seed = opt.seed;
    train_config.val_fraction = opt.val_fraction;

    std::filesystem::path out_dir(opt.out);
    int rc = train_one(corpus.value, train_config, KO_MODEL_TEAM, "team",
                       (out_dir / "team_model.json").string());
    if (rc != 0) return rc;
    return train_one(corpus.value, train_config, KO_MODEL_PLAYER, "player",
                     (out_dir / "player_model.json").string());
}

struct SimulateOptions {
    std::string config_path;
    std::string corpus;
    std::string team_model;
    std::string player_model;
    std::string bracket;
    std::string out;
    int runs = 1;
    std::uint64_t seed = 0;
};

int run_simulate(const CLI::App& sub, SimulateOptions& opt) {
    ConfigMerge config;
    std::string error;
    if (!config.load(opt.config_path, error)) return fail_input(error);
    if (!config.merge(sub, "--corpus", opt.corpus, error) ||
        !config.merge(sub, "--team-model", opt.team_model, error) ||
        !config.merge(sub, "--player-model", opt.player_model, error) ||
        !config.merge(sub, "--bracket", opt.bracket, error) ||
        !config.merge(sub, "--out", opt.out, error) ||
        !config.merge(sub, "--runs", opt.runs, error) ||
        !config.merge(sub, "--seed", opt.seed, error) ||
        !config.finish(error)) {
        return fail_input(error);
    }
    if (opt.corpus.empty()) return fail_input("simulate: --corpus is required");
    if (opt.team_model.empty()) return fail_input("simulate: --team-model is required");
    if (opt.player_model.empty()) return fail_input("simulate: --player-model is required");
    if (opt.bracket.empty()) return fail_input("simulate: --bracket is required");
    if (opt.out.empty()) return fail_input("simulate: --out is required");
    if (!ensure_directory(opt.out, error)) return fail_input(error);

    CorpusHandle corpus;
    ko_status status = ko_corpus_load(opt.corpus.c_str(), &corpus.value);
    if (status != KO_OK) return fail(status);
    ModelHandle team_model;
    status = ko_model_load(opt.team_model.c_str(), &team_model.value);
    if (status != KO_OK) return fail(status);
    ModelHandle player_model;
    status = ko_model_load(opt.player_model.c_str(), &player_model.value);
    if (status != KO_OK) return fail(status);
    BracketHandle bracket;
    status = ko_bracket_load_file(opt.bracket.c_str(), &bracket.value);
    if (status != KO_OK) return fail(status);

    SimulationHandle sim;
    status = ko_simulate(bracket.value, team_model.value, player_model.value, corpus.value,
                         opt.runs, opt.seed, &sim.value);
    if (status != KO_OK) return fail(status);

    ApiString report;
    ApiString legs;
    ApiString distributions;
    ApiString summary;
    if ((status = ko_simulation_report_json(sim.value, &report.value)) != KO_OK ||
        (status = ko_simulation_legs_csv(sim.value, &legs.value)) != KO_OK ||
        (status = ko_simulation_distributions_csv(sim.value, &distributions.value)) != KO_OK ||
        (status = ko_simulation_summary_text(sim.value, &summary.value)) != KO_OK) {
        return fail(status);
    }

    std::filesystem::path out_dir(opt.out);
    if (!write_text_file((out_dir / "report.json").string(), report.str(), error) ||
        !write_text_file((out_dir / "legs.csv").string(), legs.str(), error) ||
        !write_text_file((out_dir / "distributions.csv").string(), distributions.str(), error)) {
        return fail_input(error);
    }
    std::cout << summary.value;
    std::cerr << "wrote " << (out_dir / "report.json").string() << ", "
              << (out_dir / "legs.csv").string() << ", "
              << (out_dir / "distributions.csv").string() << "\n";
    return 0;
}

struct ReportOptions {
    std::string config_path;
    std::string corpus;
    std::string simulation;
    std::string out;
};

struct DistributionRow {
    std::string source;
    std::string team;
    std::string metric;
    std::string value;
};

bool parse_distribution_rows(const std::string& text, const std::string& source,
                             std::vector<DistributionRow>& rows, std::string& error) {
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != "team,metric,value") {
                error = "unexpected distribution header '" + line + "'";
                return false;
            }
            continue;
        }
        auto comma1 = line.find(',');
        auto comma2 = line.find(',', comma1 == std::string::npos ? 0 : comma1 + 1);
        if (comma1 == std::string::npos || comma2 == std::string::npos) {
            error = "malformed distribution row '" + line + "'";
            return false;
        }
        rows.push_back({source, line.substr(0, comma1),
                        line.substr(comma1 + 1, comma2 - comma1 - 1), line.substr(comma2 + 1)});
    }
    if (first) {
        error = "distribution data is empty";
        return false;
    }
    return true;
}

int run_report(const CLI::App& sub, ReportOptions& opt) {
    ConfigMerge config;
    std::string error;
    if (!config.load(opt.config_path, error)) return fail_input(error);
    if (!config.merge(sub, "--corpus", opt.corpus, error) ||
        !config.merge(sub, "--simulation", opt.simulation, error) ||
        !config.merge(sub, "--out", opt.out, error) || !config.finish(error)) {
        return fail_input(error);
    }
    if (opt.corpus.empty() && opt.simulation.empty()) {
        return fail_input("report: provide --corpus and/or --simulation");
    }
    if (opt.out.empty()) return fail_input("report: --out is required");
    if (!ensure_directory(opt.out, error)) return fail_input(error);

    std::filesystem::path out_dir(opt.out);
    std::vector<DistributionRow> rows;

    if (!opt.corpus.empty()) {
        CorpusHandle corpus;
        ko_status status = ko_corpus_load(opt.corpus.c_str(), &corpus.value);
        if (status != KO_OK) return fail(status);

        ApiString correlations;
        status = ko_corpus_correlations_csv(corpus.value, &correlations.value);
        if (status != KO_OK) return fail(status);
        std::string correlations_path = (out_dir / "correlations.csv").string();
        if (!write_text_file(correlations_path, correlations.str(), error)) {
            return fail_input(error);
        }
        std::cout << "correlation with goals (" << correlations_path << "):\n";
        std::istringstream in(correlations.str());
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (!line.empty()) std::cout << "  " << line << "\n";
        }

        ApiString corpus_rows;
        status = ko_corpus_distributions_csv(corpus.value, &corpus_rows.value);
        if (status != KO_OK) return fail(status);
        if (!parse_distribution_rows(corpus_rows.str(), "corpus", rows, error)) {
            return fail_input("report: " + error);
        }
    }

    if (!opt.simulation.empty()) {
        std::filesystem::path sim_path(opt.simulation);
        if (std::filesystem::is_directory(sim_path)) sim_path /= "distributions.csv";
        std::string text;
        if (!read_text_file(sim_path.string(), text, error)) {
            return fail_input("report: " + error + " (run simulate first)");
        }
        if (!parse_distribution_rows(text, "simulation", rows, error)) {
            return fail_input("report: '" + sim_path.string() + "': " + error);
        }
    }

    std::string combined = "source,team,metric,value\n";
    for (const auto& row : rows) {
        combined += row.source + "," + row.team + "," + row.metric + "," + row.value + "\n";
    }
    std::string distributions_path = (out_dir / "distributions.csv").string();
    if (!write_text_file(distributions_path, combined, error)) return fail_input(error);

    // Per-source per-metric means over all teams, so corpus and simulated
    // distributions line up side by side.
    std::map<std::string, std::pair<double, int>> means;
    for (const auto& row : rows) {
        double value = 0.0;
        try {
            value = std::stod(row.value);
        } catch (const std::exception&) {
            return fail_input("report: non-numeric distribution value '" + row.value + "'");
        }
        auto& slot = means[row.metric + " (" + row.source + ")"];
        slot.first += value;
        slot.second += 1;
    }
    std::cout << "distribution means (" << distributions_path << "):\n";
    for (const auto& [label, slot] : means) {
        std::printf("  %-28s %.2f\n", label.c_str(), slot.first / slot.second);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knockout tournament simulation pipeline"};
    app.require_subcommand(1);

    IngestOptions ingest_opt;
    CLI::App* ingest = app.add_subcommand(
        "ingest", "validate match CSVs (or generate a synthetic corpus) into a corpus bundle");
    ingest->add_option("--config", ingest_opt.config_path, "JSON config file; flags override it");
    ingest->add_option("--team-csv", ingest_opt.team_csv, "per-team match rows");
    ingest->add_option("--player-csv", ingest_opt.player_csv, "per-player match rows");
    ingest->add_option("--out", ingest_opt.out, "corpus bundle path to write");
    ingest->add_flag("--synthetic", ingest_opt.synthetic, "generate a synthetic corpus instead");
    ingest->add_option("--seed", ingest_opt.seed, "synthetic generator seed");
    ingest->add_option("--synthetic-teams", ingest_opt.synthetic_teams, "synthetic team count");
    ingest->add_option("--synthetic-matches", ingest_opt.synthetic_matches,
                       "synthetic match count");
    ingest->add_option("--synthetic-players", ingest_opt.synthetic_players,
                       "synthetic squad size");

    TrainOptions train_opt;
    CLI::App* train = app.add_subcommand(
        "train", "train the team and player models from a corpus bundle");
    train->add_option("--config", train_opt.config_path, "JSON config file; flags override it");
    train->add_option("--corpus", train_opt.corpus, "corpus bundle from ingest");
    train->add_option("--out", train_opt.out, "directory for model artifacts");
    train->add_option("--seed", train_opt.seed, "training seed");
    train->add_option("--epochs", train_opt.epochs, "training epochs");
    train->add_option("--lr", train_opt.lr, "learning rate");
    train->add_option("--batch", train_opt.batch, "minibatch size");
    train->add_option("--sigma", train_opt.sigma, "input noise sigma");
    train->add_option("--val-fraction", train_opt.val_fraction, "validation split fraction");

    SimulateOptions simulate_opt;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "simulate the unplayed legs of a knockout bracket");
    simulate->add_option("--config", simulate_opt.config_path,
                         "JSON config file; flags override it");
    simulate->add_option("--corpus", simulate_opt.corpus, "corpus bundle from ingest");
    simulate->add_option("--team-model", simulate_opt.team_model, "team model artifact");
    simulate->add_option("--player-model", simulate_opt.player_model, "player model artifact");
    simulate->add_option("--bracket", simulate_opt.bracket, "bracket JSON");
    simulate->add_option("--out", simulate_opt.out, "directory for report files");
    simulate->add_option("--runs", simulate_opt.runs, "Monte Carlo run count");
    simulate->add_option("--seed", simulate_opt.seed, "simulation seed");

    ReportOptions report_opt;
    CLI::App* report = app.add_subcommand(
        "report", "summarize corpus correlations and corpus-vs-simulation distributions");
    report->add_option("--config", report_opt.config_path, "JSON config file; flags override it");
    report->add_option("--corpus", report_opt.corpus, "corpus bundle from ingest");
    report->add_option("--simulation", report_opt.simulation,
                       "simulate output directory (or its distributions.csv)");
    report->add_option("--out", report_opt.out, "directory for report files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (ingest->parsed()) return run_ingest(*ingest, ingest_opt);
    if (train->parsed()) return run_train(*train, train_opt);
    if (simulate->parsed()) return run_simulate(*simulate, simulate_opt);
    if (report->parsed()) return run_report(*report, report_opt);
    return 2;
}
