#include "features.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace kosim::features {

using nlohmann::json;

ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& feature_names) {
    if (rows.empty())
        throw_error(ErrorKind::EmptyCorpus, "cannot fit a scaler on zero rows");
    const std::size_t dim = feature_names.size();
    ScalerParams scaler;
    scaler.features = feature_names;
    scaler.mins.assign(dim, 0.0);
    scaler.maxs.assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        scaler.mins[j] = rows[0].size() == dim ? rows[0][j] : 0.0;
        scaler.maxs[j] = scaler.mins[j];
    }
    for (const auto& row : rows) {
        if (row.size() != dim)
            throw_error(ErrorKind::DimensionMismatch,
                        "scaler row has " + std::to_string(row.size()) + " values, expected " +
                        std::to_string(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            scaler.mins[j] = std::min(scaler.mins[j], row[j]);
            scaler.maxs[j] = std::max(scaler.maxs[j], row[j]);
        }
    }
    return scaler;
}

static void check_dim(const ScalerParams& scaler, const std::vector<double>& v) {
    if (v.size() != scaler.dim())
        throw_error(ErrorKind::DimensionMismatch,
                    "vector has " + std::to_string(v.size()) + " values, scaler expects " +
                    std::to_string(scaler.dim()));
}

std::vector<double> transform(const ScalerParams& scaler, const std::vector<double>& v) {
    check_dim(scaler, v);
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        double range = scaler.maxs[j] - scaler.mins[j];
        out[j] = range == 0.0 ? 0.0 : (v[j] - scaler.mins[j]) / range;
    }
    return out;
}

std::vector<double> inverse_transform(const ScalerParams& scaler, const std::vector<double>& v) {
    check_dim(scaler, v);
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        double range = scaler.maxs[j] - scaler.mins[j];
        out[j] = range == 0.0 ? scaler.mins[j] : scaler.mins[j] + v[j] * range;
    }
    return out;
}

std::string scaler_to_json(const ScalerParams& scaler) {
    json j;
    j["features"] = scaler.features;
    j["mins"] = scaler.mins;
    j["maxs"] = scaler.maxs;
    return j.dump();
}

ScalerParams scaler_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact, std::string("scaler is not valid JSON: ") + e.what());
    }
    try {
        ScalerParams scaler;
        scaler.features = j.at("features").get<std::vector<std::string>>();
        scaler.mins = j.at("mins").get<std::vector<double>>();
        scaler.maxs = j.at("maxs").get<std::vector<double>>();
        if (scaler.mins.size() != scaler.features.size() ||
            scaler.maxs.size() != scaler.features.size())
            throw_error(ErrorKind::CorruptArtifact, "scaler arrays have mismatched lengths");
        return scaler;
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact, std::string("scaler is malformed: ") + e.what());
    }
}

int form_index(const FormWindow& window) {
    if (window.size() > 5)
        throw_error(ErrorKind::RangeViolation,
                    "form window holds " + std::to_string(window.size()) + " results, limit is 5");
    int score = 0;
    for (MatchResult r : window) {
        if (r == MatchResult::Win) score += 3;
        else if (r == MatchResult::Draw) score += 1;
    }
    return score;
}

FormWindow update_form(FormWindow window, MatchResult result) {
    window.push_back(result);
    if (window.size() > 5) window.erase(window.begin());
    return window;
}

std::optional<double> pearson_correlation(const std::vector<double>& x,
                                          const std::vector<double>& y) {
    if (x.size() != y.size())
        throw_error(ErrorKind::DimensionMismatch,
                    "correlation series have lengths " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::pair<std::string, std::optional<double>>>
correlation_with_goals(const ingest::Corpus& corpus) {
    std::vector<std::vector<double>> columns(ingest::kTeamStatCount);
    for (const auto& row : corpus.team_rows) {
        std::vector<double> v = row.stats.to_vector();
        for (int j = 0; j < ingest::kTeamStatCount; ++j) columns[j].push_back(v[j]);
    }
    std::size_t goals_col = 0;
    for (int j = 0; j < ingest::kTeamStatCount; ++j)
        if (ingest::kTeamStatNames[j] == "goals") goals_col = j;

    std::vector<std::pair<std::string, std::optional<double>>> ranked;
    for (int j = 0; j < ingest::kTeamStatCount; ++j) {
        if (std::size_t(j) == goals_col) continue;
        ranked.emplace_back(std::string(ingest::kTeamStatNames[j]),
                            pearson_correlation(columns[j], columns[goals_col]));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.has_value() != b.second.has_value()) return a.second.has_value();
        if (a.second && b.second && *a.second != *b.second) return *a.second > *b.second;
        return a.first < b.first;
    });
    return ranked;
}

CorpusIndex::CorpusIndex(const ingest::Corpus& corpus) : corpus_(&corpus) {
    pairs_ = corpus.match_pairs();
    for (const auto& row : corpus.team_rows) by_team_[row.team].push_back(&row);
    for (auto& [team, rows] : by_team_) {
        std::sort(rows.begin(), rows.end(),
                  [](const ingest::TeamMatchRecord* a, const ingest::TeamMatchRecord* b) {
                      if (a->date != b->date) return a->date < b->date;
                      return a->match_id < b->match_id;
                  });
        max_team_experience_ = std::max(max_team_experience_, int(rows.size()));
    }
    for (const auto& row : corpus.player_rows) by_player_[row.player].push_back(&row);
    for (auto& [player, rows] : by_player_) {
        std::sort(rows.begin(), rows.end(),
                  [this](const ingest::PlayerMatchRecord* a, const ingest::PlayerMatchRecord* b) {
                      ingest::Date da = match_date(a->match_id), db = match_date(b->match_id);
                      if (da != db) return da < db;
                      return a->match_id < b->match_id;
                  });
        max_player_experience_ = std::max(max_player_experience_, int(rows.size()));
    }
}

bool CorpusIndex::has_team(const std::string& team) const { return by_team_.count(team) > 0; }
bool CorpusIndex::has_player(const std::string& player) const { return by_player_.count(player) > 0; }

const std::vector<const ingest::TeamMatchRecord*>&
CorpusIndex::team_rows(const std::string& team) const {
    auto it = by_team_.find(team);
    if (it == by_team_.end())
        throw_error(ErrorKind::UnknownEntity, "team '" + team + "' has no rows in the corpus");
    return it->second;
}

const std::vector<const ingest::PlayerMatchRecord*>&
CorpusIndex::player_rows(const std::string& player) const {
    auto it = by_player_.find(player);
    if (it == by_player_.end())
        throw_error(ErrorKind::UnknownEntity, "player '" + player + "' has no rows in the corpus");
    return it->second;
}

ingest::Date CorpusIndex::match_date(const std::string& match_id) const {
    auto it = pairs_.find(match_id);
    if (it == pairs_.end())
        throw_error(ErrorKind::UnknownEntity, "match '" + match_id + "' is not in the corpus");
    return it->second.first->date;
}

int CorpusIndex::opponent_goals(const ingest::TeamMatchRecord& row) const {
    auto it = pairs_.find(row.match_id);
    if (it == pairs_.end())
        throw_error(ErrorKind::UnknownEntity, "match '" + row.match_id + "' is not in the corpus");
    const auto& [home, away] = it->second;
    return row.home ? away->stats.goals : home->stats.goals;
}

MatchResult CorpusIndex::result_for(const ingest::TeamMatchRecord& row) const {
    int conceded = opponent_goals(row);
    if (row.stats.goals > conceded) return MatchResult::Win;
    if (row.stats.goals < conceded) return MatchResult::Loss;
    return MatchResult::Draw;
}

int CorpusIndex::team_experience(const std::string& team, const ingest::Date& as_of) const {
    auto it = by_team_.find(team);
    if (it == by_team_.end()) return 0;
    int count = 0;
    for (const auto* row : it->second)
        if (row->date < as_of) ++count;
    return count;
}

int CorpusIndex::player_experience(const std::string& player, const ingest::Date& as_of) const {
    auto it = by_player_.find(player);
    if (it == by_player_.end()) return 0;
    int count = 0;
    for (const auto* row : it->second)
        if (match_date(row->match_id) < as_of) ++count;
    return count;
}

FormWindow CorpusIndex::recent_form(const std::string& team, const ingest::Date& as_of) const {
    FormWindow window;
    auto it = by_team_.find(team);
    if (it == by_team_.end()) return window;
    for (const auto* row : it->second) {
        if (!(row->date < as_of)) break;
        window = update_form(std::move(window), result_for(*row));
    }
    return window;
}

static std::vector<double> mean_embedding(const std::vector<std::vector<double>>& normalized) {
    std::vector<double> mean(normalized.front().size(), 0.0);
    for (const auto& v : normalized)
        for (std::size_t j = 0; j < v.size(); ++j) mean[j] += v[j];
    for (double& m : mean) m /= double(normalized.size());
    return mean;
}

std::vector<double> team_embedding(const CorpusIndex& index, const ScalerParams& scaler,
                                   const std::string& team) {
    std::vector<std::vector<double>> normalized;
    for (const auto* row : index.team_rows(team))
        normalized.push_back(transform(scaler, row->stats.to_vector()));
    return mean_embedding(normalized);
}

std::vector<double> player_embedding(const CorpusIndex& index, const ScalerParams& scaler,
                                     const std::string& player) {
    std::vector<std::vector<double>> normalized;
    for (const auto* row : index.player_rows(player))
        normalized.push_back(transform(scaler, row->stats.to_vector()));
    return mean_embedding(normalized);
}

static void append_context(std::vector<double>& input, bool home, int form,
                           double experience_norm) {
    input.push_back(home ? 1.0 : 0.0);
    input.push_back(form / 15.0);
    input.push_back(experience_norm);
}

std::vector<double> make_team_input(const std::vector<double>& team_emb,
                                    const std::vector<double>& opponent_emb,
                                    bool home, int form, double experience_norm) {
    if (team_emb.size() != ingest::kTeamStatCount || opponent_emb.size() != ingest::kTeamStatCount)
        throw_error(ErrorKind::DimensionMismatch, "team embeddings must have 20 components");
    std::vector<double> input;
    input.reserve(kTeamInputDim);
    input.insert(input.end(), team_emb.begin(), team_emb.end());
    input.insert(input.end(), opponent_emb.begin(), opponent_emb.end());
    append_context(input, home, form, experience_norm);
    return input;
}

std::vector<double> make_player_input(const std::vector<double>& player_emb,
                                      const std::vector<double>& own_team_emb,
                                      bool home, int form, double experience_norm) {
    if (player_emb.size() != ingest::kPlayerStatCount ||
        own_team_emb.size() != ingest::kTeamStatCount)
        throw_error(ErrorKind::DimensionMismatch,
                    "player embedding must have 9 components and team embedding 20");
    std::vector<double> input;
    input.reserve(kPlayerInputDim);
    input.insert(input.end(), player_emb.begin(), player_emb.end());
    input.insert(input.end(), own_team_emb.begin(), own_team_emb.end());
    append_context(input, home, form, experience_norm);
    return input;
}

std::vector<bool> team_clean_mask() {
    std::vector<bool> mask(kTeamInputDim, false);
    for (int j = kTeamInputDim - kContextDim; j < kTeamInputDim; ++j) mask[j] = true;
    return mask;
}

std::vector<bool> player_clean_mask() {
    std::vector<bool> mask(kPlayerInputDim, false);
    for (int j = kPlayerInputDim - kContextDim; j < kPlayerInputDim; ++j) mask[j] = true;
    return mask;
}

ScalerParams fit_team_scaler(const ingest::Corpus& corpus) {
    std::vector<std::vector<double>> rows;
    rows.reserve(corpus.team_rows.size());
    for (const auto& row : corpus.team_rows) rows.push_back(row.stats.to_vector());
    std::vector<std::string> names(ingest::kTeamStatNames.begin(), ingest::kTeamStatNames.end());
    return fit_scaler(rows, names);
}

ScalerParams fit_player_scaler(const ingest::Corpus& corpus) {
    std::vector<std::vector<double>> rows;
    rows.reserve(corpus.player_rows.size());
    for (const auto& row : corpus.player_rows) rows.push_back(row.stats.to_vector());
    std::vector<std::string> names(ingest::kPlayerStatNames.begin(), ingest::kPlayerStatNames.end());
    return fit_scaler(rows, names);
}

std::string correlations_csv(const ingest::Corpus& corpus) {
    std::string out = csv::join_row({"feature", "pearson_r"});
    for (const auto& [feature, r] : correlation_with_goals(corpus))
        out += csv::join_row({feature, r ? csv::format_double(*r) : std::string()});
    return out;
}

std::string distributions_csv(const ingest::Corpus& corpus) {
    std::string out = csv::join_row({"team", "metric", "value"});
    for (const auto& row : corpus.team_rows) {
        out += csv::join_row({row.team, "passes", csv::format_double(double(row.stats.passes))});
        out += csv::join_row({row.team, "possession", csv::format_double(row.stats.possession_pct)});
        out += csv::join_row({row.team, "corners", csv::format_double(double(row.stats.corners))});
    }
    return out;
}

Dataset build_team_dataset(const CorpusIndex& index, const ScalerParams& scaler) {
    std::map<std::string, std::vector<double>> embeddings;
    for (const auto& team : index.corpus().stats.teams)
        embeddings[team] = team_embedding(index, scaler, team);

    Dataset dataset;
    dataset.clean_mask = team_clean_mask();
    const double max_exp = std::max(1, index.max_team_experience());
    for (const auto& row : index.corpus().team_rows) {
        int form = form_index(index.recent_form(row.team, row.date));
        double exp_norm = index.team_experience(row.team, row.date) / max_exp;
        dataset.inputs.push_back(make_team_input(embeddings.at(row.team),
                                                 embeddings.at(row.opponent),
                                                 row.home, form, exp_norm));
    }
    return dataset;
}

Dataset build_player_dataset(const CorpusIndex& index, const ScalerParams& team_scaler,
                             const ScalerParams& player_scaler) {
    std::map<std::string, std::vector<double>> team_embeddings;
    for (const auto& team : index.corpus().stats.teams)
        team_embeddings[team] = team_embedding(index, team_scaler, team);
    std::map<std::string, std::vector<double>> player_embeddings;
    for (const auto& player : index.corpus().stats.players)
        player_embeddings[player] = player_embedding(index, player_scaler, player);

    auto pairs = index.corpus().match_pairs();
    Dataset dataset;
    dataset.clean_mask = player_clean_mask();
    const double max_exp = std::max(1, index.max_player_experience());
    for (const auto& row : index.corpus().player_rows) {
        const auto& [home_row, away_row] = pairs.at(row.match_id);
        bool home = row.team == home_row->team;
        ingest::Date date = home_row->date;
        int form = form_index(index.recent_form(row.team, date));
        double exp_norm = index.player_experience(row.player, date) / max_exp;
        dataset.inputs.push_back(make_player_input(player_embeddings.at(row.player),
                                                   team_embeddings.at(row.team),
                                                   home, form, exp_norm));
    }
    return dataset;
}

} // namespace kosim::features
