#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace kosim::features {

// Column-wise MinMax parameters. Degenerate columns (min == max) transform
// to 0.0 and invert back to min, so round-trips stay exact.
struct ScalerParams {
    std::vector<std::string> features;
    std::vector<double> mins;
    std::vector<double> maxs;

    bool operator==(const ScalerParams&) const = default;
    std::size_t dim() const { return features.size(); }
};

ScalerParams fit_scaler(const std::vector<std::vector<double>>& rows,
                        const std::vector<std::string>& feature_names);
std::vector<double> transform(const ScalerParams& scaler, const std::vector<double>& v);
std::vector<double> inverse_transform(const ScalerParams& scaler, const std::vector<double>& v);

std::string scaler_to_json(const ScalerParams& scaler);
ScalerParams scaler_from_json(const std::string& text);

enum class MatchResult { Win, Draw, Loss };

// Most recent result last, at most five entries.
using FormWindow = std::vector<MatchResult>;

int form_index(const FormWindow& window);
FormWindow update_form(FormWindow window, MatchResult result);

// nullopt when either series is constant or shorter than 2.
std::optional<double> pearson_correlation(const std::vector<double>& x,
                                          const std::vector<double>& y);

// Every team stat except goals, correlated against goals across all team rows,
// sorted descending; undefined correlations sort last; ties break by name.
std::vector<std::pair<std::string, std::optional<double>>>
correlation_with_goals(const ingest::Corpus& corpus);

// Chronological per-entity lookups over a validated corpus. Rows are ordered
// by (date, match_id); "before" comparisons use the date alone.
class CorpusIndex {
public:
    explicit CorpusIndex(const ingest::Corpus& corpus);

    const ingest::Corpus& corpus() const { return *corpus_; }

    bool has_team(const std::string& team) const;
    bool has_player(const std::string& player) const;

    const std::vector<const ingest::TeamMatchRecord*>& team_rows(const std::string& team) const;
    const std::vector<const ingest::PlayerMatchRecord*>& player_rows(const std::string& player) const;

    // Goals conceded by the team on this row, from the paired opposite row.
    int opponent_goals(const ingest::TeamMatchRecord& row) const;
    MatchResult result_for(const ingest::TeamMatchRecord& row) const;

    int team_experience(const std::string& team, const ingest::Date& as_of) const;
    int player_experience(const std::string& player, const ingest::Date& as_of) const;
    FormWindow recent_form(const std::string& team, const ingest::Date& as_of) const;

    // Highest total row count over all teams / players; ≥ 1 for a non-empty corpus.
    int max_team_experience() const { return max_team_experience_; }
    int max_player_experience() const { return max_player_experience_; }

    ingest::Date match_date(const std::string& match_id) const;

private:
    const ingest::Corpus* corpus_;
    std::map<std::string, std::vector<const ingest::TeamMatchRecord*>> by_team_;
    std::map<std::string, std::vector<const ingest::PlayerMatchRecord*>> by_player_;
    std::map<std::string, std::pair<const ingest::TeamMatchRecord*, const ingest::TeamMatchRecord*>> pairs_;
    int max_team_experience_ = 0;
    int max_player_experience_ = 0;
};

// Component-wise mean of the entity's MinMax-normalized stat vectors.
std::vector<double> team_embedding(const CorpusIndex& index, const ScalerParams& scaler,
                                   const std::string& team);
std::vector<double> player_embedding(const CorpusIndex& index, const ScalerParams& scaler,
                                     const std::string& player);

inline constexpr int kContextDim = 3;
inline constexpr int kTeamInputDim = 2 * ingest::kTeamStatCount + kContextDim;
inline constexpr int kPlayerInputDim =
    ingest::kPlayerStatCount + ingest::kTeamStatCount + kContextDim;

// Model input = embeddings plus [home, form/15, experience/max]; the context
// tail is exact at prediction time, so noise never touches it.
std::vector<double> make_team_input(const std::vector<double>& team_emb,
                                    const std::vector<double>& opponent_emb,
                                    bool home, int form, double experience_norm);
std::vector<double> make_player_input(const std::vector<double>& player_emb,
                                      const std::vector<double>& own_team_emb,
                                      bool home, int form, double experience_norm);

std::vector<bool> team_clean_mask();
std::vector<bool> player_clean_mask();

struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<bool> clean_mask;
};

// One sample per team row / per player row, context as of that match's date.
Dataset build_team_dataset(const CorpusIndex& index, const ScalerParams& scaler);
Dataset build_player_dataset(const CorpusIndex& index, const ScalerParams& team_scaler,
                             const ScalerParams& player_scaler);

ScalerParams fit_team_scaler(const ingest::Corpus& corpus);
ScalerParams fit_player_scaler(const ingest::Corpus& corpus);

// feature,pearson_r rows in ranking order; undefined r serializes empty.
std::string correlations_csv(const ingest::Corpus& corpus);
// Tidy team,metric,value rows (passes, possession, corners) per team row.
std::string distributions_csv(const ingest::Corpus& corpus);

} // namespace kosim::features
