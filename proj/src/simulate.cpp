#include "simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace kosim::sim {

using nlohmann::json;
using ingest::Round;
using ingest::TeamStats;

namespace {

int round_half_up(double x) { return int(std::floor(x + 0.5)); }

int nonneg_count(double x) { return std::max(0, round_half_up(x)); }

} // namespace

std::vector<int> largest_remainder_allocate(int total, const std::vector<double>& weights) {
    if (total < 0)
        throw_error(ErrorKind::RangeViolation, "cannot allocate a negative total");
    const std::size_t n = weights.size();
    std::vector<int> out(n, 0);
    if (total == 0 || n == 0) return out;

    std::vector<double> w(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::max(0.0, weights[i]);
        sum += w[i];
    }
    std::vector<double> quota(n);
    for (std::size_t i = 0; i < n; ++i)
        quota[i] = sum > 0.0 ? total * w[i] / sum : double(total) / double(n);

    int assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = int(std::floor(quota[i]));
        assigned += out[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double fa = quota[a] - std::floor(quota[a]);
        double fb = quota[b] - std::floor(quota[b]);
        if (fa != fb) return fa > fb;
        return w[a] > w[b];
    });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
        out[order[k]] += 1;
        assigned += 1;
    }
    return out;
}

std::pair<TeamStats, TeamStats>
reconcile_team_stats(const std::vector<double>& raw_home, const std::vector<double>& raw_away) {
    if (raw_home.size() != ingest::kTeamStatCount || raw_away.size() != ingest::kTeamStatCount)
        throw_error(ErrorKind::DimensionMismatch, "stat vectors must have 20 components");

    int possession_idx = -1, passes_idx = -1, accuracy_idx = -1, completed_idx = -1,
        distance_idx = -1;
    for (int i = 0; i < ingest::kTeamStatCount; ++i) {
        if (ingest::kTeamStatNames[i] == "possession_pct") possession_idx = i;
        else if (ingest::kTeamStatNames[i] == "passes") passes_idx = i;
        else if (ingest::kTeamStatNames[i] == "pass_accuracy_pct") accuracy_idx = i;
        else if (ingest::kTeamStatNames[i] == "passes_completed") completed_idx = i;
        else if (ingest::kTeamStatNames[i] == "distance_covered_km") distance_idx = i;
    }

    std::vector<double> home(ingest::kTeamStatCount), away(ingest::kTeamStatCount);
    for (int i = 0; i < ingest::kTeamStatCount; ++i) {
        if (i == possession_idx || i == accuracy_idx) continue;
        if (i == distance_idx) {
            home[i] = std::max(0.0, raw_home[i]);
            away[i] = std::max(0.0, raw_away[i]);
        } else {
            home[i] = nonneg_count(raw_home[i]);
            away[i] = nonneg_count(raw_away[i]);
        }
    }

    double ph = std::max(0.0, raw_home[possession_idx]);
    double pa = std::max(0.0, raw_away[possession_idx]);
    int away_possession = ph + pa > 0.0 ? round_half_up(100.0 * pa / (ph + pa)) : 50;
    home[possession_idx] = 100 - away_possession;
    away[possession_idx] = away_possession;

    for (auto* side : {&home, &away}) {
        double& passes = (*side)[passes_idx];
        double& completed = (*side)[completed_idx];
        completed = std::min(completed, passes);
        (*side)[accuracy_idx] = passes > 0.0 ? 100.0 * completed / passes : 0.0;
    }

    return {TeamStats::from_vector(home), TeamStats::from_vector(away)};
}

PlayerAllocation assign_player_stats(
    int team_goals, const std::string& team,
    const std::vector<std::pair<std::string, std::vector<double>>>& player_raws) {
    if (team_goals < 0)
        throw_error(ErrorKind::RangeViolation, "team goals cannot be negative");
    if (team_goals > 0 && player_raws.empty())
        throw_error(ErrorKind::NoPlayersForScoringTeam,
                    "team '" + team + "' scored but has no attributable players");

    int goals_idx = -1, assists_idx = -1;
    for (int i = 0; i < ingest::kPlayerStatCount; ++i) {
        if (ingest::kPlayerStatNames[i] == "goals") goals_idx = i;
        else if (ingest::kPlayerStatNames[i] == "assists") assists_idx = i;
    }

    std::vector<double> goal_raw, assist_raw;
    for (const auto& [player, raw] : player_raws) {
        if (raw.size() != ingest::kPlayerStatCount)
            throw_error(ErrorKind::DimensionMismatch,
                        "player '" + player + "' prediction must have 9 components");
        goal_raw.push_back(raw[goals_idx]);
        assist_raw.push_back(raw[assists_idx]);
    }

    PlayerAllocation alloc;
    std::vector<int> goals = largest_remainder_allocate(team_goals, goal_raw);
    for (std::size_t i = 0; i < player_raws.size(); ++i)
        if (goals[i] > 0)
            alloc.scorers.push_back({player_raws[i].first, team, goals[i]});

    double assist_sum = 0.0;
    for (double a : assist_raw) assist_sum += std::max(0.0, a);
    int assist_total = std::min(team_goals, nonneg_count(assist_sum));
    std::vector<int> assists = largest_remainder_allocate(assist_total, assist_raw);
    for (std::size_t i = 0; i < player_raws.size(); ++i)
        if (assists[i] > 0)
            alloc.assists.push_back({player_raws[i].first, team, assists[i]});
    return alloc;
}

const char* decided_by_name(DecidedBy d) {
    switch (d) {
    case DecidedBy::Goals: return "goals";
    case DecidedBy::ShotsOnTarget: return "shots_on_target";
    case DecidedBy::Experience: return "experience";
    case DecidedBy::CoinFlip: return "coin_flip";
    }
    return "goals";
}

std::pair<bool, DecidedBy> decide_fixture(const std::vector<LegScore>& legs,
                                          int experience_a, int experience_b, Rng& rng) {
    int goals_a = 0, goals_b = 0, shots_a = 0, shots_b = 0;
    for (const LegScore& leg : legs) {
        goals_a += leg.goals_a;
        goals_b += leg.goals_b;
        shots_a += leg.shots_a;
        shots_b += leg.shots_b;
    }
    if (goals_a != goals_b) return {goals_a > goals_b, DecidedBy::Goals};
    if (shots_a != shots_b) return {shots_a > shots_b, DecidedBy::ShotsOnTarget};
    if (experience_a != experience_b) return {experience_a > experience_b, DecidedBy::Experience};
    return {rng.coin(), DecidedBy::CoinFlip};
}

SimContext prepare_simulation(const Bracket& bracket, const dae::TrainedModel& team_model,
                              const dae::TrainedModel& player_model,
                              const ingest::Corpus& corpus) {
    validate_bracket(bracket);
    if (team_model.kind != dae::ModelKind::Team)
        throw_error(ErrorKind::CorruptArtifact, "a player model was passed as the team model");
    if (player_model.kind != dae::ModelKind::Player)
        throw_error(ErrorKind::CorruptArtifact, "a team model was passed as the player model");
    if (int(team_model.scaler.dim()) != ingest::kTeamStatCount)
        throw_error(ErrorKind::DimensionMismatch, "team model scaler must cover 20 stats");
    if (int(player_model.scaler.dim()) != ingest::kPlayerStatCount)
        throw_error(ErrorKind::DimensionMismatch, "player model scaler must cover 9 stats");
    if (team_model.params.input_dim() != features::kTeamInputDim ||
        team_model.params.output_dim() != features::kTeamInputDim)
        throw_error(ErrorKind::DimensionMismatch, "team model must map 43 inputs to 43 outputs");
    if (player_model.params.input_dim() != features::kPlayerInputDim ||
        player_model.params.output_dim() != features::kPlayerInputDim)
        throw_error(ErrorKind::DimensionMismatch, "player model must map 32 inputs to 32 outputs");

    features::CorpusIndex index(corpus);
    SimContext ctx;
    ctx.team_model = &team_model;
    ctx.player_model = &player_model;
    ctx.max_team_experience = std::max(1, index.max_team_experience());
    ctx.max_player_experience = std::max(1, index.max_player_experience());

    const ingest::Date after_everything{9999, 12, 31};
    for (const std::string& team : bracket_teams(bracket)) {
        if (!index.has_team(team))
            throw_error(ErrorKind::UnknownTeam,
                        "team '" + team + "' has no history in the corpus");
        ctx.team_embeddings[team] = features::team_embedding(index, team_model.scaler, team);
        ctx.initial_state.form[team] = index.recent_form(team, after_everything);
        ctx.initial_state.team_experience[team] = int(index.team_rows(team).size());

        std::vector<std::string> active;
        for (const std::string& player : bracket.squads.at(team)) {
            if (!index.has_player(player)) {
                ctx.warnings.push_back("player '" + player + "' (team '" + team +
                                       "') has no corpus history and is skipped");
                continue;
            }
            ctx.player_embeddings[player] =
                features::player_embedding(index, player_model.scaler, player);
            ctx.initial_state.player_experience[player] =
                int(index.player_rows(player).size());
            active.push_back(player);
        }
        ctx.active_squads[team] = std::move(active);
    }
    std::sort(ctx.warnings.begin(), ctx.warnings.end());
    return ctx;
}

namespace {

// First 20 (team) / 9 (player) output components carry the stat prediction.
std::vector<double> predict_side_stats(const SimContext& ctx, const RunState& state,
                                       const std::string& team, const std::string& opponent,
                                       bool home_flag, Rng& rng) {
    const auto& emb = ctx.team_embeddings;
    auto it_team = emb.find(team);
    auto it_opp = emb.find(opponent);
    if (it_team == emb.end())
        throw_error(ErrorKind::UnknownTeam, "team '" + team + "' was never prepared");
    if (it_opp == emb.end())
        throw_error(ErrorKind::UnknownTeam, "team '" + opponent + "' was never prepared");

    int form = features::form_index(state.form.at(team));
    double exp_norm = std::min(1.0, double(state.team_experience.at(team)) /
                                        double(ctx.max_team_experience));
    std::vector<double> input =
        features::make_team_input(it_team->second, it_opp->second, home_flag, form, exp_norm);
    std::vector<double> noisy = dae::add_gaussian_noise(
        input, ctx.team_model->config.noise_sigma, rng, features::team_clean_mask());
    std::vector<double> output = dae::predict(*ctx.team_model, noisy);
    std::vector<double> normalized(output.begin(), output.begin() + ingest::kTeamStatCount);
    return features::inverse_transform(ctx.team_model->scaler, normalized);
}

std::vector<std::pair<std::string, std::vector<double>>>
predict_side_players(const SimContext& ctx, const RunState& state, const std::string& team,
                     bool home_flag, Rng& rng) {
    std::vector<std::pair<std::string, std::vector<double>>> raws;
    auto squad_it = ctx.active_squads.find(team);
    if (squad_it == ctx.active_squads.end())
        throw_error(ErrorKind::MissingSquad, "team '" + team + "' was never prepared");
    int form = features::form_index(state.form.at(team));
    const std::vector<double>& team_emb = ctx.team_embeddings.at(team);
    for (const std::string& player : squad_it->second) {
        double exp_norm = std::min(1.0, double(state.player_experience.at(player)) /
                                            double(ctx.max_player_experience));
        std::vector<double> input = features::make_player_input(
            ctx.player_embeddings.at(player), team_emb, home_flag, form, exp_norm);
        std::vector<double> noisy = dae::add_gaussian_noise(
            input, ctx.player_model->config.noise_sigma, rng, features::player_clean_mask());
        std::vector<double> output = dae::predict(*ctx.player_model, noisy);
        std::vector<double> normalized(output.begin(),
                                       output.begin() + ingest::kPlayerStatCount);
        raws.emplace_back(player,
                          features::inverse_transform(ctx.player_model->scaler, normalized));
    }
    return raws;
}

} // namespace

LegPrediction predict_leg(const SimContext& ctx, const RunState& state,
                          const std::string& home_team, const std::string& away_team,
                          bool neutral, Rng& rng) {
    std::vector<double> raw_home =
        predict_side_stats(ctx, state, home_team, away_team, !neutral, rng);
    std::vector<double> raw_away =
        predict_side_stats(ctx, state, away_team, home_team, false, rng);

    LegPrediction leg;
    std::tie(leg.home, leg.away) = reconcile_team_stats(raw_home, raw_away);

    auto home_raws = predict_side_players(ctx, state, home_team, !neutral, rng);
    auto away_raws = predict_side_players(ctx, state, away_team, false, rng);
    PlayerAllocation home_alloc = assign_player_stats(leg.home.goals, home_team, home_raws);
    PlayerAllocation away_alloc = assign_player_stats(leg.away.goals, away_team, away_raws);

    leg.scorers = std::move(home_alloc.scorers);
    leg.scorers.insert(leg.scorers.end(), away_alloc.scorers.begin(), away_alloc.scorers.end());
    leg.assists = std::move(home_alloc.assists);
    leg.assists.insert(leg.assists.end(), away_alloc.assists.begin(), away_alloc.assists.end());
    return leg;
}

void apply_leg(const SimContext& ctx, RunState& state, const std::string& home_team,
               const std::string& away_team, const LegPrediction& leg) {
    features::MatchResult home_result =
        leg.home.goals > leg.away.goals  ? features::MatchResult::Win
        : leg.home.goals < leg.away.goals ? features::MatchResult::Loss
                                          : features::MatchResult::Draw;
    features::MatchResult away_result =
        home_result == features::MatchResult::Win    ? features::MatchResult::Loss
        : home_result == features::MatchResult::Loss ? features::MatchResult::Win
                                                     : features::MatchResult::Draw;
    state.form[home_team] = features::update_form(std::move(state.form[home_team]), home_result);
    state.form[away_team] = features::update_form(std::move(state.form[away_team]), away_result);
    state.team_experience[home_team] += 1;
    state.team_experience[away_team] += 1;
    for (const std::string& team : {home_team, away_team})
        for (const std::string& player : ctx.active_squads.at(team))
            state.player_experience[player] += 1;
}

namespace {

std::string resolve_slot(const std::string& slot,
                         const std::map<std::string, std::string>& winners) {
    if (!is_winner_placeholder(slot)) return slot;
    auto it = winners.find(placeholder_source(slot));
    if (it == winners.end())
        throw_error(ErrorKind::InvalidBracket,
                    "slot '" + slot + "' references a fixture that has not been decided");
    return it->second;
}

void append_distribution_rows(std::vector<DistributionRow>& rows, const std::string& team,
                              const TeamStats& stats) {
    rows.push_back({team, "passes", double(stats.passes)});
    rows.push_back({team, "possession", stats.possession_pct});
    rows.push_back({team, "corners", double(stats.corners)});
}

LegPrediction recorded_leg_prediction(const LegResult& result) {
    return {result.home, result.away, result.scorers, result.assists};
}

RunOutcome run_bracket_once(const Bracket& bracket, const SimContext& ctx, Rng& rng,
                            std::vector<DistributionRow>* distributions) {
    std::vector<std::vector<const Fixture*>> by_round(bracket.rounds.size());
    for (const Fixture& fx : bracket.fixtures) {
        auto it = std::find(bracket.rounds.begin(), bracket.rounds.end(), fx.round);
        by_round[std::size_t(it - bracket.rounds.begin())].push_back(&fx);
    }

    RunState state = ctx.initial_state;
    std::map<std::string, std::string> winners;
    RunOutcome outcome;
    for (const auto& round_fixtures : by_round) {
        for (const Fixture* fx : round_fixtures) {
            FixtureOutcome fo;
            fo.fixture_id = fx->fixture_id;
            fo.round = fx->round;
            fo.team_a = resolve_slot(fx->team_a, winners);
            fo.team_b = resolve_slot(fx->team_b, winners);

            std::vector<LegScore> scores;
            for (std::size_t i = 0; i < fx->legs.size(); ++i) {
                const Leg& leg = fx->legs[i];
                LegOutcome lo;
                lo.leg_number = int(i) + 1;
                lo.home_team = resolve_slot(leg.venue_team, winners);
                lo.away_team = lo.home_team == fo.team_a ? fo.team_b : fo.team_a;
                lo.neutral = fx->round == Round::Final;
                if (leg.played) {
                    lo.recorded = true;
                    lo.prediction = recorded_leg_prediction(*leg.result);
                } else {
                    lo.prediction =
                        predict_leg(ctx, state, lo.home_team, lo.away_team, lo.neutral, rng);
                    apply_leg(ctx, state, lo.home_team, lo.away_team, lo.prediction);
                    if (distributions) {
                        append_distribution_rows(*distributions, lo.home_team,
                                                 lo.prediction.home);
                        append_distribution_rows(*distributions, lo.away_team,
                                                 lo.prediction.away);
                    }
                }
                bool home_is_a = lo.home_team == fo.team_a;
                LegScore score;
                score.goals_a = home_is_a ? lo.prediction.home.goals : lo.prediction.away.goals;
                score.goals_b = home_is_a ? lo.prediction.away.goals : lo.prediction.home.goals;
                score.shots_a = home_is_a ? lo.prediction.home.attempts_on_target
                                          : lo.prediction.away.attempts_on_target;
                score.shots_b = home_is_a ? lo.prediction.away.attempts_on_target
                                          : lo.prediction.home.attempts_on_target;
                scores.push_back(score);
                fo.legs.push_back(std::move(lo));
            }

            for (const LegScore& s : scores) {
                fo.goals_a += s.goals_a;
                fo.goals_b += s.goals_b;
                fo.shots_a += s.shots_a;
                fo.shots_b += s.shots_b;
            }
            auto [a_wins, decided_by] =
                decide_fixture(scores, state.team_experience.at(fo.team_a),
                               state.team_experience.at(fo.team_b), rng);
            fo.winner = a_wins ? fo.team_a : fo.team_b;
            fo.decided_by = decided_by;
            winners[fo.fixture_id] = fo.winner;
            outcome.fixtures.push_back(std::move(fo));
        }
    }
    outcome.champion = outcome.fixtures.back().winner;
    return outcome;
}

} // namespace

SimulationReport simulate_bracket(const Bracket& bracket, const dae::TrainedModel& team_model,
                                  const dae::TrainedModel& player_model,
                                  const ingest::Corpus& corpus, int runs, std::uint64_t seed) {
    if (runs < 1)
        throw_error(ErrorKind::RangeViolation, "runs must be at least 1");
    SimContext ctx = prepare_simulation(bracket, team_model, player_model, corpus);

    SimulationReport report;
    report.seed = seed;
    report.runs = runs;
    report.warnings = ctx.warnings;
    for (int r = 0; r < runs; ++r) {
        Rng rng(derive_stream(seed, std::uint64_t(r)));
        RunOutcome outcome = run_bracket_once(bracket, ctx, rng, &report.distributions);
        report.champion_counts[outcome.champion] += 1;
        if (r == 0) report.narrative = std::move(outcome);
    }
    return report;
}

namespace {

json stats_to_json(const TeamStats& s) {
    json j;
    std::vector<double> v = s.to_vector();
    for (int i = 0; i < ingest::kTeamStatCount; ++i) {
        std::string name(ingest::kTeamStatNames[i]);
        if (ingest::team_stat_real_valued(i)) j[name] = v[i];
        else j[name] = static_cast<long long>(std::llround(v[i]));
    }
    return j;
}

json player_counts_to_json(const std::vector<PlayerCount>& entries, const char* value_key) {
    json arr = json::array();
    for (const PlayerCount& e : entries)
        arr.push_back({{"player", e.player}, {"team", e.team}, {value_key, e.count}});
    return arr;
}

} // namespace

std::string report_to_json(const SimulationReport& report) {
    json j;
    j["version"] = 1;
    j["kind"] = "simulation_report";
    j["seed"] = report.seed;
    j["runs"] = report.runs;
    j["warnings"] = report.warnings;
    j["champion"] = report.narrative.champion;

    json fixtures = json::array();
    for (const FixtureOutcome& fo : report.narrative.fixtures) {
        json jf;
        jf["fixture_id"] = fo.fixture_id;
        jf["round"] = ingest::round_name(fo.round);
        jf["team_a"] = fo.team_a;
        jf["team_b"] = fo.team_b;
        jf["goals_a"] = fo.goals_a;
        jf["goals_b"] = fo.goals_b;
        jf["shots_on_target_a"] = fo.shots_a;
        jf["shots_on_target_b"] = fo.shots_b;
        jf["winner"] = fo.winner;
        jf["decided_by"] = decided_by_name(fo.decided_by);
        json legs = json::array();
        for (const LegOutcome& lo : fo.legs) {
            json jl;
            jl["leg"] = lo.leg_number;
            jl["home_team"] = lo.home_team;
            jl["away_team"] = lo.away_team;
            jl["neutral"] = lo.neutral;
            jl["recorded"] = lo.recorded;
            jl["home"] = stats_to_json(lo.prediction.home);
            jl["away"] = stats_to_json(lo.prediction.away);
            jl["scorers"] = player_counts_to_json(lo.prediction.scorers, "goals");
            jl["assists"] = player_counts_to_json(lo.prediction.assists, "count");
            legs.push_back(std::move(jl));
        }
        jf["legs"] = std::move(legs);
        fixtures.push_back(std::move(jf));
    }
    j["fixtures"] = std::move(fixtures);

    if (report.runs > 1) {
        j["champion_counts"] = report.champion_counts;
        json freq;
        for (const auto& [team, count] : report.champion_counts)
            freq[team] = double(count) / double(report.runs);
        j["win_frequencies"] = std::move(freq);
    }
    return j.dump(2) + "\n";
}

std::string report_legs_csv(const SimulationReport& report) {
    std::vector<std::string> header = {"fixture_id", "round", "leg",
                                       "recorded", "home_team", "away_team"};
    for (const char* side : {"home", "away"})
        for (int i = 0; i < ingest::kTeamStatCount; ++i)
            header.push_back(std::string(side) + "_" + std::string(ingest::kTeamStatNames[i]));

    std::string out = csv::join_row(header);
    for (const FixtureOutcome& fo : report.narrative.fixtures) {
        for (const LegOutcome& lo : fo.legs) {
            std::vector<std::string> row = {fo.fixture_id,
                                            std::string(ingest::round_name(fo.round)),
                                            std::to_string(lo.leg_number),
                                            lo.recorded ? "1" : "0",
                                            lo.home_team,
                                            lo.away_team};
            for (const TeamStats* side : {&lo.prediction.home, &lo.prediction.away}) {
                std::vector<double> v = side->to_vector();
                for (int i = 0; i < ingest::kTeamStatCount; ++i) {
                    if (ingest::team_stat_real_valued(i)) row.push_back(csv::format_double(v[i]));
                    else row.push_back(std::to_string(int(std::llround(v[i]))));
                }
            }
            out += csv::join_row(row);
        }
    }
    return out;
}

std::string report_distributions_csv(const SimulationReport& report) {
    std::string out = csv::join_row({"team", "metric", "value"});
    for (const DistributionRow& row : report.distributions)
        out += csv::join_row({row.team, row.metric, csv::format_double(row.value)});
    return out;
}

std::string report_summary_text(const SimulationReport& report) {
    std::string out;
    for (const FixtureOutcome& fo : report.narrative.fixtures) {
        out += std::string(ingest::round_name(fo.round)) + " " + fo.fixture_id + ": " +
               fo.team_a + " vs " + fo.team_b + " -> " + fo.winner + " (aggregate " +
               std::to_string(fo.goals_a) + "-" + std::to_string(fo.goals_b) + ", decided by " +
               decided_by_name(fo.decided_by) + ")\n";
    }
    out += "champion: " + report.narrative.champion + "\n";
    if (report.runs > 1) {
        out += "win frequencies over " + std::to_string(report.runs) + " runs:\n";
        for (const auto& [team, count] : report.champion_counts) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f", double(count) / double(report.runs));
            out += "  " + team + ": " + buf + "\n";
        }
    }
    return out;
}

} // namespace kosim::sim
