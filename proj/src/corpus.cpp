#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>
#include <utility>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace kosim::ingest {

using nlohmann::json;

namespace {

std::string compact_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::map<std::string, std::pair<const TeamMatchRecord*, const TeamMatchRecord*>> Corpus::match_pairs() const {
    std::map<std::string, std::pair<const TeamMatchRecord*, const TeamMatchRecord*>> pairs;
    for (const auto& row : team_rows) {
        auto& slot = pairs[row.match_id];
        if (row.home) slot.first = &row;
        else slot.second = &row;
    }
    return pairs;
}

CorpusStats validate_corpus(const std::vector<TeamMatchRecord>& team_rows,
                            const std::vector<PlayerMatchRecord>& player_rows) {
    CorpusStats stats;
    stats.n_team_rows = static_cast<int>(team_rows.size());
    stats.n_player_rows = static_cast<int>(player_rows.size());

    std::map<std::string, std::vector<const TeamMatchRecord*>> by_match;
    for (const auto& row : team_rows) {
        by_match[row.match_id].push_back(&row);
        stats.teams.insert(row.team);
        stats.seasons.insert(row.season);
    }

    for (const auto& [match_id, rows] : by_match) {
        if (rows.size() != 2)
            throw_error(ErrorKind::UnpairedMatch,
                        "match '" + match_id + "' has " + std::to_string(rows.size()) +
                        " team rows, expected 2");
        const TeamMatchRecord* a = rows[0];
        const TeamMatchRecord* b = rows[1];
        if (a->home == b->home)
            throw_error(ErrorKind::UnpairedMatch,
                        "match '" + match_id + "': home flags are not complementary");
        if (a->opponent != b->team || b->opponent != a->team)
            throw_error(ErrorKind::UnpairedMatch,
                        "match '" + match_id + "': opponent fields do not cross-reference");
        if (a->date != b->date || a->season != b->season || a->round != b->round)
            throw_error(ErrorKind::UnpairedMatch,
                        "match '" + match_id + "': date/season/round disagree between the two rows");

        double possession_sum = a->stats.possession_pct + b->stats.possession_pct;
        if (std::abs(possession_sum - 100.0) > 1.0)
            stats.warnings.push_back("match '" + match_id + "': possession sums to " +
                                     compact_number(possession_sum));
        for (const TeamMatchRecord* row : rows) {
            const TeamStats& s = row->stats;
            if (s.attempts_on_target + s.attempts_off_target + s.blocked_shots > s.attempts)
                stats.warnings.push_back("match '" + row->match_id + "', team '" + row->team +
                                         "': attempts decomposition exceeds total attempts");
        }
    }
    stats.n_matches = static_cast<int>(by_match.size());

    std::set<std::pair<std::string, std::string>> team_keys;
    for (const auto& row : team_rows) team_keys.insert({row.match_id, row.team});
    std::set<std::tuple<std::string, std::string, std::string>> player_keys;
    for (const auto& row : player_rows) {
        if (!team_keys.count({row.match_id, row.team}))
            throw_error(ErrorKind::OrphanPlayerRow,
                        "player '" + row.player + "' cites unknown match/team pair ('" +
                        row.match_id + "', '" + row.team + "')");
        if (!player_keys.insert({row.match_id, row.team, row.player}).second)
            stats.warnings.push_back("duplicate player row: match '" + row.match_id +
                                     "', player '" + row.player + "'");
        stats.players.insert(row.player);
    }

    std::sort(stats.warnings.begin(), stats.warnings.end());
    return stats;
}

Corpus make_corpus(std::vector<TeamMatchRecord> team_rows,
                   std::vector<PlayerMatchRecord> player_rows) {
    Corpus corpus;
    corpus.stats = validate_corpus(team_rows, player_rows);
    corpus.team_rows = std::move(team_rows);
    corpus.player_rows = std::move(player_rows);
    return corpus;
}

namespace {

int iround(double x) { return static_cast<int>(std::floor(x + 0.5)); }

int nonneg(double x) { return std::max(0, iround(x)); }

double clampd(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

enum class Role { Attacker, Midfielder, Defender };

Role player_role(int index, int roster_size) {
    int attackers = std::max(1, iround(0.3 * roster_size));
    int mids = std::max(1, iround(0.4 * roster_size));
    if (index < attackers) return Role::Attacker;
    if (index < attackers + mids) return Role::Midfielder;
    return Role::Defender;
}

int weighted_pick(Rng& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

TeamStats synth_side_stats(Rng& rng, double eff) {
    TeamStats s;
    s.attempts_on_target = nonneg(1.5 + 7.0 * eff + rng.normal(1.2));
    s.goals = nonneg(0.45 * s.attempts_on_target + rng.normal(0.35));
    s.attempts_off_target = nonneg(2.0 + 4.0 * eff + rng.normal(1.5));
    s.blocked_shots = nonneg(1.0 + 3.0 * eff + rng.normal(1.0));
    s.attempts = s.attempts_on_target + s.attempts_off_target + s.blocked_shots;
    s.woodwork = nonneg(rng.normal(0.45));
    s.corners = nonneg(3.0 + 5.0 * eff + rng.normal(1.5));
    s.offsides = nonneg(1.0 + 2.0 * (1.0 - eff) + rng.normal(1.0));
    s.passes = std::max(120, iround(280.0 + 420.0 * eff + rng.normal(30.0)));
    double acc = clampd(70.0 + 22.0 * eff + rng.normal(2.0), 50.0, 97.0);
    s.passes_completed = std::min(s.passes, iround(s.passes * acc / 100.0));
    s.pass_accuracy_pct = 100.0 * s.passes_completed / s.passes;
    s.distance_covered_km = clampd(100.0 + rng.normal(5.0), 80.0, 130.0);
    s.balls_recovered = nonneg(35.0 + 15.0 * (1.0 - eff) + rng.normal(4.0));
    s.tackles = nonneg(10.0 + 8.0 * (1.0 - eff) + rng.normal(2.0));
    s.clearances = nonneg(8.0 + 14.0 * (1.0 - eff) + rng.normal(3.0));
    s.blocks = nonneg(1.5 + 3.0 * (1.0 - eff) + rng.normal(1.0));
    s.yellow_cards = nonneg(1.2 + 1.2 * (1.0 - eff) + rng.normal(0.8));
    s.red_cards = rng.uniform() < 0.04 ? 1 : 0;
    s.fouls = nonneg(9.0 + 6.0 * (1.0 - eff) + rng.normal(2.5));
    return s;
}

std::string season_for(const Date& d) {
    int start_year = d.month >= 7 ? d.year : d.year - 1;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", start_year, (start_year + 1) % 100);
    return buf;
}

std::vector<PlayerMatchRecord> synth_player_rows(Rng& rng, const std::string& match_id,
                                                 const std::string& team,
                                                 const std::vector<std::string>& roster,
                                                 int team_goals) {
    int n = static_cast<int>(roster.size());
    std::vector<double> goal_weights(n), assist_weights(n);
    for (int i = 0; i < n; ++i) {
        switch (player_role(i, n)) {
        case Role::Attacker: goal_weights[i] = 3.0; assist_weights[i] = 1.5; break;
        case Role::Midfielder: goal_weights[i] = 1.0; assist_weights[i] = 2.0; break;
        case Role::Defender: goal_weights[i] = 0.2; assist_weights[i] = 0.4; break;
        }
    }

    std::vector<int> goals(n, 0), assists(n, 0);
    for (int g = 0; g < team_goals; ++g) goals[weighted_pick(rng, goal_weights)]++;
    int n_assists = std::max(0, team_goals - (rng.uniform() < 0.35 ? 1 : 0));
    for (int a = 0; a < n_assists; ++a) assists[weighted_pick(rng, assist_weights)]++;

    std::vector<PlayerMatchRecord> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        PlayerMatchRecord rec;
        rec.match_id = match_id;
        rec.team = team;
        rec.player = roster[i];
        PlayerStats& s = rec.stats;
        s.goals = goals[i];
        s.assists = assists[i];
        Role role = player_role(i, n);
        double shot_base = role == Role::Attacker ? 2.2 : role == Role::Midfielder ? 1.0 : 0.3;
        s.shots = nonneg(shot_base + rng.normal(0.9));
        s.shots_on_target = std::min(s.shots, nonneg(s.shots * rng.uniform(0.25, 0.65)));
        // keep the generated rows clean even though parsers tolerate goals > on-target
        s.shots_on_target = std::max(s.shots_on_target, s.goals);
        s.shots = std::max(s.shots, s.shots_on_target);
        s.interceptions = nonneg((role == Role::Defender ? 1.8 : 0.7) + rng.normal(1.0));
        double cross_base = role == Role::Attacker ? 2.2 : role == Role::Midfielder ? 1.6 : 0.5;
        s.crosses = nonneg(cross_base + rng.normal(1.2));
        s.fouls_committed = nonneg(1.0 + rng.normal(1.0));
        s.offsides = role == Role::Attacker ? nonneg(0.6 + rng.normal(0.7)) : nonneg(rng.normal(0.3));
        s.minutes_played = i < 11 ? 90 : iround(rng.uniform(10.0, 45.0));
        rows.push_back(std::move(rec));
    }
    return rows;
}

} // namespace

Corpus generate_synthetic_corpus(std::uint64_t seed, int n_teams, int n_matches,
                                 int players_per_team) {
    if (n_teams < 2)
        throw_error(ErrorKind::RangeViolation, "n_teams must be at least 2");
    if (n_matches < 1)
        throw_error(ErrorKind::RangeViolation, "n_matches must be at least 1");
    if (players_per_team < 1)
        throw_error(ErrorKind::RangeViolation, "players_per_team must be at least 1");

    Rng rng(splitmix64(seed));

    int id_width = n_teams > 99 ? 3 : 2;
    std::vector<std::string> teams(n_teams);
    for (int i = 0; i < n_teams; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "T%0*d", id_width, i + 1);
        teams[i] = buf;
    }

    // evenly spaced strengths, shuffled so the strongest team varies with the seed
    std::vector<double> strengths(n_teams);
    for (int i = 0; i < n_teams; ++i)
        strengths[i] = 0.15 + 0.8 * (n_teams == 1 ? 0.0 : double(i) / (n_teams - 1));
    rng.shuffle(strengths);

    std::vector<std::vector<std::string>> rosters(n_teams);
    for (int t = 0; t < n_teams; ++t) {
        rosters[t].reserve(players_per_team);
        for (int p = 0; p < players_per_team; ++p) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s_P%02d", teams[t].c_str(), p + 1);
            rosters[t].push_back(buf);
        }
    }

    std::vector<std::pair<int, int>> pairings;
    for (int i = 0; i < n_teams; ++i)
        for (int j = 0; j < n_teams; ++j)
            if (i != j) pairings.push_back({i, j});
    rng.shuffle(pairings);

    static const Round kRoundCycle[8] = {Round::R16, Round::R16, Round::R16, Round::R16,
                                         Round::QF, Round::QF, Round::SF, Round::Final};
    const long base_serial = Date{2014, 9, 16}.serial();
    int match_width = n_matches > 9999 ? 6 : 4;

    std::vector<TeamMatchRecord> team_rows;
    std::vector<PlayerMatchRecord> player_rows;
    team_rows.reserve(2 * n_matches);
    player_rows.reserve(2 * static_cast<std::size_t>(n_matches) * players_per_team);

    for (int m = 0; m < n_matches; ++m) {
        auto [hi, ai] = pairings[m % pairings.size()];
        char idbuf[24];
        std::snprintf(idbuf, sizeof(idbuf), "M%0*d", match_width, m + 1);
        std::string match_id = idbuf;
        Date date = Date::from_serial(base_serial + 3L * m);
        std::string season = season_for(date);
        Round round = kRoundCycle[m % 8];

        double eff_home = clampd(strengths[hi] + 0.06, 0.05, 1.0);
        double eff_away = strengths[ai];

        TeamStats home_stats = synth_side_stats(rng, eff_home);
        TeamStats away_stats = synth_side_stats(rng, eff_away);

        double share = 100.0 * eff_home / (eff_home + eff_away) + rng.normal(3.0);
        double ph = std::round(clampd(share, 25.0, 75.0) * 10.0) / 10.0;
        home_stats.possession_pct = ph;
        away_stats.possession_pct = 100.0 - ph;

        TeamMatchRecord home_row{match_id, date, season, round, teams[hi], teams[ai], true, home_stats};
        TeamMatchRecord away_row{match_id, date, season, round, teams[ai], teams[hi], false, away_stats};
        team_rows.push_back(std::move(home_row));
        team_rows.push_back(std::move(away_row));

        auto home_players = synth_player_rows(rng, match_id, teams[hi], rosters[hi], home_stats.goals);
        auto away_players = synth_player_rows(rng, match_id, teams[ai], rosters[ai], away_stats.goals);
        player_rows.insert(player_rows.end(), home_players.begin(), home_players.end());
        player_rows.insert(player_rows.end(), away_players.begin(), away_players.end());
    }

    return make_corpus(std::move(team_rows), std::move(player_rows));
}

namespace {

json team_record_to_json(const TeamMatchRecord& r) {
    const TeamStats& s = r.stats;
    return json{
        {"match_id", r.match_id}, {"date", r.date.to_string()}, {"season", r.season},
        {"round", round_name(r.round)}, {"team", r.team}, {"opponent", r.opponent},
        {"home", r.home ? 1 : 0},
        {"goals", s.goals}, {"attempts", s.attempts},
        {"attempts_on_target", s.attempts_on_target},
        {"attempts_off_target", s.attempts_off_target},
        {"blocked_shots", s.blocked_shots}, {"woodwork", s.woodwork},
        {"corners", s.corners}, {"offsides", s.offsides},
        {"possession_pct", s.possession_pct}, {"passes", s.passes},
        {"pass_accuracy_pct", s.pass_accuracy_pct}, {"passes_completed", s.passes_completed},
        {"distance_covered_km", s.distance_covered_km}, {"balls_recovered", s.balls_recovered},
        {"tackles", s.tackles}, {"clearances", s.clearances}, {"blocks", s.blocks},
        {"yellow_cards", s.yellow_cards}, {"red_cards", s.red_cards}, {"fouls", s.fouls},
    };
}

TeamMatchRecord team_record_from_json(const json& j) {
    TeamMatchRecord r;
    r.match_id = j.at("match_id").get<std::string>();
    if (!Date::parse(j.at("date").get<std::string>(), r.date))
        throw_error(ErrorKind::CorruptArtifact, "bad date in corpus bundle");
    r.season = j.at("season").get<std::string>();
    if (!parse_round(j.at("round").get<std::string>(), r.round))
        throw_error(ErrorKind::CorruptArtifact, "bad round in corpus bundle");
    r.team = j.at("team").get<std::string>();
    r.opponent = j.at("opponent").get<std::string>();
    r.home = j.at("home").get<int>() == 1;
    TeamStats& s = r.stats;
    s.goals = j.at("goals").get<int>();
    s.attempts = j.at("attempts").get<int>();
    s.attempts_on_target = j.at("attempts_on_target").get<int>();
    s.attempts_off_target = j.at("attempts_off_target").get<int>();
    s.blocked_shots = j.at("blocked_shots").get<int>();
    s.woodwork = j.at("woodwork").get<int>();
    s.corners = j.at("corners").get<int>();
    s.offsides = j.at("offsides").get<int>();
    s.possession_pct = j.at("possession_pct").get<double>();
    s.passes = j.at("passes").get<int>();
    s.pass_accuracy_pct = j.at("pass_accuracy_pct").get<double>();
    s.passes_completed = j.at("passes_completed").get<int>();
    s.distance_covered_km = j.at("distance_covered_km").get<double>();
    s.balls_recovered = j.at("balls_recovered").get<int>();
    s.tackles = j.at("tackles").get<int>();
    s.clearances = j.at("clearances").get<int>();
    s.blocks = j.at("blocks").get<int>();
    s.yellow_cards = j.at("yellow_cards").get<int>();
    s.red_cards = j.at("red_cards").get<int>();
    s.fouls = j.at("fouls").get<int>();
    return r;
}

json player_record_to_json(const PlayerMatchRecord& r) {
    const PlayerStats& s = r.stats;
    return json{
        {"match_id", r.match_id}, {"team", r.team}, {"player", r.player},
        {"goals", s.goals}, {"shots", s.shots}, {"shots_on_target", s.shots_on_target},
        {"assists", s.assists}, {"interceptions", s.interceptions}, {"crosses", s.crosses},
        {"fouls_committed", s.fouls_committed}, {"offsides", s.offsides},
        {"minutes_played", s.minutes_played},
    };
}

PlayerMatchRecord player_record_from_json(const json& j) {
    PlayerMatchRecord r;
    r.match_id = j.at("match_id").get<std::string>();
    r.team = j.at("team").get<std::string>();
    r.player = j.at("player").get<std::string>();
    PlayerStats& s = r.stats;
    s.goals = j.at("goals").get<int>();
    s.shots = j.at("shots").get<int>();
    s.shots_on_target = j.at("shots_on_target").get<int>();
    s.assists = j.at("assists").get<int>();
    s.interceptions = j.at("interceptions").get<int>();
    s.crosses = j.at("crosses").get<int>();
    s.fouls_committed = j.at("fouls_committed").get<int>();
    s.offsides = j.at("offsides").get<int>();
    s.minutes_played = j.at("minutes_played").get<int>();
    return r;
}

} // namespace

std::string corpus_to_json(const Corpus& corpus) {
    json j;
    j["version"] = 1;
    j["kind"] = "corpus";
    json teams = json::array();
    for (const auto& r : corpus.team_rows) teams.push_back(team_record_to_json(r));
    json players = json::array();
    for (const auto& r : corpus.player_rows) players.push_back(player_record_to_json(r));
    j["team_rows"] = std::move(teams);
    j["player_rows"] = std::move(players);
    j["stats"] = {
        {"n_matches", corpus.stats.n_matches},
        {"n_team_rows", corpus.stats.n_team_rows},
        {"n_player_rows", corpus.stats.n_player_rows},
        {"teams", corpus.stats.teams},
        {"players", corpus.stats.players},
        {"seasons", corpus.stats.seasons},
        {"warnings", corpus.stats.warnings},
    };
    return j.dump(2) + "\n";
}

Corpus corpus_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact, std::string("corpus bundle is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("version"))
            throw_error(ErrorKind::CorruptArtifact, "corpus bundle has no version field");
        if (j.at("version").get<int>() != 1)
            throw_error(ErrorKind::VersionMismatch,
                        "corpus bundle version " + j.at("version").dump() + " is not supported");
        if (j.value("kind", "") != "corpus")
            throw_error(ErrorKind::CorruptArtifact, "not a corpus bundle");
        std::vector<TeamMatchRecord> team_rows;
        for (const auto& rec : j.at("team_rows")) team_rows.push_back(team_record_from_json(rec));
        std::vector<PlayerMatchRecord> player_rows;
        for (const auto& rec : j.at("player_rows")) player_rows.push_back(player_record_from_json(rec));
        return make_corpus(std::move(team_rows), std::move(player_rows));
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact, std::string("corpus bundle is malformed: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_error(ErrorKind::Io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw_error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw_error(ErrorKind::Io, "failed writing '" + path + "'");
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    write_file(path, corpus_to_json(corpus));
}

Corpus load_corpus(const std::string& path) {
    return corpus_from_json(read_file(path));
}

} // namespace kosim::ingest
