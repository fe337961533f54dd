#include "bracket.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"

namespace kosim::sim {

using nlohmann::json;
using ingest::Round;

bool is_winner_placeholder(const std::string& slot) {
    return slot.rfind("W:", 0) == 0;
}

std::string winner_placeholder(const std::string& fixture_id) {
    return "W:" + fixture_id;
}

std::string placeholder_source(const std::string& slot) {
    if (!is_winner_placeholder(slot))
        throw_error(ErrorKind::InvalidBracket, "'" + slot + "' is not a winner placeholder");
    return slot.substr(2);
}

namespace {

constexpr Round kAllRounds[4] = {Round::R16, Round::QF, Round::SF, Round::Final};

[[noreturn]] void invalid(const std::string& msg) {
    throw_error(ErrorKind::InvalidBracket, msg);
}

void validate_leg_result(const Fixture& fx, std::size_t leg_no, const Leg& leg) {
    const LegResult& res = *leg.result;
    const std::string where = "fixture '" + fx.fixture_id + "' leg " + std::to_string(leg_no + 1);

    for (const ingest::TeamStats* side : {&res.home, &res.away}) {
        std::vector<double> v = side->to_vector();
        for (int i = 0; i < ingest::kTeamStatCount; ++i)
            if (v[i] < 0.0)
                invalid(where + ": " + std::string(ingest::kTeamStatNames[i]) + " is negative");
        if (side->passes_completed > side->passes)
            invalid(where + ": passes_completed exceeds passes");
        if (side->possession_pct > 100.0)
            invalid(where + ": possession exceeds 100");
    }
    if (std::abs(res.home.possession_pct + res.away.possession_pct - 100.0) > 1.0)
        invalid(where + ": possession does not sum to 100");

    const std::string venue = leg.venue_team;
    const std::string other = venue == fx.team_a ? fx.team_b : fx.team_a;
    std::map<std::string, int> goal_sum, assist_sum;
    for (const PlayerCount& sc : res.scorers) {
        if (sc.team != fx.team_a && sc.team != fx.team_b)
            invalid(where + ": scorer '" + sc.player + "' belongs to unknown team '" + sc.team + "'");
        if (sc.count < 1)
            invalid(where + ": scorer '" + sc.player + "' has a non-positive goal count");
        goal_sum[sc.team] += sc.count;
    }
    if (goal_sum[venue] != res.home.goals || goal_sum[other] != res.away.goals)
        invalid(where + ": scorer goals do not sum to the team goals");
    for (const PlayerCount& as : res.assists) {
        if (as.team != fx.team_a && as.team != fx.team_b)
            invalid(where + ": assist '" + as.player + "' belongs to unknown team '" + as.team + "'");
        if (as.count < 1)
            invalid(where + ": assist '" + as.player + "' has a non-positive count");
        assist_sum[as.team] += as.count;
    }
    if (assist_sum[venue] > res.home.goals || assist_sum[other] > res.away.goals)
        invalid(where + ": assists exceed the team's goals");
}

} // namespace

void validate_bracket(const Bracket& bracket) {
    if (bracket.rounds.empty()) invalid("bracket lists no rounds");
    if (bracket.rounds.size() > 4) invalid("bracket lists more than four rounds");
    std::size_t offset = 4 - bracket.rounds.size();
    for (std::size_t i = 0; i < bracket.rounds.size(); ++i)
        if (bracket.rounds[i] != kAllRounds[offset + i])
            invalid("rounds must run in order and end at the final");

    std::set<std::string> ids;
    for (const Fixture& fx : bracket.fixtures) {
        if (fx.fixture_id.empty()) invalid("a fixture has an empty id");
        if (!ids.insert(fx.fixture_id).second)
            invalid("duplicate fixture id '" + fx.fixture_id + "'");
    }

    std::vector<std::vector<const Fixture*>> by_round(bracket.rounds.size());
    for (const Fixture& fx : bracket.fixtures) {
        auto it = std::find(bracket.rounds.begin(), bracket.rounds.end(), fx.round);
        if (it == bracket.rounds.end())
            invalid("fixture '" + fx.fixture_id + "' names a round the bracket does not list");
        by_round[std::size_t(it - bracket.rounds.begin())].push_back(&fx);
    }
    for (std::size_t r = 0; r < by_round.size(); ++r) {
        std::size_t expected = std::size_t(1) << (bracket.rounds.size() - 1 - r);
        if (by_round[r].size() != expected)
            invalid(std::string(ingest::round_name(bracket.rounds[r])) + " has " +
                    std::to_string(by_round[r].size()) + " fixtures, expected " +
                    std::to_string(expected));
    }

    std::set<std::string> first_round_teams;
    for (const Fixture* fx : by_round[0]) {
        for (const std::string& slot : {fx->team_a, fx->team_b}) {
            if (slot.empty()) invalid("fixture '" + fx->fixture_id + "' has an empty team slot");
            if (is_winner_placeholder(slot))
                invalid("first-round fixture '" + fx->fixture_id + "' may not hold placeholders");
            if (!first_round_teams.insert(slot).second)
                invalid("team '" + slot + "' occupies more than one first-round slot");
        }
        if (fx->team_a == fx->team_b)
            invalid("fixture '" + fx->fixture_id + "' pairs a team with itself");
    }

    for (std::size_t r = 1; r < by_round.size(); ++r) {
        std::set<std::string> sources;
        std::set<std::string> previous_ids;
        for (const Fixture* fx : by_round[r - 1]) previous_ids.insert(fx->fixture_id);
        for (const Fixture* fx : by_round[r]) {
            for (const std::string& slot : {fx->team_a, fx->team_b}) {
                if (!is_winner_placeholder(slot))
                    invalid("fixture '" + fx->fixture_id +
                            "' must reference previous-round winners, got '" + slot + "'");
                std::string src = placeholder_source(slot);
                if (!previous_ids.count(src))
                    invalid("fixture '" + fx->fixture_id + "' references '" + src +
                            "', which is not in the previous round");
                if (!sources.insert(src).second)
                    invalid("winner of '" + src + "' feeds more than one slot");
            }
        }
    }

    for (const Fixture& fx : bracket.fixtures) {
        std::size_t expected_legs = fx.round == Round::Final ? 1 : 2;
        if (fx.legs.size() != expected_legs)
            invalid("fixture '" + fx.fixture_id + "' has " + std::to_string(fx.legs.size()) +
                    " legs, expected " + std::to_string(expected_legs));
        std::set<std::string> venues;
        bool seen_unplayed = false;
        for (std::size_t i = 0; i < fx.legs.size(); ++i) {
            const Leg& leg = fx.legs[i];
            if (leg.venue_team != fx.team_a && leg.venue_team != fx.team_b)
                invalid("fixture '" + fx.fixture_id + "' leg " + std::to_string(i + 1) +
                        " has venue '" + leg.venue_team + "', not one of its teams");
            if (!venues.insert(leg.venue_team).second)
                invalid("fixture '" + fx.fixture_id + "' plays two legs at the same venue");
            if (leg.played && seen_unplayed)
                invalid("fixture '" + fx.fixture_id + "' has a played leg after an unplayed one");
            if (!leg.played) seen_unplayed = true;
            if (leg.played != leg.result.has_value())
                invalid("fixture '" + fx.fixture_id + "' leg " + std::to_string(i + 1) +
                        (leg.played ? " is played but carries no result"
                                    : " is unplayed but carries a result"));
            if (leg.played) {
                if (is_winner_placeholder(fx.team_a) || is_winner_placeholder(fx.team_b))
                    invalid("fixture '" + fx.fixture_id + "' has a played leg before its teams are known");
                validate_leg_result(fx, i, leg);
            }
        }
    }

    for (const std::string& team : first_round_teams) {
        auto it = bracket.squads.find(team);
        if (it == bracket.squads.end() || it->second.empty())
            throw_error(ErrorKind::MissingSquad, "no squad listed for team '" + team + "'");
        std::set<std::string> players(it->second.begin(), it->second.end());
        if (players.size() != it->second.size())
            throw_error(ErrorKind::MissingSquad,
                        "squad for team '" + team + "' lists a player twice");
    }
}

std::vector<std::string> bracket_teams(const Bracket& bracket) {
    std::vector<std::string> teams;
    for (const Fixture& fx : bracket.fixtures) {
        if (fx.round != bracket.rounds.front()) continue;
        teams.push_back(fx.team_a);
        teams.push_back(fx.team_b);
    }
    return teams;
}

namespace {

json stats_to_json(const ingest::TeamStats& s) {
    json j;
    std::vector<double> v = s.to_vector();
    for (int i = 0; i < ingest::kTeamStatCount; ++i) {
        std::string name(ingest::kTeamStatNames[i]);
        if (ingest::team_stat_real_valued(i)) j[name] = v[i];
        else j[name] = static_cast<long long>(std::llround(v[i]));
    }
    return j;
}

ingest::TeamStats stats_from_json(const json& j, const std::string& where) {
    std::vector<double> v(ingest::kTeamStatCount, 0.0);
    for (int i = 0; i < ingest::kTeamStatCount; ++i) {
        std::string name(ingest::kTeamStatNames[i]);
        if (!j.contains(name))
            invalid(where + ": stat line is missing '" + name + "'");
        const json& field = j.at(name);
        if (!field.is_number())
            invalid(where + ": stat '" + name + "' is not a number");
        if (!ingest::team_stat_real_valued(i) && !field.is_number_integer())
            invalid(where + ": stat '" + name + "' must be an integer");
        v[std::size_t(i)] = field.get<double>();
    }
    return ingest::TeamStats::from_vector(v);
}

json player_counts_to_json(const std::vector<PlayerCount>& entries, const char* value_key) {
    json arr = json::array();
    for (const PlayerCount& e : entries)
        arr.push_back({{"player", e.player}, {"team", e.team}, {value_key, e.count}});
    return arr;
}

std::vector<PlayerCount> player_counts_from_json(const json& arr, const char* value_key,
                                                 const std::string& where) {
    std::vector<PlayerCount> entries;
    if (!arr.is_array()) invalid(where + " must be an array");
    for (const json& e : arr) {
        PlayerCount pc;
        pc.player = e.at("player").get<std::string>();
        pc.team = e.at("team").get<std::string>();
        pc.count = e.at(value_key).get<int>();
        entries.push_back(std::move(pc));
    }
    return entries;
}

} // namespace

std::string bracket_to_json(const Bracket& bracket) {
    json j;
    j["version"] = 1;
    j["kind"] = "bracket";
    json rounds = json::array();
    for (Round r : bracket.rounds) rounds.push_back(ingest::round_name(r));
    j["rounds"] = std::move(rounds);

    json fixtures = json::array();
    for (const Fixture& fx : bracket.fixtures) {
        json jf;
        jf["fixture_id"] = fx.fixture_id;
        jf["round"] = ingest::round_name(fx.round);
        jf["team_a"] = fx.team_a;
        jf["team_b"] = fx.team_b;
        json legs = json::array();
        for (const Leg& leg : fx.legs) {
            json jl;
            jl["venue_team"] = leg.venue_team;
            jl["played"] = leg.played;
            if (leg.result) {
                json jr;
                jr["home"] = stats_to_json(leg.result->home);
                jr["away"] = stats_to_json(leg.result->away);
                jr["scorers"] = player_counts_to_json(leg.result->scorers, "goals");
                jr["assists"] = player_counts_to_json(leg.result->assists, "count");
                jl["result"] = std::move(jr);
            }
            legs.push_back(std::move(jl));
        }
        jf["legs"] = std::move(legs);
        fixtures.push_back(std::move(jf));
    }
    j["fixtures"] = std::move(fixtures);
    j["squads"] = bracket.squads;
    return j.dump(2) + "\n";
}

Bracket bracket_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact,
                    std::string("bracket is not valid JSON: ") + e.what());
    }
    try {
        if (j.contains("version") && j.at("version").get<int>() != 1)
            throw_error(ErrorKind::VersionMismatch,
                        "bracket version " + j.at("version").dump() + " is not supported");
        Bracket bracket;
        for (const json& r : j.at("rounds")) {
            Round round;
            if (!ingest::parse_round(r.get<std::string>(), round))
                invalid("unknown round '" + r.get<std::string>() + "'");
            bracket.rounds.push_back(round);
        }
        for (const json& jf : j.at("fixtures")) {
            Fixture fx;
            fx.fixture_id = jf.at("fixture_id").get<std::string>();
            if (!ingest::parse_round(jf.at("round").get<std::string>(), fx.round))
                invalid("fixture '" + fx.fixture_id + "' has an unknown round");
            fx.team_a = jf.at("team_a").get<std::string>();
            fx.team_b = jf.at("team_b").get<std::string>();
            for (const json& jl : jf.at("legs")) {
                Leg leg;
                leg.venue_team = jl.at("venue_team").get<std::string>();
                leg.played = jl.at("played").get<bool>();
                if (jl.contains("result")) {
                    const json& jr = jl.at("result");
                    const std::string where = "fixture '" + fx.fixture_id + "'";
                    LegResult res;
                    res.home = stats_from_json(jr.at("home"), where);
                    res.away = stats_from_json(jr.at("away"), where);
                    res.scorers = player_counts_from_json(jr.at("scorers"), "goals",
                                                          where + " scorers");
                    res.assists = player_counts_from_json(jr.at("assists"), "count",
                                                          where + " assists");
                    leg.result = std::move(res);
                }
                fx.legs.push_back(std::move(leg));
            }
            bracket.fixtures.push_back(std::move(fx));
        }
        bracket.squads =
            j.at("squads").get<std::map<std::string, std::vector<std::string>>>();
        validate_bracket(bracket);
        return bracket;
    } catch (const json::exception& e) {
        throw_error(ErrorKind::CorruptArtifact,
                    std::string("bracket is malformed: ") + e.what());
    }
}

void save_bracket(const Bracket& bracket, const std::string& path) {
    ingest::write_file(path, bracket_to_json(bracket));
}

Bracket load_bracket(const std::string& path) {
    return bracket_from_json(ingest::read_file(path));
}

Bracket make_knockout_bracket(const std::vector<std::string>& teams,
                              const std::map<std::string, std::vector<std::string>>& squads) {
    std::size_t n = teams.size();
    if (n != 2 && n != 4 && n != 8 && n != 16)
        invalid("knockout bracket needs 2, 4, 8, or 16 teams, got " + std::to_string(n));

    Bracket bracket;
    std::size_t n_rounds = n == 2 ? 1 : n == 4 ? 2 : n == 8 ? 3 : 4;
    for (std::size_t r = 4 - n_rounds; r < 4; ++r) bracket.rounds.push_back(kAllRounds[r]);

    std::vector<std::string> slots = teams;
    for (std::size_t r = 0; r < bracket.rounds.size(); ++r) {
        Round round = bracket.rounds[r];
        std::vector<std::string> next_slots;
        for (std::size_t k = 0; k * 2 < slots.size(); ++k) {
            Fixture fx;
            fx.fixture_id = std::string(ingest::round_name(round)) + "-" + std::to_string(k + 1);
            fx.round = round;
            fx.team_a = slots[2 * k];
            fx.team_b = slots[2 * k + 1];
            if (round == Round::Final) {
                fx.legs.push_back({fx.team_a, false, std::nullopt});
            } else {
                fx.legs.push_back({fx.team_a, false, std::nullopt});
                fx.legs.push_back({fx.team_b, false, std::nullopt});
            }
            next_slots.push_back(winner_placeholder(fx.fixture_id));
            bracket.fixtures.push_back(std::move(fx));
        }
        slots = std::move(next_slots);
    }
    bracket.squads = squads;
    validate_bracket(bracket);
    return bracket;
}

} // namespace kosim::sim
