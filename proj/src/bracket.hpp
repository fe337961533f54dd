#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "records.hpp"

namespace kosim::sim {

struct PlayerCount {
    std::string player;
    std::string team;
    int count = 0;

    bool operator==(const PlayerCount&) const = default;
};

// A leg that was actually played before the competition was interrupted.
// "home"/"away" are relative to venue_team.
struct LegResult {
    ingest::TeamStats home;
    ingest::TeamStats away;
    std::vector<PlayerCount> scorers;
    std::vector<PlayerCount> assists;

    bool operator==(const LegResult&) const = default;
};

struct Leg {
    std::string venue_team;
    bool played = false;
    std::optional<LegResult> result;

    bool operator==(const Leg&) const = default;
};

// Slots in rounds after the first hold "W:<fixture_id>" placeholders that
// resolve to the named fixture's winner.
struct Fixture {
    std::string fixture_id;
    ingest::Round round = ingest::Round::R16;
    std::string team_a;
    std::string team_b;
    std::vector<Leg> legs;

    bool operator==(const Fixture&) const = default;
};

struct Bracket {
    std::vector<ingest::Round> rounds;
    std::vector<Fixture> fixtures;
    std::map<std::string, std::vector<std::string>> squads;

    bool operator==(const Bracket&) const = default;
};

bool is_winner_placeholder(const std::string& slot);
std::string winner_placeholder(const std::string& fixture_id);
// The fixture id inside a "W:<fixture_id>" slot.
std::string placeholder_source(const std::string& slot);

// Structural checks: rounds form a suffix of R16→QF→SF→Final, round sizes
// halve down to a single final, first-round slots are concrete and distinct,
// later slots reference each previous-round fixture exactly once, legs match
// the round (one for the final, two otherwise, distinct venues), played legs
// form a prefix with complete results, and every first-round team has a squad.
void validate_bracket(const Bracket& bracket);

// Teams occupying the first round's slots, in fixture order.
std::vector<std::string> bracket_teams(const Bracket& bracket);

std::string bracket_to_json(const Bracket& bracket);
Bracket bracket_from_json(const std::string& text);
void save_bracket(const Bracket& bracket, const std::string& path);
Bracket load_bracket(const std::string& path);

// All-unplayed single-elimination bracket over 2/4/8/16 teams, paired in
// listed order, with placeholder slots wiring each round to the next.
Bracket make_knockout_bracket(const std::vector<std::string>& teams,
                              const std::map<std::string, std::vector<std::string>>& squads);

} // namespace kosim::sim
