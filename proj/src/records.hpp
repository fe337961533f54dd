#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace kosim::ingest {

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    // days since 1970-01-01, valid for the proleptic Gregorian calendar
    long serial() const;
    static Date from_serial(long days);

    std::string to_string() const;              // YYYY-MM-DD
    static bool parse(std::string_view s, Date& out);
};

enum class Round { R16, QF, SF, Final };

const char* round_name(Round r);
bool parse_round(std::string_view s, Round& out);

// The 20 per-match team statistics, in canonical (CSV column) order.
struct TeamStats {
    int goals = 0;
    int attempts = 0;
    int attempts_on_target = 0;
    int attempts_off_target = 0;
    int blocked_shots = 0;
    int woodwork = 0;
    int corners = 0;
    int offsides = 0;
    double possession_pct = 0.0;
    int passes = 0;
    double pass_accuracy_pct = 0.0;
    int passes_completed = 0;
    double distance_covered_km = 0.0;
    int balls_recovered = 0;
    int tackles = 0;
    int clearances = 0;
    int blocks = 0;
    int yellow_cards = 0;
    int red_cards = 0;
    int fouls = 0;

    bool operator==(const TeamStats&) const = default;

    std::vector<double> to_vector() const;
    static TeamStats from_vector(const std::vector<double>& v);
};

inline constexpr int kTeamStatCount = 20;
extern const std::array<std::string_view, kTeamStatCount> kTeamStatNames;

// possession_pct, pass_accuracy_pct, and distance_covered_km carry fractions;
// every other team stat is a count.
bool team_stat_real_valued(int index);

// The 9 per-match player statistics, in canonical order.
struct PlayerStats {
    int goals = 0;
    int shots = 0;
    int shots_on_target = 0;
    int assists = 0;
    int interceptions = 0;
    int crosses = 0;
    int fouls_committed = 0;
    int offsides = 0;
    int minutes_played = 0;

    bool operator==(const PlayerStats&) const = default;

    std::vector<double> to_vector() const;
    static PlayerStats from_vector(const std::vector<double>& v);
};

inline constexpr int kPlayerStatCount = 9;
extern const std::array<std::string_view, kPlayerStatCount> kPlayerStatNames;

struct TeamMatchRecord {
    std::string match_id;
    Date date;
    std::string season;
    Round round = Round::R16;
    std::string team;
    std::string opponent;
    bool home = false;
    TeamStats stats;

    bool operator==(const TeamMatchRecord&) const = default;
};

struct PlayerMatchRecord {
    std::string match_id;
    std::string team;
    std::string player;
    PlayerStats stats;

    bool operator==(const PlayerMatchRecord&) const = default;
};

extern const std::string kTeamCsvHeader;    // bit-exact header line, no newline
extern const std::string kPlayerCsvHeader;

// Parse CSV text with the exact headers above. Errors carry 1-based line
// numbers (line 1 is the header) and column names.
std::vector<TeamMatchRecord> parse_team_matches(std::string_view csv_text);
std::vector<PlayerMatchRecord> parse_player_matches(std::string_view csv_text);

std::string serialize_team_matches(const std::vector<TeamMatchRecord>& records);
std::string serialize_player_matches(const std::vector<PlayerMatchRecord>& records);

} // namespace kosim::ingest
