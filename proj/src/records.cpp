#include "records.hpp"

#include <cstdio>
#include <set>
#include <tuple>
#include <utility>

#include "csv.hpp"
#include "error.hpp"

namespace kosim::ingest {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return days[m - 1];
}

} // namespace

long Date::serial() const {
    // Howard Hinnant's days_from_civil
    int y = year - (month <= 2);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u
                         + static_cast<unsigned>(day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097L + static_cast<long>(doe) - 719468L;
}

Date Date::from_serial(long days) {
    long z = days + 719468L;
    const long era = (z >= 0 ? z : z - 146096L) / 146097L;
    const unsigned doe = static_cast<unsigned>(z - era * 146097L);
    const unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
    const long y = static_cast<long>(yoe) + era * 400L;
    const unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
    const unsigned mp = (5u * doy + 2u) / 153u;
    const unsigned d = doy - (153u * mp + 2u) / 5u + 1u;
    const unsigned m = mp + (mp < 10 ? 3u : static_cast<unsigned>(-9));
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

bool Date::parse(std::string_view s, Date& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    auto digits = [&](int from, int to, int& value) {
        value = 0;
        for (int i = from; i < to; ++i) {
            if (s[i] < '0' || s[i] > '9') return false;
            value = value * 10 + (s[i] - '0');
        }
        return true;
    };
    Date d;
    if (!digits(0, 4, d.year) || !digits(5, 7, d.month) || !digits(8, 10, d.day)) return false;
    if (d.month < 1 || d.month > 12) return false;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return false;
    out = d;
    return true;
}

const char* round_name(Round r) {
    switch (r) {
    case Round::R16: return "R16";
    case Round::QF: return "QF";
    case Round::SF: return "SF";
    case Round::Final: return "Final";
    }
    return "?";
}

bool parse_round(std::string_view s, Round& out) {
    if (s == "R16") { out = Round::R16; return true; }
    if (s == "QF") { out = Round::QF; return true; }
    if (s == "SF") { out = Round::SF; return true; }
    if (s == "Final") { out = Round::Final; return true; }
    return false;
}

const std::array<std::string_view, kTeamStatCount> kTeamStatNames = {
    "goals", "attempts", "attempts_on_target", "attempts_off_target", "blocked_shots",
    "woodwork", "corners", "offsides", "possession_pct", "passes",
    "pass_accuracy_pct", "passes_completed", "distance_covered_km", "balls_recovered", "tackles",
    "clearances", "blocks", "yellow_cards", "red_cards", "fouls",
};

bool team_stat_real_valued(int index) {
    std::string_view name = kTeamStatNames.at(std::size_t(index));
    return name == "possession_pct" || name == "pass_accuracy_pct" ||
           name == "distance_covered_km";
}

const std::array<std::string_view, kPlayerStatCount> kPlayerStatNames = {
    "goals", "shots", "shots_on_target", "assists", "interceptions",
    "crosses", "fouls_committed", "offsides", "minutes_played",
};

std::vector<double> TeamStats::to_vector() const {
    return {
        double(goals), double(attempts), double(attempts_on_target), double(attempts_off_target),
        double(blocked_shots), double(woodwork), double(corners), double(offsides),
        possession_pct, double(passes), pass_accuracy_pct, double(passes_completed),
        distance_covered_km, double(balls_recovered), double(tackles), double(clearances),
        double(blocks), double(yellow_cards), double(red_cards), double(fouls),
    };
}

TeamStats TeamStats::from_vector(const std::vector<double>& v) {
    if (v.size() != kTeamStatCount)
        throw_error(ErrorKind::DimensionMismatch, "team stat vector must have 20 components");
    TeamStats s;
    s.goals = int(v[0]); s.attempts = int(v[1]); s.attempts_on_target = int(v[2]);
    s.attempts_off_target = int(v[3]); s.blocked_shots = int(v[4]); s.woodwork = int(v[5]);
    s.corners = int(v[6]); s.offsides = int(v[7]); s.possession_pct = v[8];
    s.passes = int(v[9]); s.pass_accuracy_pct = v[10]; s.passes_completed = int(v[11]);
    s.distance_covered_km = v[12]; s.balls_recovered = int(v[13]); s.tackles = int(v[14]);
    s.clearances = int(v[15]); s.blocks = int(v[16]); s.yellow_cards = int(v[17]);
    s.red_cards = int(v[18]); s.fouls = int(v[19]);
    return s;
}

std::vector<double> PlayerStats::to_vector() const {
    return {
        double(goals), double(shots), double(shots_on_target), double(assists),
        double(interceptions), double(crosses), double(fouls_committed), double(offsides),
        double(minutes_played),
    };
}

PlayerStats PlayerStats::from_vector(const std::vector<double>& v) {
    if (v.size() != kPlayerStatCount)
        throw_error(ErrorKind::DimensionMismatch, "player stat vector must have 9 components");
    PlayerStats s;
    s.goals = int(v[0]); s.shots = int(v[1]); s.shots_on_target = int(v[2]);
    s.assists = int(v[3]); s.interceptions = int(v[4]); s.crosses = int(v[5]);
    s.fouls_committed = int(v[6]); s.offsides = int(v[7]); s.minutes_played = int(v[8]);
    return s;
}

const std::string kTeamCsvHeader =
    "match_id,date,season,round,team,opponent,home,goals,attempts,attempts_on_target,"
    "attempts_off_target,blocked_shots,woodwork,corners,offsides,possession_pct,passes,"
    "pass_accuracy_pct,passes_completed,distance_covered_km,balls_recovered,tackles,"
    "clearances,blocks,yellow_cards,red_cards,fouls";

const std::string kPlayerCsvHeader =
    "match_id,team,player,goals,shots,shots_on_target,assists,interceptions,crosses,"
    "fouls_committed,offsides,minutes_played";

namespace {

std::vector<std::string> split_header(const std::string& header) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = header.find(',', pos);
        if (comma == std::string::npos) {
            cols.push_back(header.substr(pos));
            break;
        }
        cols.push_back(header.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cols;
}

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& expected) {
    std::set<std::string> present(got.begin(), got.end());
    for (const auto& col : expected) {
        if (!present.count(col))
            throw_error(ErrorKind::MissingColumn, "column '" + col + "' missing from header");
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (i >= expected.size() || got[i] != expected[i])
            throw_error(ErrorKind::MissingColumn,
                        "unexpected column '" + got[i] + "' at position " + std::to_string(i + 1));
    }
}

struct FieldReader {
    const std::vector<std::string>& fields;
    const std::vector<std::string>& columns;
    int line;

    std::string where(std::size_t col) const {
        return "row " + std::to_string(line) + ", column '" + columns[col] + "'";
    }

    const std::string& str(std::size_t col) const {
        if (fields[col].empty())
            throw_error(ErrorKind::NonNumericField, where(col) + " is empty");
        return fields[col];
    }

    int int_at(std::size_t col, int lo, int hi) const {
        int v;
        if (!csv::parse_int(fields[col], v))
            throw_error(ErrorKind::NonNumericField, where(col) + " is not an integer: '" + fields[col] + "'");
        if (v < lo || v > hi)
            throw_error(ErrorKind::RangeViolation,
                        where(col) + " out of range [" + std::to_string(lo) + "," + std::to_string(hi) + "]: " + fields[col]);
        return v;
    }

    int nonneg_int(std::size_t col) const {
        int v;
        if (!csv::parse_int(fields[col], v))
            throw_error(ErrorKind::NonNumericField, where(col) + " is not an integer: '" + fields[col] + "'");
        if (v < 0)
            throw_error(ErrorKind::RangeViolation, where(col) + " must be non-negative: " + fields[col]);
        return v;
    }

    double real_at(std::size_t col, double lo, double hi) const {
        double v;
        if (!csv::parse_double(fields[col], v))
            throw_error(ErrorKind::NonNumericField, where(col) + " is not a number: '" + fields[col] + "'");
        if (v < lo || v > hi)
            throw_error(ErrorKind::RangeViolation, where(col) + " out of range: " + fields[col]);
        return v;
    }
};

} // namespace

std::vector<TeamMatchRecord> parse_team_matches(std::string_view csv_text) {
    auto rows = csv::parse(csv_text);
    if (rows.empty())
        throw_error(ErrorKind::MissingColumn, "input has no header row");
    static const std::vector<std::string> columns = split_header(kTeamCsvHeader);
    check_header(rows[0], columns);

    std::vector<TeamMatchRecord> records;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        int line = static_cast<int>(r + 1);
        if (rows[r].size() != columns.size())
            throw_error(ErrorKind::MissingColumn,
                        "row " + std::to_string(line) + " has " + std::to_string(rows[r].size()) +
                        " fields, expected " + std::to_string(columns.size()));
        FieldReader f{rows[r], columns, line};

        TeamMatchRecord rec;
        rec.match_id = f.str(0);
        if (!Date::parse(f.str(1), rec.date))
            throw_error(ErrorKind::RangeViolation, f.where(1) + " is not an ISO-8601 date: '" + rows[r][1] + "'");
        rec.season = f.str(2);
        if (!parse_round(f.str(3), rec.round))
            throw_error(ErrorKind::RangeViolation,
                        f.where(3) + " must be one of R16/QF/SF/Final: '" + rows[r][3] + "'");
        rec.team = f.str(4);
        rec.opponent = f.str(5);
        rec.home = f.int_at(6, 0, 1) == 1;

        TeamStats& s = rec.stats;
        s.goals = f.nonneg_int(7);
        s.attempts = f.nonneg_int(8);
        s.attempts_on_target = f.nonneg_int(9);
        s.attempts_off_target = f.nonneg_int(10);
        s.blocked_shots = f.nonneg_int(11);
        s.woodwork = f.nonneg_int(12);
        s.corners = f.nonneg_int(13);
        s.offsides = f.nonneg_int(14);
        s.possession_pct = f.real_at(15, 0.0, 100.0);
        s.passes = f.nonneg_int(16);
        s.pass_accuracy_pct = f.real_at(17, 0.0, 100.0);
        s.passes_completed = f.nonneg_int(18);
        s.distance_covered_km = f.real_at(19, 0.0, 1e9);
        s.balls_recovered = f.nonneg_int(20);
        s.tackles = f.nonneg_int(21);
        s.clearances = f.nonneg_int(22);
        s.blocks = f.nonneg_int(23);
        s.yellow_cards = f.nonneg_int(24);
        s.red_cards = f.nonneg_int(25);
        s.fouls = f.nonneg_int(26);

        if (s.passes_completed > s.passes)
            throw_error(ErrorKind::InvariantViolation,
                        "row " + std::to_string(line) + ": passes_completed (" +
                        std::to_string(s.passes_completed) + ") exceeds passes (" +
                        std::to_string(s.passes) + ")");
        if (rec.team == rec.opponent)
            throw_error(ErrorKind::InvariantViolation,
                        "row " + std::to_string(line) + ": team and opponent are both '" + rec.team + "'");
        if (!seen.insert({rec.match_id, rec.team}).second)
            throw_error(ErrorKind::DuplicateTeamRow,
                        "duplicate row for match '" + rec.match_id + "', team '" + rec.team + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PlayerMatchRecord> parse_player_matches(std::string_view csv_text) {
    auto rows = csv::parse(csv_text);
    if (rows.empty())
        throw_error(ErrorKind::MissingColumn, "input has no header row");
    static const std::vector<std::string> columns = split_header(kPlayerCsvHeader);
    check_header(rows[0], columns);

    std::vector<PlayerMatchRecord> records;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        int line = static_cast<int>(r + 1);
        if (rows[r].size() != columns.size())
            throw_error(ErrorKind::MissingColumn,
                        "row " + std::to_string(line) + " has " + std::to_string(rows[r].size()) +
                        " fields, expected " + std::to_string(columns.size()));
        FieldReader f{rows[r], columns, line};

        PlayerMatchRecord rec;
        rec.match_id = f.str(0);
        rec.team = f.str(1);
        rec.player = f.str(2);

        PlayerStats& s = rec.stats;
        s.goals = f.nonneg_int(3);
        s.shots = f.nonneg_int(4);
        s.shots_on_target = f.nonneg_int(5);
        s.assists = f.nonneg_int(6);
        s.interceptions = f.nonneg_int(7);
        s.crosses = f.nonneg_int(8);
        s.fouls_committed = f.nonneg_int(9);
        s.offsides = f.nonneg_int(10);
        s.minutes_played = f.int_at(11, 0, 150);

        if (s.shots_on_target > s.shots)
            throw_error(ErrorKind::InvariantViolation,
                        "row " + std::to_string(line) + ": shots_on_target (" +
                        std::to_string(s.shots_on_target) + ") exceeds shots (" +
                        std::to_string(s.shots) + ")");
        if (!seen.insert({rec.match_id, rec.team, rec.player}).second)
            throw_error(ErrorKind::InvariantViolation,
                        "duplicate row for match '" + rec.match_id + "', player '" + rec.player + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

std::string serialize_team_matches(const std::vector<TeamMatchRecord>& records) {
    std::string out = kTeamCsvHeader + "\n";
    for (const auto& r : records) {
        const TeamStats& s = r.stats;
        out += csv::join_row({
            r.match_id, r.date.to_string(), r.season, round_name(r.round), r.team, r.opponent,
            r.home ? "1" : "0",
            std::to_string(s.goals), std::to_string(s.attempts), std::to_string(s.attempts_on_target),
            std::to_string(s.attempts_off_target), std::to_string(s.blocked_shots),
            std::to_string(s.woodwork), std::to_string(s.corners), std::to_string(s.offsides),
            csv::format_double(s.possession_pct), std::to_string(s.passes),
            csv::format_double(s.pass_accuracy_pct), std::to_string(s.passes_completed),
            csv::format_double(s.distance_covered_km), std::to_string(s.balls_recovered),
            std::to_string(s.tackles), std::to_string(s.clearances), std::to_string(s.blocks),
            std::to_string(s.yellow_cards), std::to_string(s.red_cards), std::to_string(s.fouls),
        });
    }
    return out;
}

std::string serialize_player_matches(const std::vector<PlayerMatchRecord>& records) {
    std::string out = kPlayerCsvHeader + "\n";
    for (const auto& r : records) {
        const PlayerStats& s = r.stats;
        out += csv::join_row({
            r.match_id, r.team, r.player,
            std::to_string(s.goals), std::to_string(s.shots), std::to_string(s.shots_on_target),
            std::to_string(s.assists), std::to_string(s.interceptions), std::to_string(s.crosses),
            std::to_string(s.fouls_committed), std::to_string(s.offsides),
            std::to_string(s.minutes_played),
        });
    }
    return out;
}

} // namespace kosim::ingest
