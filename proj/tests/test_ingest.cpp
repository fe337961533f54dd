#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corpus.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "records.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

using namespace kosim;
using namespace kosim::ingest;

namespace {

// Replaces one cell in a CSV body row, counting from the header as row 0.
std::string with_cell(const std::string& text, int row, int col, const std::string& value) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    std::vector<std::string> cells;
    std::string& line = lines[std::size_t(row)];
    pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(pos));
            break;
        }
        cells.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    cells[std::size_t(col)] = value;
    line.clear();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("date serial round-trips and orders") {
    Date d{2019, 4, 30};
    CHECK(Date::from_serial(d.serial()) == d);
    CHECK(Date{2019, 5, 1}.serial() == d.serial() + 1);
    CHECK(Date{2019, 4, 29} < d);
    for (long s = Date{1990, 1, 1}.serial(); s < Date{1990, 1, 1}.serial() + 20000; s += 137) {
        CHECK(Date::from_serial(s).serial() == s);
    }
}

TEST_CASE("date parses ISO-8601 only") {
    Date d;
    CHECK(Date::parse("2019-04-30", d));
    CHECK(d == Date{2019, 4, 30});
    CHECK(d.to_string() == "2019-04-30");
    CHECK_FALSE(Date::parse("30/04/2019", d));
    CHECK_FALSE(Date::parse("2019-13-01", d));
    CHECK_FALSE(Date::parse("2019-02-30", d));
    CHECK_FALSE(Date::parse("", d));
}

TEST_CASE("round names round-trip") {
    for (Round r : {Round::R16, Round::QF, Round::SF, Round::Final}) {
        Round parsed;
        CHECK(parse_round(round_name(r), parsed));
        CHECK(parsed == r);
    }
    Round r;
    CHECK_FALSE(parse_round("group", r));
}

TEST_CASE("team stats vector round-trip preserves every field") {
    TeamStats s;
    s.goals = 2;
    s.attempts = 10;
    s.attempts_on_target = 5;
    s.attempts_off_target = 3;
    s.blocked_shots = 2;
    s.woodwork = 1;
    s.corners = 6;
    s.offsides = 2;
    s.possession_pct = 55.5;
    s.passes = 500;
    s.pass_accuracy_pct = 90.0;
    s.passes_completed = 450;
    s.distance_covered_km = 105.3;
    s.balls_recovered = 40;
    s.tackles = 20;
    s.clearances = 15;
    s.blocks = 8;
    s.yellow_cards = 2;
    s.red_cards = 0;
    s.fouls = 11;
    auto v = s.to_vector();
    REQUIRE(v.size() == std::size_t(kTeamStatCount));
    CHECK(TeamStats::from_vector(v) == s);
    CHECK(v[0] == 2.0);
    CHECK(v[8] == 55.5);
}

TEST_CASE("real-valued team stats are exactly the three fraction fields") {
    std::set<std::string> real_valued;
    for (int i = 0; i < kTeamStatCount; ++i) {
        if (team_stat_real_valued(i)) real_valued.insert(std::string(kTeamStatNames[i]));
    }
    CHECK(real_valued ==
          std::set<std::string>{"possession_pct", "pass_accuracy_pct", "distance_covered_km"});
}

TEST_CASE("well-formed two-row file yields two records") {
    auto records = parse_team_matches(testutil::two_team_team_csv());
    REQUIRE(records.size() == 2);
    CHECK(records[0].match_id == "M1");
    CHECK(records[0].team == "AAA");
    CHECK(records[0].opponent == "BBB");
    CHECK(records[0].home);
    CHECK(records[0].date == Date{2019, 4, 30});
    CHECK(records[0].season == "2018-19");
    CHECK(records[0].round == Round::SF);
    CHECK(records[0].stats.goals == 2);
    CHECK(records[0].stats.possession_pct == 55.5);
    CHECK_FALSE(records[1].home);
}

TEST_CASE("header-only file yields empty list") {
    CHECK(parse_team_matches(std::string(testutil::kTeamHeader) + "\n").empty());
    CHECK(parse_player_matches(std::string(testutil::kPlayerHeader) + "\n").empty());
}

TEST_CASE("team csv serialization round-trips") {
    auto records = parse_team_matches(testutil::two_team_team_csv());
    CHECK(parse_team_matches(serialize_team_matches(records)) == records);
    auto players = parse_player_matches(testutil::two_team_player_csv());
    CHECK(parse_player_matches(serialize_player_matches(players)) == players);
}

TEST_CASE("missing column is named in the error") {
    std::string bad = testutil::two_team_team_csv();
    auto pos = bad.find(",goals");
    bad = bad.substr(0, pos) + bad.substr(pos + 6);
    try {
        parse_team_matches(bad);
        FAIL("expected MissingColumn");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingColumn);
        CHECK(std::string(e.what()).find("goals") != std::string::npos);
    }
}

TEST_CASE("non-numeric field reports row and column") {
    std::string bad = with_cell(testutil::two_team_team_csv(), 1, 7, "abc");
    try {
        parse_team_matches(bad);
        FAIL("expected NonNumericField");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonNumericField);
        CHECK(std::string(e.what()).find("goals") != std::string::npos);
    }
}

TEST_CASE("parse rejects invariant and range violations") {
    // passes_completed 501 > passes 500.
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 18, "501"));
          }) == ErrorKind::InvariantViolation);
    // negative count.
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 13, "-1"));
          }) == ErrorKind::RangeViolation);
    // possession outside [0, 100].
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 15, "130.5"));
          }) == ErrorKind::RangeViolation);
    // bad date.
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 1, "30/04/2019"));
          }) == ErrorKind::RangeViolation);
    // unknown round.
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 3, "Group"));
          }) == ErrorKind::RangeViolation);
    // team equals opponent.
    CHECK(kind_of([] {
              parse_team_matches(with_cell(testutil::two_team_team_csv(), 1, 5, "AAA"));
          }) == ErrorKind::InvariantViolation);
    // shots_on_target 5 > shots 4.
    CHECK(kind_of([] {
              parse_player_matches(with_cell(testutil::two_team_player_csv(), 1, 5, "5"));
          }) == ErrorKind::InvariantViolation);
    // minutes_played 151.
    CHECK(kind_of([] {
              parse_player_matches(with_cell(testutil::two_team_player_csv(), 1, 11, "151"));
          }) == ErrorKind::RangeViolation);
}

TEST_CASE("duplicate team row for one match is rejected") {
    std::string bad = with_cell(testutil::two_team_team_csv(), 2, 4, "AAA");
    bad = with_cell(bad, 2, 5, "BBB");
    bad = with_cell(bad, 2, 6, "1");
    CHECK(kind_of([&] { parse_team_matches(bad); }) == ErrorKind::DuplicateTeamRow);
}

TEST_CASE("valid corpus validates with expected stats") {
    auto corpus = testutil::two_team_corpus();
    CHECK(corpus.stats.n_matches == 1);
    CHECK(corpus.stats.n_team_rows == 2);
    CHECK(corpus.stats.n_player_rows == 4);
    CHECK(corpus.stats.teams == std::set<std::string>{"AAA", "BBB"});
    CHECK(corpus.stats.players.size() == 4);
    CHECK(corpus.stats.seasons == std::set<std::string>{"2018-19"});
    CHECK(corpus.stats.warnings.empty());
    auto pairs = corpus.match_pairs();
    REQUIRE(pairs.size() == 1);
    CHECK(pairs.at("M1").first->team == "AAA");
    CHECK(pairs.at("M1").second->team == "BBB");
}

TEST_CASE("single team row for a match is unpaired") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    rows.pop_back();
    CHECK(kind_of([&] { validate_corpus(rows, {}); }) == ErrorKind::UnpairedMatch);
}

TEST_CASE("both rows claiming home is unpaired") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    rows[1].home = true;
    CHECK(kind_of([&] { validate_corpus(rows, {}); }) == ErrorKind::UnpairedMatch);
}

TEST_CASE("opponent cross-reference must match") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    rows[1].opponent = "CCC";
    CHECK(kind_of([&] { validate_corpus(rows, {}); }) == ErrorKind::UnpairedMatch);
}

TEST_CASE("paired rows must agree on date, season, and round") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    rows[1].date = Date{2019, 5, 1};
    CHECK(kind_of([&] { validate_corpus(rows, {}); }) == ErrorKind::UnpairedMatch);
}

TEST_CASE("player row citing unknown match is orphaned") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    auto players = parse_player_matches(testutil::two_team_player_csv());
    players[0].match_id = "M9";
    CHECK(kind_of([&] { validate_corpus(rows, players); }) == ErrorKind::OrphanPlayerRow);
    // Right match, wrong team.
    players = parse_player_matches(testutil::two_team_player_csv());
    players[0].team = "CCC";
    CHECK(kind_of([&] { validate_corpus(rows, players); }) == ErrorKind::OrphanPlayerRow);
}

TEST_CASE("possession drift and attempt overflow are warnings, not errors") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    rows[0].stats.possession_pct = 50.0;  // 50 + 44.5 is off by 5.5.
    rows[0].stats.attempts_on_target = 9;  // 9 + 3 + 2 > 10 attempts.
    auto stats = validate_corpus(rows, {});
    REQUIRE(stats.warnings.size() == 2);
    CHECK(std::is_sorted(stats.warnings.begin(), stats.warnings.end()));
    bool possession = false;
    bool attempts = false;
    for (const auto& w : stats.warnings) {
        if (w.find("possession") != std::string::npos) possession = true;
        if (w.find("attempts") != std::string::npos) attempts = true;
    }
    CHECK(possession);
    CHECK(attempts);
}

TEST_CASE("duplicate player rows warn when fed directly") {
    auto rows = parse_team_matches(testutil::two_team_team_csv());
    auto players = parse_player_matches(testutil::two_team_player_csv());
    players.push_back(players[0]);
    auto stats = validate_corpus(rows, players);
    REQUIRE(stats.warnings.size() == 1);
    CHECK(stats.warnings[0].find("duplicate") != std::string::npos);
}

TEST_CASE("synthetic corpus validates by construction") {
    auto corpus = generate_synthetic_corpus(7, 8, 100, 18);
    CHECK(corpus.stats.n_matches == 100);
    CHECK(corpus.stats.n_team_rows == 200);
    CHECK(corpus.stats.n_player_rows == 3600);
    CHECK(corpus.stats.teams.size() == 8);
    CHECK(corpus.stats.warnings.empty());
}

TEST_CASE("synthetic corpus is deterministic per seed") {
    CHECK(generate_synthetic_corpus(7, 8, 20, 11) == generate_synthetic_corpus(7, 8, 20, 11));
    CHECK(corpus_to_json(generate_synthetic_corpus(7, 8, 20, 11)) ==
          corpus_to_json(generate_synthetic_corpus(7, 8, 20, 11)));
    CHECK_FALSE(generate_synthetic_corpus(8, 8, 20, 11) == generate_synthetic_corpus(7, 8, 20, 11));
}

TEST_CASE("synthetic minimal shape: 2 teams, 1 match, 11 players") {
    auto corpus = generate_synthetic_corpus(3, 2, 1, 11);
    CHECK(corpus.team_rows.size() == 2);
    CHECK(corpus.player_rows.size() == 22);
}

TEST_CASE("synthetic rows satisfy the stat identities everywhere") {
    auto corpus = generate_synthetic_corpus(12, 6, 60, 14);
    for (const auto& row : corpus.team_rows) {
        const auto& s = row.stats;
        CHECK(s.attempts == s.attempts_on_target + s.attempts_off_target + s.blocked_shots);
        CHECK(s.passes_completed <= s.passes);
        CHECK(s.goals <= s.attempts_on_target);
    }
    for (const auto& [id, pair] : corpus.match_pairs()) {
        CHECK(pair.first->stats.possession_pct + pair.second->stats.possession_pct ==
              doctest::Approx(100.0).epsilon(1e-12));
    }
    // Scorer totals per match side must match the team row.
    std::map<std::pair<std::string, std::string>, int> player_goals;
    for (const auto& row : corpus.player_rows) {
        player_goals[{row.match_id, row.team}] += row.stats.goals;
    }
    for (const auto& row : corpus.team_rows) {
        CHECK(player_goals[{row.match_id, row.team}] == row.stats.goals);
    }
}

TEST_CASE("corpus bundle json round-trips") {
    auto corpus = generate_synthetic_corpus(5, 4, 12, 11);
    auto text = corpus_to_json(corpus);
    CHECK(corpus_from_json(text) == corpus);
    CHECK(corpus_to_json(corpus_from_json(text)) == text);
}

TEST_CASE("corpus bundle rejects corruption") {
    auto text = corpus_to_json(testutil::two_team_corpus());
    CHECK(kind_of([&] { corpus_from_json("{ not json"); }) == ErrorKind::CorruptArtifact);
    CHECK(kind_of([&] { corpus_from_json("{}"); }) == ErrorKind::CorruptArtifact);
    std::string wrong_version = text;
    auto pos = wrong_version.find("\"version\": 1");
    REQUIRE(pos != std::string::npos);
    wrong_version.replace(pos, 12, "\"version\": 2");
    CHECK(kind_of([&] { corpus_from_json(wrong_version); }) == ErrorKind::VersionMismatch);
    CHECK(kind_of([&] { corpus_from_json(text.substr(0, text.size() / 2)); }) ==
          ErrorKind::CorruptArtifact);
}

TEST_CASE("corpus bundle save and load round-trip through files") {
    testutil::TempDir dir;
    auto corpus = generate_synthetic_corpus(9, 4, 10, 11);
    save_corpus(corpus, dir.file("corpus.json"));
    CHECK(load_corpus(dir.file("corpus.json")) == corpus);
    CHECK(kind_of([&] { load_corpus(dir.file("missing.json")); }) == ErrorKind::Io);
}
