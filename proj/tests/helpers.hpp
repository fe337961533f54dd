#pragma once

// Shared fixtures: a hand-written two-team corpus small enough to verify by
// eye, plus filesystem scratch space that cleans up after each test.

#include "corpus.hpp"
#include "records.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace testutil {

inline const char* kTeamHeader =
    "match_id,date,season,round,team,opponent,home,goals,attempts,attempts_on_target,"
    "attempts_off_target,blocked_shots,woodwork,corners,offsides,possession_pct,passes,"
    "pass_accuracy_pct,passes_completed,distance_covered_km,balls_recovered,tackles,"
    "clearances,blocks,yellow_cards,red_cards,fouls";

inline const char* kPlayerHeader =
    "match_id,team,player,goals,shots,shots_on_target,assists,interceptions,crosses,"
    "fouls_committed,offsides,minutes_played";

// One match: AAA (home) beats BBB 2-1.
inline std::string two_team_team_csv() {
    std::string text = kTeamHeader;
    text +=
        "\n"
        "M1,2019-04-30,2018-19,SF,AAA,BBB,1,2,10,5,3,2,1,6,2,55.5,500,90.0,450,105.3,40,20,15,"
        "8,2,0,11\n"
        "M1,2019-04-30,2018-19,SF,BBB,AAA,0,1,8,3,4,1,0,4,1,44.5,400,85.0,340,102.1,45,25,18,"
        "10,3,1,14\n";
    return text;
}

inline std::string two_team_player_csv() {
    std::string text = kPlayerHeader;
    text +=
        "\n"
        "M1,AAA,AAA_P1,2,4,3,0,1,2,1,0,90\n"
        "M1,AAA,AAA_P2,0,2,1,2,3,4,2,1,90\n"
        "M1,BBB,BBB_P1,1,3,2,0,2,1,3,0,90\n"
        "M1,BBB,BBB_P2,0,1,0,1,1,0,0,0,45\n";
    return text;
}

inline kosim::ingest::Corpus two_team_corpus() {
    return kosim::ingest::make_corpus(
        kosim::ingest::parse_team_matches(two_team_team_csv()),
        kosim::ingest::parse_player_matches(two_team_player_csv()));
}

// Unique scratch directory, removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            path_ = base / ("kosim_test_" + std::to_string(::getpid()) + "_" +
                            std::to_string(counter_++) + "_" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(path_, ec)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

}  // namespace testutil
