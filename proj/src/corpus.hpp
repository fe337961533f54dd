#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "records.hpp"

namespace kosim::ingest {

struct CorpusStats {
    int n_matches = 0;
    int n_team_rows = 0;
    int n_player_rows = 0;
    std::set<std::string> teams;
    std::set<std::string> players;
    std::set<std::string> seasons;
    std::vector<std::string> warnings;   // sorted, so validation is order-insensitive

    bool operator==(const CorpusStats&) const = default;
};

// A validated corpus: rows as parsed plus the summary from validate_corpus.
struct Corpus {
    std::vector<TeamMatchRecord> team_rows;
    std::vector<PlayerMatchRecord> player_rows;
    CorpusStats stats;

    bool operator==(const Corpus&) const = default;

    // Both rows of a match, home side first.
    std::map<std::string, std::pair<const TeamMatchRecord*, const TeamMatchRecord*>> match_pairs() const;
};

// Pairing checks: two rows per match with complementary home flags and
// cross-referencing opponents; player rows must cite an existing
// (match_id, team) pair. Stat oddities that real data is known to contain
// (attempts decomposition, possession rounding drift) become warnings.
CorpusStats validate_corpus(const std::vector<TeamMatchRecord>& team_rows,
                            const std::vector<PlayerMatchRecord>& player_rows);

Corpus make_corpus(std::vector<TeamMatchRecord> team_rows,
                   std::vector<PlayerMatchRecord> player_rows);

// Deterministic synthetic corpus. Team strengths are evenly spaced and
// shuffled by the seed, so every corpus has a strict strength ordering;
// stronger teams run up higher goal and passing numbers, and goals follow
// attempts_on_target more tightly than any other stat.
Corpus generate_synthetic_corpus(std::uint64_t seed, int n_teams, int n_matches,
                                 int players_per_team);

// Single-file JSON bundle for the validated corpus.
std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace kosim::ingest
