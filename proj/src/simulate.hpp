#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bracket.hpp"
#include "features.hpp"
#include "train.hpp"

namespace kosim::sim {

// Proportional integer allocation: quotas total·w/Σw, floored, remainder
// given out by descending fractional part (ties: larger weight, then lower
// index). Zero or negative total weight splits the quota uniformly.
std::vector<int> largest_remainder_allocate(int total, const std::vector<double>& weights);

// Raw denormalized model outputs to publishable integer stat lines: counts
// rounded half-up and clamped at zero, the possession pair rescaled to sum
// to 100 with the home side absorbing the rounding remainder, and the pass
// counts made consistent.
std::pair<ingest::TeamStats, ingest::TeamStats>
reconcile_team_stats(const std::vector<double>& raw_home, const std::vector<double>& raw_away);

struct PlayerAllocation {
    std::vector<PlayerCount> scorers;
    std::vector<PlayerCount> assists;
};

// Goals split by largest remainder so they sum exactly to team_goals;
// assists likewise, capped at team_goals.
PlayerAllocation assign_player_stats(int team_goals, const std::string& team,
                                     const std::vector<std::pair<std::string, std::vector<double>>>&
                                         player_raws);

enum class DecidedBy { Goals, ShotsOnTarget, Experience, CoinFlip };
const char* decided_by_name(DecidedBy d);

struct LegScore {
    int goals_a = 0;
    int goals_b = 0;
    int shots_a = 0;
    int shots_b = 0;
};

// Aggregate goals, then aggregate shots on target, then experience, then a
// seeded coin flip. Returns whether side a advances and which rule decided.
std::pair<bool, DecidedBy> decide_fixture(const std::vector<LegScore>& legs,
                                          int experience_a, int experience_b, Rng& rng);

struct RunState {
    std::map<std::string, features::FormWindow> form;
    std::map<std::string, int> team_experience;
    std::map<std::string, int> player_experience;
};

// Read-only precomputation shared by every Monte Carlo run.
struct SimContext {
    const dae::TrainedModel* team_model = nullptr;
    const dae::TrainedModel* player_model = nullptr;
    std::map<std::string, std::vector<double>> team_embeddings;
    std::map<std::string, std::vector<double>> player_embeddings;
    // Squad members with corpus history, in squad order; members without
    // history are dropped with a warning.
    std::map<std::string, std::vector<std::string>> active_squads;
    int max_team_experience = 1;
    int max_player_experience = 1;
    RunState initial_state;
    std::vector<std::string> warnings;
};

SimContext prepare_simulation(const Bracket& bracket, const dae::TrainedModel& team_model,
                              const dae::TrainedModel& player_model,
                              const ingest::Corpus& corpus);

struct LegPrediction {
    ingest::TeamStats home;
    ingest::TeamStats away;
    std::vector<PlayerCount> scorers;
    std::vector<PlayerCount> assists;

    bool operator==(const LegPrediction&) const = default;
};

// One model invocation per side with roles swapped, then reconciliation and
// player attribution. The final is neutral: both home flags stay 0.
LegPrediction predict_leg(const SimContext& ctx, const RunState& state,
                          const std::string& home_team, const std::string& away_team,
                          bool neutral, Rng& rng);

// Form, team experience, and active-squad player experience updates after a
// simulated leg.
void apply_leg(const SimContext& ctx, RunState& state, const std::string& home_team,
               const std::string& away_team, const LegPrediction& leg);

struct LegOutcome {
    int leg_number = 1;
    std::string home_team;
    std::string away_team;
    bool neutral = false;
    bool recorded = false;
    LegPrediction prediction;
};

struct FixtureOutcome {
    std::string fixture_id;
    ingest::Round round = ingest::Round::R16;
    std::string team_a;
    std::string team_b;
    int goals_a = 0, goals_b = 0;
    int shots_a = 0, shots_b = 0;
    std::string winner;
    DecidedBy decided_by = DecidedBy::Goals;
    std::vector<LegOutcome> legs;
};

struct RunOutcome {
    std::vector<FixtureOutcome> fixtures;
    std::string champion;
};

struct DistributionRow {
    std::string team;
    std::string metric;   // passes | possession | corners
    double value = 0.0;
};

struct SimulationReport {
    std::uint64_t seed = 0;
    int runs = 1;
    RunOutcome narrative;                       // first run, fixture by fixture
    std::map<std::string, int> champion_counts; // across all runs
    std::vector<DistributionRow> distributions; // simulated legs of all runs
    std::vector<std::string> warnings;
};

// Runs the bracket `runs` times on independent streams derived from the
// seed; run 0 provides the narrative. Recorded legs are echoed verbatim,
// count toward aggregates, and never enter the simulated distributions.
SimulationReport simulate_bracket(const Bracket& bracket, const dae::TrainedModel& team_model,
                                  const dae::TrainedModel& player_model,
                                  const ingest::Corpus& corpus, int runs, std::uint64_t seed);

std::string report_to_json(const SimulationReport& report);
std::string report_legs_csv(const SimulationReport& report);
std::string report_distributions_csv(const SimulationReport& report);
std::string report_summary_text(const SimulationReport& report);

} // namespace kosim::sim
