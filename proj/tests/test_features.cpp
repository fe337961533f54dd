#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corpus.hpp"
#include "error.hpp"
#include "features.hpp"
#include "helpers.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

using namespace kosim;
using namespace kosim::features;
using kosim::ingest::Corpus;
using kosim::ingest::Date;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

// Direct two-pass Pearson, written independently of the library routine.
double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("scaler captures per-column extrema") {
    auto scaler = fit_scaler({{0.0, 3.0}, {50.0, 7.0}, {100.0, 5.0}}, {"a", "b"});
    REQUIRE(scaler.dim() == 2);
    CHECK(scaler.mins == std::vector<double>{0.0, 3.0});
    CHECK(scaler.maxs == std::vector<double>{100.0, 7.0});
    CHECK(scaler.features == std::vector<std::string>{"a", "b"});
}

TEST_CASE("scaler on a constant column stores min == max") {
    auto scaler = fit_scaler({{7.0}, {7.0}, {7.0}}, {"c"});
    CHECK(scaler.mins[0] == 7.0);
    CHECK(scaler.maxs[0] == 7.0);
}

TEST_CASE("scaler rejects empty and ragged input") {
    CHECK(kind_of([] { fit_scaler({}, {"a"}); }) == ErrorKind::EmptyCorpus);
    CHECK(kind_of([] { fit_scaler({{1.0, 2.0}, {1.0}}, {"a", "b"}); }) ==
          ErrorKind::DimensionMismatch);
    CHECK(kind_of([] { fit_scaler({{1.0}}, {"a", "b"}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("transform maps extrema to 0 and 1, midpoint to 0.5") {
    auto scaler = fit_scaler({{0.0}, {100.0}}, {"a"});
    CHECK(transform(scaler, {0.0})[0] == 0.0);
    CHECK(transform(scaler, {100.0})[0] == 1.0);
    CHECK(transform(scaler, {50.0})[0] == 0.5);
    CHECK(inverse_transform(scaler, {0.5})[0] == 50.0);
}

TEST_CASE("degenerate feature transforms to 0 and inverts to its constant") {
    auto scaler = fit_scaler({{7.0}, {7.0}}, {"c"});
    CHECK(transform(scaler, {7.0})[0] == 0.0);
    CHECK(transform(scaler, {9.0})[0] == 0.0);
    CHECK(inverse_transform(scaler, {0.0})[0] == 7.0);
    CHECK(inverse_transform(scaler, {0.73})[0] == 7.0);
}

TEST_CASE("scaler round-trips random vectors within 1e-9") {
    Rng rng(42);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({rng.uniform(0, 1000), rng.uniform(-5, 5), 3.25});
    }
    auto scaler = fit_scaler(rows, {"a", "b", "c"});
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x = {rng.uniform(scaler.mins[0], scaler.maxs[0]),
                                 rng.uniform(scaler.mins[1], scaler.maxs[1]), 3.25};
        auto back = inverse_transform(scaler, transform(scaler, x));
        for (std::size_t d = 0; d < x.size(); ++d) {
            CHECK(std::abs(back[d] - x[d]) < 1e-9);
        }
    }
}

TEST_CASE("scaler json round-trips") {
    auto scaler = fit_scaler({{0.0, 3.0}, {100.0, 7.0}}, {"a", "b"});
    auto copy = scaler_from_json(scaler_to_json(scaler));
    CHECK(copy.features == scaler.features);
    CHECK(copy.mins == scaler.mins);
    CHECK(copy.maxs == scaler.maxs);
    CHECK(kind_of([] { scaler_from_json("[1,2"); }) == ErrorKind::CorruptArtifact);
}

TEST_CASE("form index scores wins three, draws one") {
    using MR = MatchResult;
    CHECK(form_index({}) == 0);
    CHECK(form_index({MR::Win, MR::Win, MR::Win, MR::Win, MR::Win}) == 15);
    CHECK(form_index({MR::Loss, MR::Loss, MR::Loss, MR::Loss, MR::Loss}) == 0);
    CHECK(form_index({MR::Win, MR::Draw, MR::Loss}) == 4);
    CHECK(form_index({MR::Draw, MR::Draw, MR::Draw, MR::Draw, MR::Draw}) == 5);
    CHECK(kind_of([] {
              form_index({MR::Win, MR::Win, MR::Win, MR::Win, MR::Win, MR::Win});
          }) == ErrorKind::RangeViolation);
}

TEST_CASE("form window slides and caps at five") {
    using MR = MatchResult;
    FormWindow w;
    w = update_form(w, MR::Win);
    CHECK(w == FormWindow{MR::Win});
    w = {MR::Win, MR::Win, MR::Win, MR::Win, MR::Win};
    w = update_form(w, MR::Loss);
    CHECK(w == FormWindow{MR::Win, MR::Win, MR::Win, MR::Win, MR::Loss});
    CHECK(form_index(w) == 12);
}

TEST_CASE("pearson matches hand-evaluated cases") {
    CHECK(*pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*pearson_correlation({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(*pearson_correlation({1, 2, 3}, {1, 1, 2}) ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("pearson is undefined for degenerate input") {
    CHECK_FALSE(pearson_correlation({}, {}).has_value());
    CHECK_FALSE(pearson_correlation({1.0}, {2.0}).has_value());
    CHECK_FALSE(pearson_correlation({3, 3, 3}, {1, 2, 3}).has_value());
    CHECK_FALSE(pearson_correlation({1, 2, 3}, {5, 5, 5}).has_value());
}

TEST_CASE("pearson is symmetric and affine-invariant") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x;
        std::vector<double> y;
        for (int i = 0; i < 30; ++i) {
            x.push_back(rng.uniform(0, 10));
            y.push_back(rng.uniform(0, 10));
        }
        double r = *pearson_correlation(x, y);
        CHECK(std::abs(r) <= 1.0);
        CHECK(std::abs(r - *pearson_correlation(y, x)) < 1e-12);
        std::vector<double> ax = x;
        for (auto& v : ax) v = 3.5 * v + 2.0;
        CHECK(std::abs(r - *pearson_correlation(ax, y)) < 1e-12);
        for (auto& v : ax) v = -v;
        CHECK(std::abs(r + *pearson_correlation(ax, y)) < 1e-12);
        CHECK(std::abs(r - naive_pearson(x, y)) < 1e-12);
    }
}

TEST_CASE("goal correlation ranking agrees with a direct computation") {
    auto corpus = ingest::generate_synthetic_corpus(21, 6, 80, 12);
    auto ranked = correlation_with_goals(corpus);
    REQUIRE(ranked.size() == std::size_t(ingest::kTeamStatCount - 1));

    std::map<std::string, std::optional<double>> direct;
    std::vector<double> goals;
    for (const auto& row : corpus.team_rows) goals.push_back(double(row.stats.goals));
    for (int f = 0; f < ingest::kTeamStatCount; ++f) {
        std::string name(ingest::kTeamStatNames[f]);
        if (name == "goals") continue;
        std::vector<double> xs;
        for (const auto& row : corpus.team_rows) xs.push_back(row.stats.to_vector()[f]);
        double r = naive_pearson(xs, goals);
        direct[name] = std::isfinite(r) ? std::optional<double>(r) : std::nullopt;
    }
    for (const auto& [name, r] : ranked) {
        REQUIRE(direct.count(name) == 1);
        if (r.has_value()) {
            CHECK(std::abs(*r - *direct[name]) < 1e-12);
        } else {
            CHECK_FALSE(direct[name].has_value());
        }
    }
    // Ranking order: defined entries first, descending r.
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        if (ranked[i].second.has_value()) {
            REQUIRE(ranked[i - 1].second.has_value());
            CHECK(*ranked[i - 1].second >= *ranked[i].second);
        }
    }
}

TEST_CASE("feature equal to goals ranks first with r == 1") {
    auto corpus = testutil::two_team_corpus();
    auto rows = corpus.team_rows;
    // Force corners := goals so its correlation is exactly 1.
    for (auto& row : rows) row.stats.corners = row.stats.goals;
    rows.push_back(rows[0]);
    rows.push_back(rows[1]);
    rows[2].match_id = rows[3].match_id = "M2";
    rows[2].date = rows[3].date = Date{2019, 5, 7};
    rows[2].stats.goals = rows[2].stats.corners = 5;
    rows[3].stats.goals = rows[3].stats.corners = 0;
    auto with_copy = ingest::make_corpus(rows, {});
    auto ranked = correlation_with_goals(with_copy);
    CHECK(ranked[0].first == "corners");
    CHECK(*ranked[0].second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tied correlations rank lexicographically") {
    auto corpus = testutil::two_team_corpus();
    auto rows = corpus.team_rows;
    for (auto& row : rows) {
        row.stats.corners = row.stats.goals;
        row.stats.offsides = row.stats.goals;
    }
    rows.push_back(rows[0]);
    rows.push_back(rows[1]);
    rows[2].match_id = rows[3].match_id = "M2";
    rows[2].date = rows[3].date = Date{2019, 5, 7};
    auto tied = ingest::make_corpus(rows, {});
    auto ranked = correlation_with_goals(tied);
    // Two duplicated rows make every varying feature tie at |r| == 1, so the
    // whole r == 1 block must come out in name order.
    bool saw_corners = false;
    bool saw_offsides = false;
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        if (!ranked[i].second || !ranked[i - 1].second) continue;
        if (*ranked[i].second == *ranked[i - 1].second) {
            CHECK(ranked[i - 1].first < ranked[i].first);
        }
    }
    for (const auto& [name, r] : ranked) {
        if (name == "corners") {
            saw_corners = true;
            CHECK(*r == doctest::Approx(1.0).epsilon(1e-12));
        }
        if (name == "offsides") {
            saw_offsides = true;
            CHECK(*r == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(saw_corners);
    CHECK(saw_offsides);
}

TEST_CASE("undefined correlations sort after defined ones") {
    auto corpus = testutil::two_team_corpus();
    auto rows = corpus.team_rows;
    rows.push_back(rows[0]);
    rows.push_back(rows[1]);
    rows[2].match_id = rows[3].match_id = "M2";
    rows[2].date = rows[3].date = Date{2019, 5, 7};
    for (auto& row : rows) row.stats.woodwork = 1;  // constant, r undefined
    auto fixed = ingest::make_corpus(rows, {});
    auto ranked = correlation_with_goals(fixed);
    bool seen_undefined = false;
    for (const auto& [name, r] : ranked) {
        if (!r.has_value()) seen_undefined = true;
        if (seen_undefined) CHECK_FALSE(r.has_value());
    }
    CHECK(seen_undefined);
}

TEST_CASE("index sorts rows chronologically and counts strictly-prior experience") {
    auto corpus = ingest::generate_synthetic_corpus(4, 4, 24, 11);
    CorpusIndex index(corpus);
    for (const auto& team : corpus.stats.teams) {
        const auto& rows = index.team_rows(team);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::tie(rows[i - 1]->date, rows[i - 1]->match_id) <=
                  std::tie(rows[i]->date, rows[i]->match_id));
        }
        CHECK(index.team_experience(team, Date{1900, 1, 1}) == 0);
        CHECK(index.team_experience(team, Date{9999, 1, 1}) == int(rows.size()));
        if (!rows.empty()) {
            // A cutoff equal to the first match date excludes that match.
            CHECK(index.team_experience(team, rows[0]->date) == 0);
        }
    }
    CHECK(index.team_experience("NOPE", Date{9999, 1, 1}) == 0);
    CHECK(index.max_team_experience() >= 1);
}

TEST_CASE("index derives results from the paired opponent row") {
    auto corpus = testutil::two_team_corpus();
    CorpusIndex index(corpus);
    const auto& aaa = index.team_rows("AAA");
    REQUIRE(aaa.size() == 1);
    CHECK(index.opponent_goals(*aaa[0]) == 1);
    CHECK(index.result_for(*aaa[0]) == MatchResult::Win);
    const auto& bbb = index.team_rows("BBB");
    CHECK(index.result_for(*bbb[0]) == MatchResult::Loss);
    CHECK(index.recent_form("AAA", Date{9999, 1, 1}) == FormWindow{MatchResult::Win});
    CHECK(index.recent_form("AAA", Date{2019, 4, 30}).empty());
}

TEST_CASE("recent form keeps only the last five results") {
    auto corpus = ingest::generate_synthetic_corpus(4, 2, 12, 11);
    CorpusIndex index(corpus);
    for (const auto& team : corpus.stats.teams) {
        auto form = index.recent_form(team, Date{9999, 1, 1});
        CHECK(form.size() <= 5);
        CHECK(form.size() == std::min<std::size_t>(5, index.team_rows(team).size()));
    }
}

TEST_CASE("team embedding is the mean of normalized stat vectors") {
    auto corpus = testutil::two_team_corpus();
    CorpusIndex index(corpus);
    auto scaler = fit_team_scaler(corpus);
    auto emb = team_embedding(index, scaler, "AAA");
    REQUIRE(emb.size() == std::size_t(ingest::kTeamStatCount));
    // One match: embedding equals that row's transformed vector.
    auto expected = transform(scaler, index.team_rows("AAA")[0]->stats.to_vector());
    CHECK(emb == expected);
    for (double v : emb) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(kind_of([&] { team_embedding(index, scaler, "NOPE"); }) == ErrorKind::UnknownEntity);
}

TEST_CASE("two-match embedding is the componentwise mean") {
    auto corpus = ingest::generate_synthetic_corpus(8, 2, 2, 11);
    CorpusIndex index(corpus);
    auto scaler = fit_team_scaler(corpus);
    for (const auto& team : corpus.stats.teams) {
        const auto& rows = index.team_rows(team);
        REQUIRE(rows.size() == 2);
        auto v1 = transform(scaler, rows[0]->stats.to_vector());
        auto v2 = transform(scaler, rows[1]->stats.to_vector());
        auto emb = team_embedding(index, scaler, team);
        for (std::size_t d = 0; d < emb.size(); ++d) {
            CHECK(emb[d] == doctest::Approx((v1[d] + v2[d]) / 2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("embedding is invariant to corpus row order") {
    auto corpus = ingest::generate_synthetic_corpus(13, 4, 20, 11);
    auto shuffled_rows = corpus.team_rows;
    auto shuffled_players = corpus.player_rows;
    Rng rng(99);
    rng.shuffle(shuffled_rows);
    rng.shuffle(shuffled_players);
    auto shuffled = ingest::make_corpus(shuffled_rows, shuffled_players);
    CorpusIndex a(corpus);
    CorpusIndex b(shuffled);
    auto scaler_a = fit_team_scaler(corpus);
    auto scaler_b = fit_team_scaler(shuffled);
    CHECK(scaler_a.mins == scaler_b.mins);
    CHECK(scaler_a.maxs == scaler_b.maxs);
    for (const auto& team : corpus.stats.teams) {
        auto ea = team_embedding(a, scaler_a, team);
        auto eb = team_embedding(b, scaler_b, team);
        for (std::size_t d = 0; d < ea.size(); ++d) {
            CHECK(ea[d] == doctest::Approx(eb[d]).epsilon(1e-12));
        }
    }
}

TEST_CASE("model inputs concatenate embeddings and context in declared order") {
    std::vector<double> team_emb(ingest::kTeamStatCount, 0.25);
    std::vector<double> opp_emb(ingest::kTeamStatCount, 0.75);
    auto input = make_team_input(team_emb, opp_emb, true, 9, 0.5);
    REQUIRE(input.size() == std::size_t(kTeamInputDim));
    CHECK(input[0] == 0.25);
    CHECK(input[19] == 0.25);
    CHECK(input[20] == 0.75);
    CHECK(input[39] == 0.75);
    CHECK(input[40] == 1.0);
    CHECK(input[41] == doctest::Approx(9.0 / 15.0).epsilon(1e-12));
    CHECK(input[42] == 0.5);

    std::vector<double> player_emb(ingest::kPlayerStatCount, 0.4);
    auto pinput = make_player_input(player_emb, team_emb, false, 15, 1.0);
    REQUIRE(pinput.size() == std::size_t(kPlayerInputDim));
    CHECK(pinput[0] == 0.4);
    CHECK(pinput[8] == 0.4);
    CHECK(pinput[9] == 0.25);
    CHECK(pinput[28] == 0.25);
    CHECK(pinput[29] == 0.0);
    CHECK(pinput[30] == 1.0);
    CHECK(pinput[31] == 1.0);
}

TEST_CASE("clean masks protect exactly the context dimensions") {
    auto team_mask = team_clean_mask();
    auto player_mask = player_clean_mask();
    REQUIRE(team_mask.size() == std::size_t(kTeamInputDim));
    REQUIRE(player_mask.size() == std::size_t(kPlayerInputDim));
    for (std::size_t i = 0; i < team_mask.size(); ++i) {
        CHECK(team_mask[i] == (i >= team_mask.size() - kContextDim));
    }
    for (std::size_t i = 0; i < player_mask.size(); ++i) {
        CHECK(player_mask[i] == (i >= player_mask.size() - kContextDim));
    }
}

TEST_CASE("datasets hold one sample per corpus row with values in [0,1]") {
    auto corpus = ingest::generate_synthetic_corpus(6, 4, 16, 11);
    CorpusIndex index(corpus);
    auto team_scaler = fit_team_scaler(corpus);
    auto player_scaler = fit_player_scaler(corpus);
    auto team_data = build_team_dataset(index, team_scaler);
    CHECK(team_data.inputs.size() == corpus.team_rows.size());
    CHECK(team_data.clean_mask == team_clean_mask());
    for (const auto& sample : team_data.inputs) {
        REQUIRE(sample.size() == std::size_t(kTeamInputDim));
        for (double v : sample) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    auto player_data = build_player_dataset(index, team_scaler, player_scaler);
    CHECK(player_data.inputs.size() == corpus.player_rows.size());
    CHECK(player_data.clean_mask == player_clean_mask());
    for (const auto& sample : player_data.inputs) {
        REQUIRE(sample.size() == std::size_t(kPlayerInputDim));
    }
}

TEST_CASE("correlations csv ranks features and leaves undefined r empty") {
    auto corpus = ingest::generate_synthetic_corpus(21, 6, 80, 12);
    auto csv = correlations_csv(corpus);
    CHECK(csv.rfind("feature,pearson_r\n", 0) == 0);
    auto ranked = correlation_with_goals(corpus);
    // First ranked feature appears on the second line.
    auto second_line = csv.substr(csv.find('\n') + 1);
    second_line = second_line.substr(0, second_line.find(','));
    CHECK(second_line == ranked[0].first);
}

TEST_CASE("distribution csv emits three metrics per team row") {
    auto corpus = ingest::generate_synthetic_corpus(5, 4, 10, 11);
    auto csv = distributions_csv(corpus);
    CHECK(csv.rfind("team,metric,value\n", 0) == 0);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 1 + 3 * corpus.team_rows.size());
    CHECK(csv.find(",passes,") != std::string::npos);
    CHECK(csv.find(",possession,") != std::string::npos);
    CHECK(csv.find(",corners,") != std::string::npos);
}
