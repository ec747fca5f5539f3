#include "errband/scoring.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace errband;

namespace {

PredictionInterval interval(double tau, double lower, double upper, double point = 0.0) {
    return make_interval(point, ConfidenceLevel(tau), {lower - point, upper - point});
}

ScoredForecast scored(const std::string& country, Horizon h, double total, double y, double lower, double upper) {
    ScoredForecast s;
    s.target = {country, "gdp"};
    s.method = "imf";
    s.origin = {2020, season_of(h)};
    s.target_year = 2020 + offset_years(h);
    s.horizon = h;
    s.outcome = y;
    s.levels.push_back({0.8, lower, upper, {}, interval_score(lower, upper, y, ConfidenceLevel(0.8))});
    s.wis = {total / 2, total / 4, total / 4, total};
    return s;
}

} // namespace

TEST(IntervalScore, HandExamples) {
    const auto inside = interval_score(1, 3, 2, ConfidenceLevel(0.8));
    EXPECT_EQ(inside.total, 2.0);
    EXPECT_EQ(inside.dispersion, 2.0);
    EXPECT_EQ(inside.overprediction, 0.0);
    EXPECT_EQ(inside.underprediction, 0.0);

    const auto over = interval_score(1, 3, 0, ConfidenceLevel(0.8));
    EXPECT_EQ(over.total, 12.0);
    EXPECT_EQ(over.overprediction, 10.0);

    const auto under = interval_score(1, 3, 4.5, ConfidenceLevel(0.5));
    EXPECT_EQ(under.total, 8.0);
    EXPECT_EQ(under.underprediction, 6.0);

    EXPECT_EQ(interval_score(1, 3, 1, ConfidenceLevel(0.8)).total, 2.0);
    EXPECT_EQ(interval_score(1, 3, 3, ConfidenceLevel(0.8)).total, 2.0);
}

TEST(IntervalScore, InvertedIntervalRejected) {
    try {
        interval_score(3, 1, 2, ConfidenceLevel(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::inverted_interval);
    }
}

TEST(WeightedScore, HandExamples) {
    const WisWeights w{LevelSet{}};
    const std::vector<PredictionInterval> both{interval(0.5, -2, 2), interval(0.8, -4, 4)};
    EXPECT_NEAR(weighted_interval_score(both, 0.5, w), 1.8 / 0.35, 1e-12);

    const std::vector<PredictionInterval> zero{interval(0.5, 1, 1, 1), interval(0.8, 1, 1, 1)};
    EXPECT_EQ(weighted_interval_score(zero, 1.0, w), 0.0);

    const WisWeights single{LevelSet(std::vector<double>{0.8})};
    const std::vector<PredictionInterval> one{interval(0.8, 1, 3)};
    EXPECT_DOUBLE_EQ(weighted_interval_score(one, 0.0, single), 12.0);
}

TEST(WeightedScore, ComponentsSumToTotal) {
    const WisWeights w{LevelSet{}};
    const std::vector<PredictionInterval> both{interval(0.5, -1, 1), interval(0.8, -2, 3)};
    for (double y : {-5.0, 0.0, 4.0}) {
        const auto s = weighted_score(both, y, w);
        EXPECT_NEAR(s.dispersion + s.overprediction + s.underprediction, s.total, 1e-12);
    }
}

TEST(WeightedScore, IncompleteLevelSet) {
    const WisWeights w{LevelSet{}};
    const std::vector<PredictionInterval> one{interval(0.5, -1, 1)};
    const std::vector<PredictionInterval> wrong{interval(0.5, -1, 1), interval(0.9, -2, 2)};
    for (const auto* set : {&one, &wrong}) {
        try {
            weighted_interval_score(*set, 0.0, w);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::incomplete_level_set);
        }
    }
}

TEST(Coverage, Examples) {
    std::vector<std::pair<PredictionInterval, double>> pairs;
    for (int i = 0; i < 10; ++i) pairs.push_back({interval(0.5, 0, 1), 0.5});
    EXPECT_EQ(coverage_rate(pairs), 1.0);
    for (int i = 0; i < 10; ++i) pairs[static_cast<std::size_t>(i)].second = i % 2 ? 0.5 : 2.0;
    EXPECT_EQ(coverage_rate(pairs), 0.5);
    pairs.clear();
    EXPECT_THROW(coverage_rate(pairs), Error);
}

TEST(Coverage, GaussianAbsoluteQuantile) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    std::vector<double> abs_errors(2000);
    for (auto& e : abs_errors) e = std::abs(z(rng));
    const double q = empirical_quantile(abs_errors, 0.8, QuantileMethod::linear);
    std::vector<std::pair<PredictionInterval, double>> pairs;
    for (int i = 0; i < 2000; ++i) pairs.push_back({interval(0.8, -q, q), z(rng)});
    EXPECT_NEAR(coverage_rate(pairs), 0.8, 0.05);
}

TEST(Aggregate, MeanOfCell) {
    const std::vector<ScoredForecast> s{scored("USA", Horizon::fall_current, 2.0, 0.0, -1, 1),
                                        scored("USA", Horizon::fall_current, 4.0, 5.0, -1, 1)};
    const std::vector<Grouping> g{Grouping{}};
    const auto rep = aggregate_report(s, g);
    ASSERT_EQ(rep.cells.size(), 1u);
    EXPECT_EQ(rep.cells[0].n, 2u);
    EXPECT_EQ(rep.cells[0].mean_wis.total, 3.0);
    EXPECT_EQ(rep.cells[0].mean_wis.dispersion, 1.5);
    EXPECT_EQ(rep.cells[0].levels[0].coverage, 0.5);
    EXPECT_EQ(rep.cells[0].levels[0].mean_length, 2.0);
}

TEST(Aggregate, PooledCellIsObservationWeightedMean) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<ScoredForecast> s;
    const std::vector<std::string> countries{"CAN", "DEU", "FRA", "GBR", "ITA", "JPN", "USA"};
    for (std::size_t c = 0; c < countries.size(); ++c)
        for (std::size_t i = 0; i <= c; ++i) s.push_back(scored(countries[c], Horizon::fall_next, u(rng), 0, -1, 1));
    Grouping pooled;
    pooled.by_country = false;
    const std::vector<Grouping> g{Grouping{}, pooled, pooled};
    const auto rep = aggregate_report(s, g);
    ASSERT_EQ(rep.cells.size(), 8u);
    double weighted = 0.0;
    std::size_t n = 0;
    const ReportCell* all = nullptr;
    for (const auto& cell : rep.cells) {
        if (cell.key.country == kPooled) {
            all = &cell;
            continue;
        }
        weighted += cell.mean_wis.total * static_cast<double>(cell.n);
        n += cell.n;
    }
    ASSERT_NE(all, nullptr);
    EXPECT_EQ(all->n, n);
    EXPECT_NEAR(all->mean_wis.total, weighted / static_cast<double>(n), 1e-12);
}

TEST(Aggregate, ExclusionEmptiesCellWithWarning) {
    const std::vector<ScoredForecast> s{scored("JPN", Horizon::fall_current, 2.0, 0.0, -1, 1),
                                        scored("USA", Horizon::fall_current, 4.0, 0.0, -1, 1)};
    const std::vector<Grouping> g{Grouping{}};
    const std::vector<Exclusion> ex{{"JPN", 2019, 2021, {}}};
    const auto rep = aggregate_report(s, g, ex);
    ASSERT_EQ(rep.cells.size(), 1u);
    EXPECT_EQ(rep.cells[0].key.country, "USA");
    ASSERT_EQ(rep.warnings.size(), 1u);
    EXPECT_NE(rep.warnings[0].find("JPN"), std::string::npos);
}
