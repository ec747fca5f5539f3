#include "errband/forecast_errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace errband;

namespace {

const TargetId kUsaGdp{"USA", "gdp"};

// Forecasts for every horizon from 1990 to 2024 with error equal to the
// target year's last two digits / 100, signed by parity. Realizations are
// published in both releases after each target year, up to 2024 spring.
ForecastPanel full_panel() {
    ForecastPanel p;
    for (int year = 1990; year <= 2024; ++year) {
        const double truth = 2.0 + 0.01 * (year - 1990);
        for (Horizon h : kHorizons) {
            const Origin o = origin_for(year, h);
            if (o > Origin{2024, Season::spring}) continue;
            const double e = (year % 2 ? 1.0 : -1.0) * (year % 100) / 100.0 * (1 + horizon_rank(h));
            p.add(ForecastRecord{kUsaGdp, o, year, truth - e});
        }
        const Origin spring{year + 1, Season::spring}, fall{year + 1, Season::fall};
        if (spring <= Origin{2024, Season::spring}) p.add(RealizationVintage{kUsaGdp, year, spring, truth + 0.5});
        if (fall <= Origin{2024, Season::spring}) p.add(RealizationVintage{kUsaGdp, year, fall, truth});
    }
    return p;
}

double expected_error(int year, Horizon h) {
    return (year % 2 ? 1.0 : -1.0) * (year % 100) / 100.0 * (1 + horizon_rank(h));
}

} // namespace

TEST(ForecastError, Formula) {
    EXPECT_DOUBLE_EQ(forecast_error(2.0, 3.5, ErrorMethod::absolute), 1.5);
    EXPECT_DOUBLE_EQ(forecast_error(2.0, 3.5, ErrorMethod::directional), -1.5);
    for (double x : {-3.25, 0.0, 7.5}) {
        EXPECT_EQ(forecast_error(x, x, ErrorMethod::absolute), 0.0);
        EXPECT_EQ(forecast_error(x, x, ErrorMethod::directional), 0.0);
    }
    try {
        forecast_error(std::nan(""), 1.0, ErrorMethod::absolute);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_observation);
    }
}

TEST(ErrorSet, FallOriginUsesElevenCompletedYears) {
    const auto panel = full_panel();
    const auto set = build_error_set(panel, TruthRule{}, kUsaGdp, Horizon::fall_current, 2023,
                                     {2023, Season::fall}, 11, ErrorMethod::directional);
    ASSERT_EQ(set.errors.size(), 11u);
    for (int i = 0; i < 11; ++i) {
        const int year = 2012 + i;
        EXPECT_EQ(set.source_years[static_cast<std::size_t>(i)], year);
        EXPECT_NEAR(set.errors[static_cast<std::size_t>(i)], expected_error(year, Horizon::fall_current), 1e-12);
    }
    EXPECT_TRUE(set.skipped_years.empty());
}

TEST(ErrorSet, SpringOriginTakesPrecedingYearFromSpringRelease) {
    const auto panel = full_panel();
    const auto set = build_error_set(panel, TruthRule{}, kUsaGdp, Horizon::spring_next, 2024,
                                     {2023, Season::spring}, 11, ErrorMethod::directional);
    ASSERT_EQ(set.source_years.front(), 2012);
    ASSERT_EQ(set.source_years.back(), 2022);
    // 2022 is scored against its spring 2023 vintage, which sits 0.5 above the fall one.
    EXPECT_NEAR(set.errors.back(), expected_error(2022, Horizon::spring_next) + 0.5, 1e-12);
    EXPECT_NEAR(set.errors[9], expected_error(2021, Horizon::spring_next), 1e-12);
}

TEST(ErrorSet, InsufficientHistoryCarriesCount) {
    const auto panel = full_panel();
    try {
        build_error_set(panel, TruthRule{}, kUsaGdp, Horizon::fall_current, 1995, {1995, Season::fall}, 11,
                        ErrorMethod::absolute);
        FAIL();
    } catch (const InsufficientHistory& e) {
        EXPECT_EQ(e.code(), ErrorCode::insufficient_history);
        EXPECT_EQ(e.found(), 5u);
        EXPECT_EQ(e.required(), 11u);
    }
}

TEST(ErrorSet, AnchorMustMatchHorizon) {
    const auto panel = full_panel();
    EXPECT_THROW(build_error_set(panel, TruthRule{}, kUsaGdp, Horizon::fall_next, 2023, {2023, Season::fall}, 11,
                                 ErrorMethod::absolute),
                 Error);
}

TEST(ErrorSet, MissingYearsAreSkippedAndRecorded) {
    ForecastPanel p;
    for (int year = 2000; year <= 2022; ++year) {
        if (year != 2018) p.add(ForecastRecord{kUsaGdp, {year, Season::fall}, year, 1.0});
        p.add(RealizationVintage{kUsaGdp, year, {year + 1, Season::fall}, 1.0 + year / 1000.0});
    }
    const auto set = build_error_set(p, TruthRule{}, kUsaGdp, Horizon::fall_current, 2023, {2023, Season::fall}, 11,
                                     ErrorMethod::absolute);
    EXPECT_EQ(set.errors.size(), 11u);
    EXPECT_EQ(set.source_years.front(), 2011);
    EXPECT_EQ(set.skipped_years, std::vector<int>{2018});
}

TEST(ErrorSet, AbsoluteIsMagnitudeOfDirectional) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    ForecastPanel p;
    for (int year = 1980; year <= 2022; ++year) {
        const double truth = z(rng);
        for (Horizon h : kHorizons) p.add(ForecastRecord{kUsaGdp, origin_for(year, h), year, truth + z(rng)});
        p.add(RealizationVintage{kUsaGdp, year, {year + 1, Season::spring}, truth + 0.1 * z(rng)});
        p.add(RealizationVintage{kUsaGdp, year, {year + 1, Season::fall}, truth});
    }
    for (Horizon h : kHorizons)
        for (Season s : {Season::spring, Season::fall}) {
            if (season_of(h) != s) continue;
            const Origin o{2022, s};
            const auto a = build_error_set(p, TruthRule{}, kUsaGdp, h, 2022 + offset_years(h), o, 11,
                                           ErrorMethod::absolute);
            const auto d = build_error_set(p, TruthRule{}, kUsaGdp, h, 2022 + offset_years(h), o, 11,
                                           ErrorMethod::directional);
            ASSERT_EQ(a.source_years, d.source_years);
            for (std::size_t i = 0; i < a.errors.size(); ++i) EXPECT_EQ(a.errors[i], std::abs(d.errors[i]));
        }
}
