#include "errband/benchmark_ar.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace errband;

namespace {

const TargetId kTarget{"USA", "gdp"};

QuarterlySeries recurrence(double a, double b, double x0, Quarter first, int count) {
    QuarterlySeries s(kTarget);
    double x = x0;
    for (int i = 0; i < count; ++i) {
        s.set(Quarter::from_index(first.index() + i), x);
        x = a + b * x;
    }
    return s;
}

// 100 * log of the ratio of annual-average levels, from levels directly.
double exact_annual_growth(const std::vector<double>& levels, int year_index) {
    double cur = 0.0, prev = 0.0;
    for (int q = 0; q < 4; ++q) {
        cur += levels[static_cast<std::size_t>(4 * year_index + q)];
        prev += levels[static_cast<std::size_t>(4 * (year_index - 1) + q)];
    }
    return 100.0 * std::log(cur / prev);
}

} // namespace

TEST(Ar1Fit, NoiselessRecurrenceRecoveredExactly) {
    const auto s = recurrence(1.0, 0.5, 10.0, {1990, 1}, 30);
    const auto fit = fit_ar1(s, {1990 + 29 / 4, 1 + 29 % 4}, Ar1Options{3, FitWindow::expanding, 40});
    EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
    EXPECT_NEAR(fit.slope, 0.5, 1e-12);
    EXPECT_EQ(fit.n_obs, 29u);
    EXPECT_EQ(fit.first, (Quarter{1990, 2}));
}

TEST(Ar1Fit, ZeroSlopeConsistency) {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> z;
    QuarterlySeries s(kTarget);
    for (int i = 0; i < 10000; ++i) s.set(Quarter::from_index(4 * 1000 + i), z(rng));
    const auto last = Quarter::from_index(4 * 1000 + 9999);
    EXPECT_NEAR(fit_ar1(s, last).slope, 0.0, 0.05);
}

TEST(Ar1Fit, Errors) {
    QuarterlySeries constant(kTarget);
    for (int i = 0; i < 40; ++i) constant.set(Quarter::from_index(8000 + i), 2.0);
    try {
        fit_ar1(constant, Quarter::from_index(8039));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::degenerate_regressor);
    }
    const auto short_series = recurrence(1.0, 0.5, 3.0, {2000, 1}, 15);
    try {
        fit_ar1(short_series, {2003, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::insufficient_quarterly_history);
    }
}

TEST(Ar1Fit, WindowStopsAtGap) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z;
    QuarterlySeries s(kTarget);
    for (int i = 0; i < 80; ++i)
        if (i != 30) s.set(Quarter::from_index(8000 + i), z(rng));
    const auto fit = fit_ar1(s, Quarter::from_index(8079));
    EXPECT_EQ(fit.first, Quarter::from_index(8032));
    EXPECT_EQ(fit.n_obs, 48u);
    ASSERT_EQ(s.gaps().size(), 1u);
}

TEST(Ar1Fit, RollingWindowLength) {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> z;
    QuarterlySeries s(kTarget);
    for (int i = 0; i < 100; ++i) s.set(Quarter::from_index(8000 + i), z(rng));
    const auto fit = fit_ar1(s, Quarter::from_index(8099), Ar1Options{20, FitWindow::rolling, 40});
    EXPECT_EQ(fit.n_obs, 40u);
    EXPECT_EQ(fit.first, Quarter::from_index(8060));
}

TEST(Ar1Path, Examples) {
    EXPECT_EQ(forecast_ar1_path({0, 1, {}, {}, 0}, 3, 4), (std::vector<double>{3, 3, 3, 3}));
    EXPECT_EQ(forecast_ar1_path({2, 0, {}, {}, 0}, -7, 3), (std::vector<double>{2, 2, 2}));
    EXPECT_EQ(forecast_ar1_path({1, 0.5, {}, {}, 0}, 4, 3), (std::vector<double>{3, 2.5, 2.25}));
}

TEST(Aggregation, Identities) {
    for (double g : {0.0, 0.5, -1.25, 2.0}) {
        const std::vector<double> constant(7, g);
        EXPECT_EQ(aggregate_annual(constant), 4 * g);
    }
    EXPECT_EQ(aggregate_annual(std::vector<double>{0, 0, 0, 1.7, 0, 0, 0}), 1.7);
    try {
        aggregate_annual(std::vector<double>(6, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::expected_seven_quarters);
    }
}

TEST(Aggregation, CloseToExactAnnualAverageGrowth) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> g(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> growth(8), levels(8);
        double level = 100.0;
        for (std::size_t q = 0; q < 8; ++q) {
            growth[q] = g(rng);
            level *= std::exp(growth[q] / 100.0);
            levels[q] = level;
        }
        const double approx = aggregate_annual(std::span<const double>(growth).subspan(1, 7));
        worst = std::max(worst, std::abs(approx - exact_annual_growth(levels, 1)));
    }
    EXPECT_LT(worst, 0.05);
}

TEST(Benchmark, FallCurrentMixesSixObservedQuartersWithOneForecast) {
    // Noise-free AR(1) data: the benchmark must equal the aggregate of the
    // exact continuation, whichever quarters are observed.
    const auto s = recurrence(1.0, 0.5, 0.0, {2000, 1}, 4 * 23 + 3);  // through 2022Q3
    const double observed = benchmark_forecast(s, {2022, Season::fall}, Horizon::fall_current);
    const auto full = recurrence(1.0, 0.5, 0.0, {2000, 1}, 4 * 24);
    std::vector<double> window;
    for (int j = 0; j < 7; ++j) window.push_back(*full.at(Quarter::from_index(annual_window_start(2022).index() + j)));
    EXPECT_NEAR(observed, aggregate_annual(window), 1e-12);
}

TEST(Benchmark, WindowBookkeeping) {
    // A series whose last observed quarter is replaced by a marker reveals
    // which quarters are read and which are forecast.
    std::mt19937_64 rng(43);
    std::normal_distribution<double> z;
    QuarterlySeries s(kTarget);
    for (int i = 0; i < 4 * 30; ++i) s.set(Quarter::from_index(4 * 1995 + i), 0.5 * z(rng));
    for (Horizon h : kHorizons) {
        const Origin o{2020, season_of(h)};
        const auto cutoff = data_cutoff(o);
        const auto fit = fit_ar1(s, cutoff);
        EXPECT_EQ(fit.last, cutoff);
        const int start = annual_window_start(2020 + offset_years(h)).index();
        const auto path = forecast_ar1_path(fit, *s.at(cutoff), static_cast<std::size_t>(start + 6 - cutoff.index()));
        std::vector<double> window;
        int observed = 0;
        for (int i = start; i <= start + 6; ++i) {
            if (i <= cutoff.index()) {
                window.push_back(*s.at(Quarter::from_index(i)));
                ++observed;
            } else {
                window.push_back(path[static_cast<std::size_t>(i - cutoff.index() - 1)]);
            }
        }
        const int expected_observed = h == Horizon::fall_current ? 6 : h == Horizon::spring_current ? 4
                                      : h == Horizon::fall_next   ? 2 : 0;
        EXPECT_EQ(observed, expected_observed) << to_string(h);
        EXPECT_DOUBLE_EQ(benchmark_forecast(s, o, h), aggregate_annual(window));
    }
    EXPECT_THROW(benchmark_forecast(s, {2020, Season::spring}, Horizon::fall_current), Error);
}

TEST(Benchmark, Deterministic) {
    const auto s = recurrence(0.3, 0.6, 1.0, {1990, 1}, 140);
    EXPECT_EQ(benchmark_forecast(s, {2020, Season::spring}, Horizon::spring_next),
              benchmark_forecast(s, {2020, Season::spring}, Horizon::spring_next));
}
