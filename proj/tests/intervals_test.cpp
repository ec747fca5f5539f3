#include "errband/intervals.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace errband;

namespace {

ErrorSet errors_of(std::vector<double> values, ErrorMethod m) {
    ErrorSet s;
    s.method = m;
    s.errors = std::move(values);
    return s;
}

std::vector<double> tenths() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1}; }

IntervalGrid grid_of(const std::vector<std::vector<double>>& uppers_by_level) {
    std::vector<double> taus;
    for (std::size_t k = 0; k < uppers_by_level.size(); ++k) taus.push_back(0.5 + 0.1 * static_cast<double>(k));
    IntervalGrid g{{"USA", "gdp"}, {2020, Season::fall}, LevelSet(taus), {}, 0};
    const std::size_t horizons = uppers_by_level.front().size();
    for (std::size_t i = 0; i < horizons; ++i) {
        GridEntry e;
        e.horizon = kHorizons[i];
        e.target_year = 2020 + offset_years(e.horizon);
        e.point = 0.0;
        for (const auto& level : uppers_by_level) e.offsets.push_back({-level[i], level[i]});
        e.raw = e.offsets;
        g.entries.push_back(e);
    }
    return g;
}

std::vector<double> uppers(const IntervalGrid& g, std::size_t level) {
    std::vector<double> out;
    for (const auto& e : g.entries) out.push_back(e.offsets[level].upper);
    return out;
}

// Classical stack-based isotonic regression with unit weights.
std::vector<double> isotonic_oracle(const std::vector<double>& y) {
    std::vector<std::pair<double, int>> stack;  // (sum, count)
    for (double v : y) {
        stack.push_back({v, 1});
        while (stack.size() > 1) {
            auto& b = stack[stack.size() - 1];
            auto& a = stack[stack.size() - 2];
            if (a.first / a.second <= b.first / b.second) break;
            a.first += b.first;
            a.second += b.second;
            stack.pop_back();
        }
    }
    std::vector<double> out;
    for (const auto& [sum, count] : stack)
        for (int i = 0; i < count; ++i) out.push_back(sum / count);
    return out;
}

} // namespace

TEST(IntervalAbsolute, Examples) {
    const auto pi = interval_absolute(2.0, errors_of(tenths(), ErrorMethod::absolute), ConfidenceLevel(0.8),
                                      QuantileMethod::linear);
    EXPECT_NEAR(pi.lower, 1.1, 1e-12);
    EXPECT_NEAR(pi.upper, 2.9, 1e-12);
    EXPECT_FALSE(pi.degenerate);
    EXPECT_FALSE(pi.excludes_point);

    const auto zero = interval_absolute(2.0, errors_of(std::vector<double>(11, 0.0), ErrorMethod::absolute),
                                        ConfidenceLevel(0.8), QuantileMethod::linear);
    EXPECT_EQ(zero.lower, 2.0);
    EXPECT_EQ(zero.upper, 2.0);
    EXPECT_TRUE(zero.degenerate);

    const auto med = interval_absolute(-1.0, errors_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, ErrorMethod::absolute),
                                       ConfidenceLevel(0.5), QuantileMethod::linear);
    EXPECT_EQ(med.lower, -7.0);
    EXPECT_EQ(med.upper, 5.0);
}

TEST(IntervalDirectional, Examples) {
    std::vector<double> negative;
    for (int i = 11; i >= 1; --i) negative.push_back(-0.1 * i);
    const auto pi = interval_directional(0.0, errors_of(negative, ErrorMethod::directional), ConfidenceLevel(0.5),
                                         QuantileMethod::linear);
    EXPECT_NEAR(pi.lower, -0.85, 1e-12);
    EXPECT_NEAR(pi.upper, -0.35, 1e-12);
    EXPECT_TRUE(pi.excludes_point);

    const auto sym = interval_directional(2.0, errors_of({-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5},
                                                          ErrorMethod::directional),
                                          ConfidenceLevel(0.8), QuantileMethod::linear);
    EXPECT_EQ(sym.lower, -2.0);
    EXPECT_EQ(sym.upper, 6.0);

    const auto zero = interval_directional(1.5, errors_of(std::vector<double>(11, 0.0), ErrorMethod::directional),
                                           ConfidenceLevel(0.5), QuantileMethod::linear);
    EXPECT_EQ(zero.lower, 1.5);
    EXPECT_EQ(zero.upper, 1.5);
    EXPECT_TRUE(zero.degenerate);
}

TEST(Intervals, MethodMismatch) {
    try {
        interval_absolute(0.0, errors_of(tenths(), ErrorMethod::directional), ConfidenceLevel(0.5),
                          QuantileMethod::linear);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::method_mismatch);
    }
    EXPECT_THROW(interval_directional(0.0, errors_of(tenths(), ErrorMethod::absolute), ConfidenceLevel(0.5),
                                      QuantileMethod::linear),
                 Error);
}

TEST(Intervals, AbsoluteIntervalsNestAcrossLevels) {
    const auto off = level_offsets(errors_of(tenths(), ErrorMethod::absolute), LevelSet{}, QuantileMethod::linear);
    ASSERT_EQ(off.size(), 2u);
    EXPECT_LE(off[0].upper, off[1].upper);
    EXPECT_GE(off[0].lower, off[1].lower);
}

TEST(Pava, SingleLevelMerge) {
    const auto out = enforce_horizon_monotonicity(grid_of({{2, 5, 4}}));
    EXPECT_EQ(uppers(out, 0), (std::vector<double>{2, 4.5, 4.5}));
    EXPECT_EQ(out.entries[1].block, out.entries[2].block);
    EXPECT_NE(out.entries[0].block, out.entries[1].block);
    EXPECT_EQ(out.merges, 1);
}

TEST(Pava, MergeAppliesToAllLevels) {
    const auto out = enforce_horizon_monotonicity(grid_of({{2, 5, 4}, {3, 6, 7}}));
    EXPECT_EQ(uppers(out, 0), (std::vector<double>{2, 4.5, 4.5}));
    EXPECT_EQ(uppers(out, 1), (std::vector<double>{3, 6.5, 6.5}));
    EXPECT_EQ(out.entries[1].offsets[1].lower, -6.5);
}

TEST(Pava, MonotoneGridUnchanged) {
    const auto in = grid_of({{1, 2, 2, 3}, {2, 3, 4, 5}});
    const auto out = enforce_horizon_monotonicity(in);
    EXPECT_EQ(out.merges, 0);
    for (std::size_t i = 0; i < in.entries.size(); ++i) EXPECT_EQ(out.entries[i].offsets, in.entries[i].offsets);
}

TEST(Pava, AsymmetricGridChecksLowerOffsets) {
    auto g = grid_of({{1, 2}});
    g.entries[0].offsets[0] = {-3.0, 1.0};  // lower offset wider at the short horizon
    g.entries[1].offsets[0] = {-1.0, 2.0};
    const auto out = enforce_horizon_monotonicity(g);
    EXPECT_EQ(out.merges, 1);
    EXPECT_EQ(out.entries[0].offsets[0], (IntervalOffsets{-2.0, 1.5}));
}

TEST(Pava, SingleLevelMatchesStackIsotonicRegression) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> y(4);
        for (auto& v : y) v = u(rng);
        const auto out = enforce_horizon_monotonicity(grid_of({y}));
        const auto expect = isotonic_oracle(y);
        const auto got = uppers(out, 0);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], expect[i], 1e-12);
    }
}

TEST(Pava, Idempotent) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(4), b(4);
        for (std::size_t i = 0; i < 4; ++i) {
            a[i] = u(rng);
            b[i] = a[i] + u(rng);
        }
        const auto once = enforce_horizon_monotonicity(grid_of({a, b}));
        auto again = enforce_horizon_monotonicity(once);
        EXPECT_EQ(again.merges, once.merges);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(again.entries[i].offsets, once.entries[i].offsets);
    }
}
