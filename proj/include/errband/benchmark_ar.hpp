#pragma once

#include "errband/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace errband {

struct Quarter {
    int year = 0;
    int quarter = 1;  ///< 1..4

    int index() const { return year * 4 + (quarter - 1); }
    static Quarter from_index(int i) {
        const int y = i >= 0 ? i / 4 : -((-i + 3) / 4);
        return {y, i - y * 4 + 1};
    }
    friend auto operator<=>(const Quarter& a, const Quarter& b) { return a.index() <=> b.index(); }
    friend bool operator==(const Quarter& a, const Quarter& b) { return a.index() == b.index(); }
};

inline std::string to_string(const Quarter& q) { return std::to_string(q.year) + "Q" + std::to_string(q.quarter); }

/// Last quarter of data available to a benchmark issued at `origin`:
/// Q1 for spring releases, Q3 for fall releases.
inline Quarter data_cutoff(Origin origin) { return {origin.year, origin.season == Season::spring ? 1 : 3}; }

/// Quarterly growth rates of one target, in percent per quarter.
class QuarterlySeries {
public:
    TargetId target;

    QuarterlySeries() = default;
    explicit QuarterlySeries(TargetId t) : target(std::move(t)) {}

    void set(Quarter q, double value) {
        if (!std::isfinite(value)) throw Error(ErrorCode::invalid_observation, "non-finite quarterly value");
        values_[q.index()] = value;
    }

    std::optional<double> at(Quarter q) const {
        auto it = values_.find(q.index());
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    bool empty() const noexcept { return values_.empty(); }
    std::size_t size() const noexcept { return values_.size(); }
    Quarter first() const { return Quarter::from_index(values_.begin()->first); }
    Quarter last() const { return Quarter::from_index(values_.rbegin()->first); }

    /// Observations in chronological order.
    std::vector<std::pair<Quarter, double>> observations() const {
        std::vector<std::pair<Quarter, double>> out;
        for (const auto& [i, v] : values_) out.emplace_back(Quarter::from_index(i), v);
        return out;
    }

    /// Maximal runs of missing quarters strictly between first() and last().
    std::vector<std::pair<Quarter, Quarter>> gaps() const {
        std::vector<std::pair<Quarter, Quarter>> out;
        int prev = 0;
        bool started = false;
        for (const auto& [i, v] : values_) {
            if (started && i > prev + 1) out.emplace_back(Quarter::from_index(prev + 1), Quarter::from_index(i - 1));
            prev = i;
            started = true;
        }
        return out;
    }

private:
    std::map<int, double> values_;
};

enum class FitWindow { expanding, rolling };

struct Ar1Options {
    std::size_t min_observations = 20;  ///< regression pairs
    FitWindow window = FitWindow::expanding;
    std::size_t rolling_length = 40;    ///< regression pairs for rolling fits
};

struct Ar1Fit {
    double intercept = 0.0;
    double slope = 0.0;
    Quarter first;   ///< first regressand quarter
    Quarter last;
    std::size_t n_obs = 0;
};

/// OLS of x[i] on (1, x[i-1]) for a contiguous sequence.
inline std::pair<double, double> ols_ar1(std::span<const double> x) {
    if (x.size() < 3) throw Error(ErrorCode::insufficient_quarterly_history, "need at least two regression pairs");
    const std::size_t n = x.size() - 1;
    double mean_lag = 0.0, mean_cur = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_lag += x[i];
        mean_cur += x[i + 1];
    }
    mean_lag /= static_cast<double>(n);
    mean_cur /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_lag;
        sxx += dx * dx;
        sxy += dx * (x[i + 1] - mean_cur);
        sq += x[i] * x[i];
    }
    if (!(sxx > 1e-12 * sq) || sxx == 0.0) throw Error(ErrorCode::degenerate_regressor);
    const double slope = sxy / sxx;
    return {mean_cur - slope * mean_lag, slope};
}

/// Fits the AR(1) on the contiguous run of observations ending at
/// `last_usable`; fit windows never span a gap.
inline Ar1Fit fit_ar1(const QuarterlySeries& series, Quarter last_usable, const Ar1Options& options = {}) {
    if (!series.at(last_usable))
        throw Error(ErrorCode::insufficient_quarterly_history,
                    to_string(series.target) + " has no observation for " + to_string(last_usable));
    std::vector<double> run;
    int i = last_usable.index();
    const std::size_t cap =
        options.window == FitWindow::rolling ? options.rolling_length + 1 : std::numeric_limits<std::size_t>::max();
    while (run.size() < cap) {
        const auto v = series.at(Quarter::from_index(i));
        if (!v) break;
        run.push_back(*v);
        --i;
    }
    std::reverse(run.begin(), run.end());
    const std::size_t pairs = run.size() - 1;
    if (run.size() < 2 || pairs < options.min_observations)
        throw Error(ErrorCode::insufficient_quarterly_history,
                    to_string(series.target) + ": " + std::to_string(run.empty() ? 0 : pairs) +
                        " usable pairs up to " + to_string(last_usable));
    const auto [a, b] = ols_ar1(run);
    return {a, b, Quarter::from_index(last_usable.index() - static_cast<int>(pairs) + 1), last_usable, pairs};
}

/// Iterated conditional means f1 = a + b*last, f(k+1) = a + b*f(k).
inline std::vector<double> forecast_ar1_path(const Ar1Fit& fit, double last_value, std::size_t steps) {
    std::vector<double> path;
    path.reserve(steps);
    double x = last_value;
    for (std::size_t k = 0; k < steps; ++k) {
        x = fit.intercept + fit.slope * x;
        path.push_back(x);
    }
    return path;
}

/// Chronological weights of Q2(t-1)..Q4(t) mapping quarterly growth rates
/// to growth of the annual average.
inline constexpr std::array<double, 7> kAnnualWeights = {0.25, 0.5, 0.75, 1.0, 0.75, 0.5, 0.25};

inline double aggregate_annual(std::span<const double> quarterly_growth) {
    if (quarterly_growth.size() != kAnnualWeights.size())
        throw Error(ErrorCode::expected_seven_quarters, "got " + std::to_string(quarterly_growth.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < kAnnualWeights.size(); ++j) sum += kAnnualWeights[j] * quarterly_growth[j];
    return sum;
}

/// First quarter of the aggregation window of `target_year`.
inline Quarter annual_window_start(int target_year) { return {target_year - 1, 2}; }

/// Annual point forecast for the target year implied by `origin` and `h`:
/// observed quarters up to the data cutoff, AR(1) path forecasts after it.
inline double benchmark_forecast(const QuarterlySeries& series, Origin origin, Horizon h,
                                 const Ar1Options& options = {}) {
    if (season_of(h) != origin.season)
        throw Error(ErrorCode::unsupported_horizon,
                    std::string(to_string(h)) + " is not issued at " + to_string(origin));
    const int target_year = origin.year + offset_years(h);
    const Quarter cutoff = data_cutoff(origin);
    const Ar1Fit fit = fit_ar1(series, cutoff, options);
    const int start = annual_window_start(target_year).index();
    const int end = start + 6;
    const auto steps = static_cast<std::size_t>(std::max(0, end - cutoff.index()));
    const auto path = forecast_ar1_path(fit, *series.at(cutoff), steps);

    std::array<double, 7> window{};
    for (int i = start; i <= end; ++i) {
        if (i <= cutoff.index()) {
            const auto v = series.at(Quarter::from_index(i));
            if (!v)
                throw Error(ErrorCode::insufficient_quarterly_history,
                            to_string(series.target) + " missing " + to_string(Quarter::from_index(i)));
            window[static_cast<std::size_t>(i - start)] = *v;
        } else {
            window[static_cast<std::size_t>(i - start)] = path[static_cast<std::size_t>(i - cutoff.index() - 1)];
        }
    }
    return aggregate_annual(window);
}

using QuarterlyCollection = std::map<TargetId, QuarterlySeries>;

/// Point source backed by AR(1) benchmark forecasts.
struct ArPoints {
    const QuarterlyCollection* series;
    Ar1Options options{};

    std::optional<double> point(const TargetId& t, int year, Horizon h) const {
        auto it = series->find(t);
        if (it == series->end()) return std::nullopt;
        try {
            return benchmark_forecast(it->second, origin_for(year, h), h, options);
        } catch (const Error&) {
            return std::nullopt;
        }
    }
};

/// Truth source computing annual values from the quarterly series; a year
/// is known once its fourth quarter is inside the release's data cutoff.
struct QuarterlyTruths {
    const QuarterlyCollection* series;

    std::optional<double> truth(const TargetId& t, int year, Origin as_of) const {
        auto it = series->find(t);
        if (it == series->end()) return std::nullopt;
        if (data_cutoff(as_of) < Quarter{year, 4}) return std::nullopt;
        std::array<double, 7> window{};
        const int start = annual_window_start(year).index();
        for (int j = 0; j < 7; ++j) {
            const auto v = it->second.at(Quarter::from_index(start + j));
            if (!v) return std::nullopt;
            window[static_cast<std::size_t>(j)] = *v;
        }
        return aggregate_annual(window);
    }
};

} // namespace errband
