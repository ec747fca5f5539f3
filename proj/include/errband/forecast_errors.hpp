#pragma once

#include "errband/domain.hpp"
#include "errband/panel.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <string_view>
#include <vector>

namespace errband {

enum class ErrorMethod { absolute, directional };

inline std::string_view to_string(ErrorMethod m) {
    return m == ErrorMethod::absolute ? "absolute" : "directional";
}

inline std::optional<ErrorMethod> parse_error_method(std::string_view text) {
    if (text == "absolute") return ErrorMethod::absolute;
    if (text == "directional") return ErrorMethod::directional;
    return std::nullopt;
}

/// realized - forecast, or its magnitude for the absolute method.
inline double forecast_error(double realized, double forecast, ErrorMethod method) {
    if (!std::isfinite(realized) || !std::isfinite(forecast)) throw Error(ErrorCode::invalid_observation);
    const double e = realized - forecast;
    return method == ErrorMethod::absolute ? std::abs(e) : e;
}

/// Anything that yields the point forecast for (target, target year, horizon).
template <class S>
concept PointSource = requires(const S& s, const TargetId& t, int year, Horizon h) {
    { s.point(t, year, h) } -> std::convertible_to<std::optional<double>>;
};

/// Anything that yields the realized value of a target year as known at a
/// given release.
template <class S>
concept TruthSource = requires(const S& s, const TargetId& t, int year, Origin as_of) {
    { s.truth(t, year, as_of) } -> std::convertible_to<std::optional<double>>;
};

struct PanelPoints {
    const ForecastPanel* panel;

    std::optional<double> point(const TargetId& t, int year, Horizon h) const { return panel->forecast_at(t, year, h); }
};

struct PanelTruths {
    const ForecastPanel* panel;
    TruthRule rule{};
    TruthMode mode = TruthMode::construction;

    std::optional<double> truth(const TargetId& t, int year, Origin as_of) const {
        if (auto v = find_truth(*panel, t, year, as_of, rule, mode)) return v->value;
        return std::nullopt;
    }
};

/// The R most recent past forecast errors at one horizon.
struct ErrorSet {
    TargetId target;
    Horizon horizon = Horizon::fall_current;
    int anchor_year = 0;          ///< target year the intervals are built for
    Origin as_of;                 ///< information cutoff
    ErrorMethod method = ErrorMethod::absolute;
    std::vector<double> errors;   ///< ascending by source year
    std::vector<int> source_years;
    /// Years inside the window skipped for a missing forecast or realization.
    std::vector<int> skipped_years;
};

/// Collects `window` past errors for `target` at horizon `h`.
///
/// A past year is eligible when it has ended before `as_of` and both its
/// horizon-`h` forecast and its realization (as known at `as_of`) exist.
/// Eligible years are taken from the most recent backwards; years with
/// missing data are skipped and recorded so the set keeps its full size.
/// `earliest_year` bounds the search.
template <PointSource P, TruthSource T>
ErrorSet build_error_set(const P& points, const T& truths, const TargetId& target, Horizon h, int anchor_year,
                         Origin as_of, std::size_t window, ErrorMethod method, int earliest_year) {
    if (window == 0) throw Error(ErrorCode::invalid_argument, "window must be positive");
    if (anchor_year != as_of.year + offset_years(h))
        throw Error(ErrorCode::invalid_argument, "anchor year " + std::to_string(anchor_year) +
                                                     " inconsistent with horizon " + std::string(to_string(h)) +
                                                     " as of " + to_string(as_of));
    ErrorSet set{target, h, anchor_year, as_of, method, {}, {}, {}};
    for (int year = as_of.year - 1; year >= earliest_year && set.errors.size() < window; --year) {
        const auto forecast = points.point(target, year, h);
        const auto realized = forecast ? truths.truth(target, year, as_of) : std::nullopt;
        if (!forecast || !realized) {
            set.skipped_years.push_back(year);
            continue;
        }
        set.errors.push_back(forecast_error(*realized, *forecast, method));
        set.source_years.push_back(year);
    }
    if (set.errors.size() < window)
        throw InsufficientHistory(set.errors.size(), window,
                                  to_string(target) + " " + std::string(to_string(h)) + " as of " + to_string(as_of));
    std::reverse(set.errors.begin(), set.errors.end());
    std::reverse(set.source_years.begin(), set.source_years.end());
    std::reverse(set.skipped_years.begin(), set.skipped_years.end());
    return set;
}

inline ErrorSet build_error_set(const ForecastPanel& panel, const TruthRule& rule, const TargetId& target, Horizon h,
                                int anchor_year, Origin as_of, std::size_t window, ErrorMethod method) {
    const auto first = panel.first_target_year(target);
    if (!first) throw InsufficientHistory(0, window, to_string(target) + " has no forecasts");
    return build_error_set(PanelPoints{&panel}, PanelTruths{&panel, rule, TruthMode::construction}, target, h,
                           anchor_year, as_of, window, method, *first);
}

} // namespace errband
