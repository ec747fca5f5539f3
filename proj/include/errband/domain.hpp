#pragma once

#include "errband/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace errband {

// ---------------------------------------------------------------------------
// Forecast release calendar
// ---------------------------------------------------------------------------

enum class Season { spring, fall };

inline char season_code(Season s) { return s == Season::spring ? 'S' : 'F'; }

inline std::optional<Season> parse_season(std::string_view text) {
    if (text == "S") return Season::spring;
    if (text == "F") return Season::fall;
    return std::nullopt;
}

/// A release date: the spring or fall edition of a given year. Spring
/// precedes fall within a year.
struct Origin {
    int year = 0;
    Season season = Season::spring;

    friend auto operator<=>(const Origin&, const Origin&) = default;

    Origin next() const {
        return season == Season::spring ? Origin{year, Season::fall} : Origin{year + 1, Season::spring};
    }
    Origin previous() const {
        return season == Season::fall ? Origin{year, Season::spring} : Origin{year - 1, Season::fall};
    }
};

inline std::string to_string(const Origin& o) {
    return std::to_string(o.year) + season_code(o.season);
}

enum class YearOffset { current = 0, next = 1 };

/// The four supported forecast horizons, declared in increasing distance to
/// the end of the target year (about 0.25, 0.75, 1.25 and 1.75 years).
enum class Horizon { fall_current = 0, spring_current = 1, fall_next = 2, spring_next = 3 };

inline constexpr std::array<Horizon, 4> kHorizons = {
    Horizon::fall_current, Horizon::spring_current, Horizon::fall_next, Horizon::spring_next};

inline constexpr int horizon_rank(Horizon h) { return static_cast<int>(h); }

inline constexpr bool horizon_before(Horizon a, Horizon b) { return horizon_rank(a) < horizon_rank(b); }

inline constexpr Season season_of(Horizon h) {
    return (h == Horizon::fall_current || h == Horizon::fall_next) ? Season::fall : Season::spring;
}

inline constexpr YearOffset offset_of(Horizon h) {
    return (h == Horizon::fall_current || h == Horizon::spring_current) ? YearOffset::current
                                                                        : YearOffset::next;
}

inline constexpr int offset_years(Horizon h) { return static_cast<int>(offset_of(h)); }

inline constexpr double years_to_target(Horizon h) { return 0.25 + 0.5 * horizon_rank(h); }

inline constexpr Horizon make_horizon(Season s, YearOffset off) {
    if (off == YearOffset::current) return s == Season::fall ? Horizon::fall_current : Horizon::spring_current;
    return s == Season::fall ? Horizon::fall_next : Horizon::spring_next;
}

inline std::string_view to_string(Horizon h) {
    switch (h) {
    case Horizon::fall_current: return "fall-current";
    case Horizon::spring_current: return "spring-current";
    case Horizon::fall_next: return "fall-next";
    case Horizon::spring_next: return "spring-next";
    }
    return "?";
}

inline std::optional<Horizon> parse_horizon(std::string_view text) {
    for (Horizon h : kHorizons)
        if (to_string(h) == text) return h;
    return std::nullopt;
}

/// Horizon of a forecast issued at `origin` for `target_year`.
/// Throws ErrorCode::unsupported_horizon unless the target is the origin's
/// current or next calendar year.
inline Horizon horizon_of(Origin origin, int target_year) {
    if (target_year == origin.year) return make_horizon(origin.season, YearOffset::current);
    if (target_year == origin.year + 1) return make_horizon(origin.season, YearOffset::next);
    throw Error(ErrorCode::unsupported_horizon,
                "target year " + std::to_string(target_year) + " from origin " + to_string(origin));
}

/// Release that issues the forecast for `target_year` at horizon `h`.
inline Origin origin_for(int target_year, Horizon h) {
    return Origin{target_year - offset_years(h), season_of(h)};
}

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

struct TargetId {
    std::string country;
    std::string variable;

    friend auto operator<=>(const TargetId&, const TargetId&) = default;
};

inline std::string to_string(const TargetId& t) { return t.country + "/" + t.variable; }

inline constexpr std::string_view kGdpGrowth = "gdp";
inline constexpr std::string_view kCpiInflation = "cpi";

/// Closed sets of admissible countries and variables.
struct Universe {
    std::set<std::string> countries{"CAN", "DEU", "FRA", "GBR", "ITA", "JPN", "USA"};
    std::set<std::string> variables{std::string(kGdpGrowth), std::string(kCpiInflation)};

    bool contains(const TargetId& t) const {
        return countries.contains(t.country) && variables.contains(t.variable);
    }
};

// ---------------------------------------------------------------------------
// Observations
// ---------------------------------------------------------------------------

/// A point forecast, in percent per year.
struct ForecastRecord {
    TargetId target;
    Origin origin;
    int target_year = 0;
    double value = 0.0;

    Horizon horizon() const { return horizon_of(origin, target_year); }
};

/// One published estimate of a realized annual value.
struct RealizationVintage {
    TargetId target;
    int target_year = 0;
    Origin vintage;
    double value = 0.0;
};

inline void validate(const ForecastRecord& r) {
    if (!std::isfinite(r.value)) throw Error(ErrorCode::invalid_observation, "non-finite forecast value");
    (void)r.horizon();
}

inline void validate(const RealizationVintage& r) {
    if (!std::isfinite(r.value)) throw Error(ErrorCode::invalid_observation, "non-finite realization value");
    if (r.vintage.year < r.target_year)
        throw Error(ErrorCode::invalid_observation,
                    "vintage " + to_string(r.vintage) + " precedes target year " + std::to_string(r.target_year));
}

// ---------------------------------------------------------------------------
// Confidence levels
// ---------------------------------------------------------------------------

/// Nominal coverage probability, strictly inside (0, 1).
class ConfidenceLevel {
public:
    explicit ConfidenceLevel(double tau) : tau_(tau) {
        if (!(tau > 0.0 && tau < 1.0))
            throw Error(ErrorCode::invalid_argument, "confidence level must lie in (0,1)");
        // 1 - 0.8 is 0.19999999999999996 in binary; levels are decimal
        // inputs, so the complement is rounded to 15 significant digits.
        char buf[32];
        const auto printed = std::to_chars(buf, buf + sizeof buf, 1.0 - tau, std::chars_format::general, 15);
        std::from_chars(buf, printed.ptr, alpha_);
    }

    double value() const noexcept { return tau_; }
    /// 1 - tau.
    double alpha() const noexcept { return alpha_; }
    /// Weight of this level in the weighted interval score.
    double wis_weight() const noexcept { return alpha_ / 2.0; }

    friend auto operator<=>(const ConfidenceLevel&, const ConfidenceLevel&) = default;

private:
    double tau_;
    double alpha_ = 0.0;
};

/// Strictly increasing set of confidence levels.
class LevelSet {
public:
    LevelSet() : LevelSet(std::vector<double>{0.5, 0.8}) {}

    explicit LevelSet(const std::vector<double>& taus) {
        if (taus.empty()) throw Error(ErrorCode::invalid_argument, "at least one confidence level required");
        for (double t : taus) {
            ConfidenceLevel level(t);
            if (!levels_.empty() && !(levels_.back() < level))
                throw Error(ErrorCode::invalid_argument, "confidence levels must be strictly increasing");
            levels_.push_back(level);
        }
    }

    std::size_t size() const noexcept { return levels_.size(); }
    const ConfidenceLevel& operator[](std::size_t i) const { return levels_[i]; }
    auto begin() const { return levels_.begin(); }
    auto end() const { return levels_.end(); }

    friend bool operator==(const LevelSet&, const LevelSet&) = default;

private:
    std::vector<ConfidenceLevel> levels_;
};

} // namespace errband
