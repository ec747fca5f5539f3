#pragma once

#include "errband/domain.hpp"
#include "errband/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace errband {

/// Interval score split into its three penalties; negatively oriented.
struct ScoreDecomposition {
    double dispersion = 0.0;
    double overprediction = 0.0;
    double underprediction = 0.0;
    double total = 0.0;
};

/// Interval score of [lower, upper] at level tau for outcome y.
inline ScoreDecomposition interval_score(double lower, double upper, double outcome, ConfidenceLevel tau) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !std::isfinite(outcome))
        throw Error(ErrorCode::invalid_observation, "non-finite interval or outcome");
    if (lower > upper) throw Error(ErrorCode::inverted_interval);
    const double penalty = 2.0 / tau.alpha();
    ScoreDecomposition s;
    s.dispersion = upper - lower;
    if (outcome < lower) s.overprediction = penalty * (lower - outcome);
    if (outcome > upper) s.underprediction = penalty * (outcome - upper);
    s.total = s.dispersion + s.overprediction + s.underprediction;
    return s;
}

inline ScoreDecomposition interval_score(const PredictionInterval& pi, double outcome) {
    return interval_score(pi.lower, pi.upper, outcome, pi.level);
}

/// Level weights w_k = (1 - tau_k) / 2, derived from the levels.
class WisWeights {
public:
    explicit WisWeights(LevelSet levels) : levels_(std::move(levels)) {
        for (const auto& l : levels_) {
            weights_.push_back(l.wis_weight());
            total_ += weights_.back();
        }
    }

    const LevelSet& levels() const noexcept { return levels_; }
    double weight(std::size_t k) const { return weights_[k]; }
    double total() const noexcept { return total_; }

private:
    LevelSet levels_;
    std::vector<double> weights_;
    double total_ = 0.0;
};

/// Normalized weighted mean of the per-level interval scores and of each
/// of their components. Intervals must cover exactly the weighted levels.
inline ScoreDecomposition weighted_score(std::span<const PredictionInterval> intervals, double outcome,
                                         const WisWeights& weights) {
    if (intervals.size() != weights.levels().size())
        throw Error(ErrorCode::incomplete_level_set, "expected " + std::to_string(weights.levels().size()) +
                                                         " intervals, got " + std::to_string(intervals.size()));
    ScoreDecomposition acc;
    for (std::size_t k = 0; k < weights.levels().size(); ++k) {
        const auto& level = weights.levels()[k];
        auto it = std::find_if(intervals.begin(), intervals.end(),
                               [&](const PredictionInterval& pi) { return pi.level == level; });
        if (it == intervals.end())
            throw Error(ErrorCode::incomplete_level_set, "missing level " + std::to_string(level.value()));
        const auto s = interval_score(*it, outcome);
        const double w = weights.weight(k);
        acc.dispersion += w * s.dispersion;
        acc.overprediction += w * s.overprediction;
        acc.underprediction += w * s.underprediction;
        acc.total += w * s.total;
    }
    acc.dispersion /= weights.total();
    acc.overprediction /= weights.total();
    acc.underprediction /= weights.total();
    acc.total /= weights.total();
    return acc;
}

/// Weighted interval score without a point-forecast term.
inline double weighted_interval_score(std::span<const PredictionInterval> intervals, double outcome,
                                      const WisWeights& weights) {
    return weighted_score(intervals, outcome, weights).total;
}

/// Fraction of outcomes inside their closed interval.
inline double coverage_rate(std::span<const std::pair<PredictionInterval, double>> pairs) {
    if (pairs.empty()) throw Error(ErrorCode::no_observations);
    std::size_t hits = 0;
    for (const auto& [pi, y] : pairs)
        if (pi.covers(y)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

// ---------------------------------------------------------------------------
// Scored forecasts and aggregation
// ---------------------------------------------------------------------------

struct LevelScore {
    double tau = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    IntervalOffsets raw_offsets;   ///< before cross-horizon pooling
    ScoreDecomposition score;
};

/// One issued forecast scored against its outcome, with its audit trail.
struct ScoredForecast {
    TargetId target;
    std::string method;
    Origin origin;
    int target_year = 0;
    Horizon horizon = Horizon::fall_current;
    double point = 0.0;
    double outcome = 0.0;
    std::vector<LevelScore> levels;
    ScoreDecomposition wis;
    std::vector<int> source_years;
    std::vector<int> skipped_years;
    int block = 0;
    bool pooled = false;
    bool degenerate = false;
    bool excludes_point = false;
};

/// Scores every level of one grid entry.
inline ScoredForecast score_entry(const IntervalGrid& grid, const GridEntry& entry, const ErrorSet& errs,
                                  std::string method, double outcome, const WisWeights& weights) {
    ScoredForecast sf;
    sf.target = grid.target;
    sf.method = std::move(method);
    sf.origin = grid.origin;
    sf.target_year = entry.target_year;
    sf.horizon = entry.horizon;
    sf.point = entry.point.value();
    sf.outcome = outcome;
    sf.source_years = errs.source_years;
    sf.skipped_years = errs.skipped_years;
    sf.block = entry.block;
    for (const auto& other : grid.entries)
        if (&other != &entry && other.block == entry.block) sf.pooled = true;
    std::vector<PredictionInterval> intervals;
    for (std::size_t k = 0; k < grid.levels.size(); ++k) {
        const auto pi = grid.interval(entry, k);
        intervals.push_back(pi);
        sf.degenerate = sf.degenerate || pi.degenerate;
        sf.excludes_point = sf.excludes_point || pi.excludes_point;
        sf.levels.push_back({pi.level.value(), pi.lower, pi.upper, entry.raw[k], interval_score(pi, outcome)});
    }
    sf.wis = weighted_score(intervals, outcome, weights);
    return sf;
}

inline constexpr std::string_view kPooled = "ALL";

struct CellKey {
    std::string country;
    std::string variable;
    std::string horizon;
    std::string method;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Which dimensions a report keeps; dropped dimensions are pooled as "ALL".
struct Grouping {
    bool by_country = true;
    bool by_variable = true;
    bool by_horizon = true;
    bool by_method = true;

    CellKey key_for(const ScoredForecast& s) const {
        return {by_country ? s.target.country : std::string(kPooled),
                by_variable ? s.target.variable : std::string(kPooled),
                by_horizon ? std::string(to_string(s.horizon)) : std::string(kPooled),
                by_method ? s.method : std::string(kPooled)};
    }

    friend bool operator==(const Grouping&, const Grouping&) = default;
};

/// Drops scored forecasts of one country over a range of target years,
/// optionally for a single method only.
struct Exclusion {
    std::string country;
    int first_year = 0;
    int last_year = 0;
    std::string method;  ///< empty: every method

    bool matches(const ScoredForecast& s) const {
        return s.target.country == country && s.target_year >= first_year && s.target_year <= last_year &&
               (method.empty() || method == s.method);
    }
};

struct LevelStats {
    double tau = 0.0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double mean_score = 0.0;
};

struct ReportCell {
    CellKey key;
    std::size_t n = 0;
    ScoreDecomposition mean_wis;   ///< components average to the mean total
    std::vector<LevelStats> levels;
};

struct EvaluationReport {
    std::vector<ReportCell> cells;   ///< sorted by key
    std::vector<std::string> warnings;
};

/// Observation-weighted means per cell for each grouping. Excluded forecasts
/// are dropped; a cell left empty by exclusions is omitted with a warning.
inline EvaluationReport aggregate_report(std::span<const ScoredForecast> scored, std::span<const Grouping> groupings,
                                         std::span<const Exclusion> exclusions = {}) {
    struct Acc {
        std::size_t n = 0;
        ScoreDecomposition wis;
        std::vector<double> tau, hits, length, score;
    };
    std::map<CellKey, Acc> cells;
    std::map<CellKey, std::size_t> seen;

    for (auto gi = groupings.begin(); gi != groupings.end(); ++gi) {
        if (std::find(groupings.begin(), gi, *gi) != gi) continue;
        const auto& g = *gi;
        for (const auto& s : scored) {
            const auto key = g.key_for(s);
            ++seen[key];
            if (std::any_of(exclusions.begin(), exclusions.end(), [&](const Exclusion& e) { return e.matches(s); }))
                continue;
            auto& a = cells[key];
            if (a.n == 0) {
                a.tau.resize(s.levels.size());
                a.hits.assign(s.levels.size(), 0.0);
                a.length.assign(s.levels.size(), 0.0);
                a.score.assign(s.levels.size(), 0.0);
                for (std::size_t k = 0; k < s.levels.size(); ++k) a.tau[k] = s.levels[k].tau;
            } else if (a.tau.size() != s.levels.size()) {
                throw Error(ErrorCode::incomplete_level_set, "scored forecasts disagree on levels");
            }
            ++a.n;
            a.wis.dispersion += s.wis.dispersion;
            a.wis.overprediction += s.wis.overprediction;
            a.wis.underprediction += s.wis.underprediction;
            a.wis.total += s.wis.total;
            for (std::size_t k = 0; k < s.levels.size(); ++k) {
                const auto& l = s.levels[k];
                if (l.lower <= s.outcome && s.outcome <= l.upper) a.hits[k] += 1.0;
                a.length[k] += l.upper - l.lower;
                a.score[k] += l.score.total;
            }
        }
    }

    EvaluationReport report;
    for (const auto& [key, count] : seen) {
        auto it = cells.find(key);
        if (it == cells.end()) {
            report.warnings.push_back("cell " + key.country + "/" + key.variable + "/" + key.horizon + "/" +
                                      key.method + " is empty after exclusions; omitted");
            continue;
        }
        const Acc& a = it->second;
        const double n = static_cast<double>(a.n);
        ReportCell cell{key, a.n, {a.wis.dispersion / n, a.wis.overprediction / n, a.wis.underprediction / n,
                                   a.wis.total / n}, {}};
        for (std::size_t k = 0; k < a.tau.size(); ++k)
            cell.levels.push_back({a.tau[k], a.hits[k] / n, a.length[k] / n, a.score[k] / n});
        report.cells.push_back(std::move(cell));
    }
    return report;
}

} // namespace errband
