#pragma once

#include "errband/domain.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace errband {

struct Provenance {
    std::string source;
    std::string ingested_at;
};

/// Long-format store of point forecasts and realization vintages.
/// Keys are unique; insertion of an existing key throws duplicate_record.
class ForecastPanel {
public:
    using ForecastKey = std::tuple<TargetId, Origin, int>;       // target, origin, target year
    using RealizationKey = std::tuple<TargetId, int, Origin>;    // target, target year, vintage

    Provenance provenance;

    void add(const ForecastRecord& r) {
        validate(r);
        auto [it, inserted] = forecasts_.emplace(ForecastKey{r.target, r.origin, r.target_year}, r.value);
        if (!inserted)
            throw Error(ErrorCode::duplicate_record, to_string(r.target) + " forecast " + to_string(r.origin) +
                                                         " for " + std::to_string(r.target_year));
    }

    void add(const RealizationVintage& r) {
        validate(r);
        auto [it, inserted] = realizations_.emplace(RealizationKey{r.target, r.target_year, r.vintage}, r.value);
        if (!inserted)
            throw Error(ErrorCode::duplicate_record, to_string(r.target) + " realization of " +
                                                         std::to_string(r.target_year) + " in " +
                                                         to_string(r.vintage));
    }

    bool contains(const ForecastKey& k) const { return forecasts_.contains(k); }
    bool contains(const RealizationKey& k) const { return realizations_.contains(k); }

    std::optional<double> forecast(const TargetId& t, Origin origin, int target_year) const {
        auto it = forecasts_.find({t, origin, target_year});
        if (it == forecasts_.end()) return std::nullopt;
        return it->second;
    }

    /// Forecast for `target_year` issued at horizon `h`.
    std::optional<double> forecast_at(const TargetId& t, int target_year, Horizon h) const {
        return forecast(t, origin_for(target_year, h), target_year);
    }

    std::optional<double> realization(const TargetId& t, int target_year, Origin vintage) const {
        auto it = realizations_.find({t, target_year, vintage});
        if (it == realizations_.end()) return std::nullopt;
        return it->second;
    }

    /// All vintages of one realization, oldest first.
    std::vector<std::pair<Origin, double>> vintages(const TargetId& t, int target_year) const {
        std::vector<std::pair<Origin, double>> out;
        auto it = realizations_.lower_bound({t, target_year, Origin{-1000000, Season::spring}});
        for (; it != realizations_.end(); ++it) {
            const auto& [tt, year, vintage] = it->first;
            if (tt != t || year != target_year) break;
            out.emplace_back(vintage, it->second);
        }
        return out;
    }

    std::set<TargetId> targets() const {
        std::set<TargetId> out;
        for (const auto& [k, v] : forecasts_) out.insert(std::get<0>(k));
        return out;
    }

    /// Earliest target year with any forecast for `t`.
    std::optional<int> first_target_year(const TargetId& t) const {
        std::optional<int> first;
        for (const auto& [k, v] : forecasts_)
            if (std::get<0>(k) == t && (!first || std::get<2>(k) < *first)) first = std::get<2>(k);
        return first;
    }

    std::optional<Origin> latest_vintage() const {
        std::optional<Origin> latest;
        for (const auto& [k, v] : realizations_)
            if (!latest || *latest < std::get<2>(k)) latest = std::get<2>(k);
        return latest;
    }

    std::optional<Origin> latest_origin() const {
        std::optional<Origin> latest;
        for (const auto& [k, v] : forecasts_)
            if (!latest || *latest < std::get<1>(k)) latest = std::get<1>(k);
        return latest;
    }

    std::vector<ForecastRecord> forecast_records() const {
        std::vector<ForecastRecord> out;
        out.reserve(forecasts_.size());
        for (const auto& [k, v] : forecasts_) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), v});
        return out;
    }

    std::vector<RealizationVintage> realization_records() const {
        std::vector<RealizationVintage> out;
        out.reserve(realizations_.size());
        for (const auto& [k, v] : realizations_) out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), v});
        return out;
    }

    std::size_t forecast_count() const noexcept { return forecasts_.size(); }
    std::size_t realization_count() const noexcept { return realizations_.size(); }

    /// View holding only forecasts and realizations of target years in
    /// [first, last]. Used to keep tuning blind to hold-out outcomes.
    ForecastPanel restricted_to_targets(int first, int last) const {
        ForecastPanel out;
        out.provenance = provenance;
        for (const auto& [k, v] : forecasts_)
            if (std::get<2>(k) >= first && std::get<2>(k) <= last) out.forecasts_.emplace(k, v);
        for (const auto& [k, v] : realizations_)
            if (std::get<1>(k) >= first && std::get<1>(k) <= last) out.realizations_.emplace(k, v);
        return out;
    }

private:
    std::map<ForecastKey, double> forecasts_;
    std::map<RealizationKey, double> realizations_;
};

// ---------------------------------------------------------------------------
// Truth-value selection
// ---------------------------------------------------------------------------

enum class TruthMode {
    evaluation,    ///< scoring issued intervals
    construction,  ///< computing past errors when building intervals
};

enum class EvaluationRule { first_fall_release_after_target_year };
enum class ConstructionRule { fall_release_else_spring_for_preceding_year };
enum class TruthFallback { latest_available_release, none };

struct TruthRule {
    EvaluationRule evaluation = EvaluationRule::first_fall_release_after_target_year;
    ConstructionRule construction = ConstructionRule::fall_release_else_spring_for_preceding_year;
    TruthFallback fallback = TruthFallback::latest_available_release;
};

struct TruthValue {
    double value = 0.0;
    Origin vintage;
};

/// Realized value of `target_year` as known at `as_of`, or nullopt when no
/// admissible vintage exists. Never returns a vintage published after as_of.
inline std::optional<TruthValue> find_truth(const ForecastPanel& panel, const TargetId& target, int target_year,
                                            Origin as_of, const TruthRule& rule, TruthMode mode) {
    const Origin fall_after{target_year + 1, Season::fall};
    if (fall_after <= as_of)
        if (auto v = panel.realization(target, target_year, fall_after)) return TruthValue{*v, fall_after};

    if (mode == TruthMode::construction && target_year == as_of.year - 1) {
        const Origin spring_after{target_year + 1, Season::spring};
        if (spring_after <= as_of)
            if (auto v = panel.realization(target, target_year, spring_after)) return TruthValue{*v, spring_after};
    }

    if (rule.fallback == TruthFallback::latest_available_release) {
        std::optional<TruthValue> latest;
        for (const auto& [vintage, value] : panel.vintages(target, target_year))
            if (vintage <= as_of) latest = TruthValue{value, vintage};
        return latest;
    }
    return std::nullopt;
}

inline double select_truth(const ForecastPanel& panel, const TargetId& target, int target_year, Origin as_of,
                           const TruthRule& rule, TruthMode mode) {
    if (auto t = find_truth(panel, target, target_year, as_of, rule, mode)) return t->value;
    throw Error(ErrorCode::truth_unavailable,
                to_string(target) + " " + std::to_string(target_year) + " as of " + to_string(as_of));
}

} // namespace errband
