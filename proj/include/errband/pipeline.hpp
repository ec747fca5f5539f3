#pragma once

#include "errband/benchmark_ar.hpp"
#include "errband/config.hpp"
#include "errband/forecast_errors.hpp"
#include "errband/ingest.hpp"
#include "errband/intervals.hpp"
#include "errband/report_io.hpp"
#include "errband/scoring.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace errband {

// ---------------------------------------------------------------------------
// Grid construction
// ---------------------------------------------------------------------------

struct GridParams {
    LevelSet levels;
    std::size_t window = 11;
    ErrorMethod error_method = ErrorMethod::absolute;
    QuantileMethod quantile_method = QuantileMethod::linear;
};

struct GridBuild {
    IntervalGrid grid;
    std::map<Horizon, ErrorSet> error_sets;
    std::vector<Gap> gaps;
};

/// Offsets for all four horizons from the information available at
/// `origin`, pooled across horizons. Points are attached for horizons whose
/// issuing release is not later than `origin`.
template <PointSource P, TruthSource T>
GridBuild build_grid(const P& points, const T& truths, const TargetId& target, Origin origin, const GridParams& params,
                     int earliest_year, const std::string& method) {
    GridBuild out;
    out.grid.target = target;
    out.grid.origin = origin;
    out.grid.levels = params.levels;
    for (Horizon h : kHorizons) {
        const int year = origin.year + offset_years(h);
        try {
            auto errs = build_error_set(points, truths, target, h, year, origin, params.window, params.error_method,
                                        earliest_year);
            GridEntry e;
            e.horizon = h;
            e.target_year = year;
            if (origin_for(year, h) <= origin) e.point = points.point(target, year, h);
            e.raw = level_offsets(errs, params.levels, params.quantile_method);
            e.offsets = e.raw;
            out.grid.entries.push_back(std::move(e));
            out.error_sets.emplace(h, std::move(errs));
        } catch (const InsufficientHistory& ex) {
            out.gaps.push_back({target, method, origin, h, ex.what()});
        }
    }
    out.grid = enforce_horizon_monotonicity(std::move(out.grid));
    return out;
}

// ---------------------------------------------------------------------------
// Data bundle and per-method sources
// ---------------------------------------------------------------------------

/// Everything a run reads, loaded once.
struct RunData {
    ForecastPanel panel;
    QuarterlyCollection quarterly;
    std::map<std::string, ForecastPanel> external;  ///< by method label
};

inline RunData load_run_data(const RunConfig& cfg) {
    RunData data;
    auto open = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::io, "cannot open " + path);
        return in;
    };
    {
        auto in = open(cfg.data_path);
        auto parsed = parse_forecast_panel(in, cfg.universe, cfg.data_path);
        if (!parsed.report.rejected.empty())
            throw Error(ErrorCode::schema_mismatch, cfg.data_path + ": " + parsed.report.rejected.front());
        data.panel = std::move(parsed.panel);
    }
    if (!cfg.quarterly_path.empty()) {
        auto in = open(cfg.quarterly_path);
        auto parsed = parse_quarterly(in, cfg.universe);
        if (!parsed.rejected.empty())
            throw Error(ErrorCode::schema_mismatch, cfg.quarterly_path + ": " + parsed.rejected.front());
        data.quarterly = std::move(parsed.series);
    }
    for (const auto& m : cfg.methods)
        if (m.kind == MethodKind::external) {
            auto in = open(m.path);
            auto parsed = parse_forecast_panel(in, cfg.universe, m.path);
            if (!parsed.report.rejected.empty())
                throw Error(ErrorCode::schema_mismatch, m.path + ": " + parsed.report.rejected.front());
            data.external.emplace(m.label, std::move(parsed.panel));
        }
    return data;
}

/// Calls `fn(points, truths, earliest_year)` with the sources of `method`
/// for one target. Returns false when the method has no data for it.
template <class Fn>
bool with_sources(const RunData& data, const RunConfig& cfg, const MethodSpec& method, const TargetId& target,
                  Fn&& fn) {
    switch (method.kind) {
    case MethodKind::imf: {
        const auto first = data.panel.first_target_year(target);
        if (!first) return false;
        fn(PanelPoints{&data.panel}, PanelTruths{&data.panel, cfg.truth_rule, TruthMode::construction}, *first);
        return true;
    }
    case MethodKind::ar: {
        auto it = data.quarterly.find(target);
        if (it == data.quarterly.end() || it->second.empty()) return false;
        fn(ArPoints{&data.quarterly, cfg.ar}, QuarterlyTruths{&data.quarterly}, it->second.first().year);
        return true;
    }
    case MethodKind::external: {
        auto it = data.external.find(method.label);
        if (it == data.external.end()) return false;
        const auto first = it->second.first_target_year(target);
        if (!first) return false;
        fn(PanelPoints{&it->second}, PanelTruths{&data.panel, cfg.truth_rule, TruthMode::construction}, *first);
        return true;
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Scoring over a span of target years
// ---------------------------------------------------------------------------

struct ScoringRun {
    std::vector<ScoredForecast> scored;
    std::vector<Gap> gaps;
    std::vector<IntervalGrid> grids;
};

/// Issues intervals at every release whose current- or next-year target
/// lies in `span`, and scores the horizons issued at that release against
/// evaluation truths known at `evaluation_as_of`.
inline ScoringRun score_span(const RunData& data, const RunConfig& cfg, const GridParams& params,
                             const MethodSpec& method, YearSpan span, Origin evaluation_as_of) {
    ScoringRun run;
    const WisWeights weights(params.levels);
    for (const auto& target : data.panel.targets()) {
        const bool available = with_sources(data, cfg, method, target, [&](const auto& points, const auto& truths,
                                                                            int earliest) {
            for (Origin origin{span.first - 1, Season::spring}; origin <= Origin{span.last, Season::fall};
                 origin = origin.next()) {
                std::vector<Horizon> issued;
                for (Horizon h : kHorizons)
                    if (season_of(h) == origin.season && span.contains(origin.year + offset_years(h)))
                        issued.push_back(h);
                if (issued.empty()) continue;

                auto build = build_grid(points, truths, target, origin, params, earliest, method.label);
                for (Horizon h : issued) {
                    const int year = origin.year + offset_years(h);
                    const GridEntry* entry = build.grid.find(h);
                    if (!entry) {
                        auto it = std::find_if(build.gaps.begin(), build.gaps.end(),
                                               [&](const Gap& g) { return g.horizon == h; });
                        run.gaps.push_back(*it);
                        continue;
                    }
                    if (!entry->point) {
                        run.gaps.push_back({target, method.label, origin, h, "missing point forecast"});
                        continue;
                    }
                    const auto truth =
                        find_truth(data.panel, target, year, evaluation_as_of, cfg.truth_rule, TruthMode::evaluation);
                    if (!truth) {
                        run.gaps.push_back({target, method.label, origin, h, "truth unavailable"});
                        continue;
                    }
                    run.scored.push_back(
                        score_entry(build.grid, *entry, build.error_sets.at(h), method.label, truth->value, weights));
                }
                run.grids.push_back(std::move(build.grid));
            }
        });
        if (!available) run.gaps.push_back({target, method.label, std::nullopt, std::nullopt, "no data for method"});
    }
    return run;
}

inline Origin default_evaluation_as_of(const RunConfig& cfg, const ForecastPanel& panel) {
    if (cfg.evaluation_as_of) return *cfg.evaluation_as_of;
    if (auto v = panel.latest_vintage()) return *v;
    throw Error(ErrorCode::truth_unavailable, "panel has no realizations");
}

inline GridParams grid_params(const RunConfig& cfg) {
    return {cfg.levels, cfg.window, cfg.error_method, cfg.quantile_method};
}

// ---------------------------------------------------------------------------
// Back-test
// ---------------------------------------------------------------------------

struct BacktestResult {
    EvaluationReport report;
    std::vector<ScoredForecast> scored;
    std::vector<Gap> gaps;
    std::vector<IntervalGrid> grids;
};

/// Country cells plus cells pooled over countries.
inline std::vector<Grouping> default_groupings() { return {Grouping{}, Grouping{false, true, true, true}}; }

inline BacktestResult run_backtest(const RunConfig& cfg, const RunData& data) {
    cfg.validate();
    const auto params = grid_params(cfg);
    const Origin as_of = default_evaluation_as_of(cfg, data.panel);
    BacktestResult out;
    for (const auto& method : cfg.methods) {
        auto run = score_span(data, cfg, params, method, cfg.holdout, as_of);
        out.scored.insert(out.scored.end(), run.scored.begin(), run.scored.end());
        out.gaps.insert(out.gaps.end(), run.gaps.begin(), run.gaps.end());
        for (auto& g : run.grids) out.grids.push_back(std::move(g));
    }
    const auto groupings = default_groupings();
    out.report = aggregate_report(out.scored, groupings, cfg.exclusions);
    return out;
}

// ---------------------------------------------------------------------------
// Tuning on the training span
// ---------------------------------------------------------------------------

struct TuningCell {
    std::size_t window = 11;
    ErrorMethod error_method = ErrorMethod::absolute;
    QuantileMethod quantile_method = QuantileMethod::linear;
};

struct TuningRow {
    TuningCell cell;
    std::string method;
    std::string variable;
    Horizon horizon = Horizon::fall_current;
    std::size_t n = 0;            ///< 0 marks an infeasible cell
    double interval_score = 0.0;  ///< mean weighted interval score
    std::vector<double> coverage; ///< per level
};

struct TuningReport {
    LevelSet levels;
    std::vector<TuningRow> rows;
    std::vector<Gap> gaps;
};

/// Scores every grid cell on the training span. Only the hold-out-free
/// view of the panel is visible. All cells are scored on the common set of
/// (target, release, horizon) keys feasible for every cell.
inline TuningReport run_tuning(const RunConfig& cfg, const RunData& full, const std::vector<TuningCell>& grid) {
    cfg.validate();
    if (grid.empty()) throw Error(ErrorCode::invalid_argument, "empty tuning grid");
    RunData data;
    data.panel = full.panel.restricted_to_targets(-1000000, cfg.train.last);
    data.quarterly = full.quarterly;
    for (const auto& [label, p] : full.external) data.external.emplace(label, p.restricted_to_targets(-1000000, cfg.train.last));
    const Origin as_of = default_evaluation_as_of(cfg, data.panel);

    using Key = std::tuple<TargetId, Origin, Horizon>;
    TuningReport report;
    report.levels = cfg.levels;
    for (const auto& method : cfg.methods) {
        std::vector<ScoringRun> runs;
        for (const auto& cell : grid) {
            GridParams params{cfg.levels, cell.window, cell.error_method, cell.quantile_method};
            runs.push_back(score_span(data, cfg, params, method, cfg.train, as_of));
        }
        std::set<Key> common;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::set<Key> keys;
            for (const auto& s : runs[i].scored) keys.insert({s.target, s.origin, s.horizon});
            if (i == 0) common = std::move(keys);
            else {
                std::set<Key> both;
                std::set_intersection(common.begin(), common.end(), keys.begin(), keys.end(),
                                      std::inserter(both, both.begin()));
                common = std::move(both);
            }
        }
        std::set<std::string> variables;
        for (const auto& t : data.panel.targets()) variables.insert(t.variable);

        for (std::size_t i = 0; i < runs.size(); ++i) {
            for (const auto& variable : variables)
                for (Horizon h : kHorizons) {
                    TuningRow row{grid[i], method.label, variable, h, 0, 0.0,
                                  std::vector<double>(cfg.levels.size(), 0.0)};
                    for (const auto& s : runs[i].scored) {
                        if (s.target.variable != variable || s.horizon != h) continue;
                        if (!common.contains({s.target, s.origin, s.horizon})) continue;
                        if (std::any_of(cfg.exclusions.begin(), cfg.exclusions.end(),
                                        [&](const Exclusion& e) { return e.matches(s); }))
                            continue;
                        ++row.n;
                        row.interval_score += s.wis.total;
                        for (std::size_t k = 0; k < s.levels.size(); ++k)
                            if (s.levels[k].lower <= s.outcome && s.outcome <= s.levels[k].upper) row.coverage[k] += 1;
                    }
                    if (row.n > 0) {
                        row.interval_score /= static_cast<double>(row.n);
                        for (auto& c : row.coverage) c /= static_cast<double>(row.n);
                    }
                    report.rows.push_back(std::move(row));
                }
            report.gaps.insert(report.gaps.end(), runs[i].gaps.begin(), runs[i].gaps.end());
        }
    }
    return report;
}

inline constexpr std::string_view kTuningHeader =
    "window,error_method,quantile_method,method,variable,horizon,level,metric,value,n";

inline std::string tuning_to_csv(const TuningReport& r) {
    std::string out(kTuningHeader);
    out += '\n';
    for (const auto& row : r.rows) {
        const std::vector<std::string> prefix{std::to_string(row.cell.window), std::string(to_string(row.cell.error_method)),
                                              std::string(to_string(row.cell.quantile_method)), row.method,
                                              row.variable, std::string(to_string(row.horizon))};
        auto emit = [&](const std::string& level, const std::string& metric, const std::string& value) {
            auto fields = prefix;
            fields.insert(fields.end(), {level, metric, value, std::to_string(row.n)});
            out += csv::join(fields);
            out += '\n';
        };
        if (row.n == 0) {
            emit("all", "infeasible", "1");
            continue;
        }
        emit("all", "wis", csv::format_double(row.interval_score));
        for (std::size_t k = 0; k < r.levels.size(); ++k)
            emit(csv::format_double(r.levels[k].value()), "coverage", csv::format_double(row.coverage[k]));
    }
    return out;
}

inline std::string tuning_to_json(const TuningReport& r) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json j;
        j["window"] = row.cell.window;
        j["error_method"] = std::string(to_string(row.cell.error_method));
        j["quantile_method"] = std::string(to_string(row.cell.quantile_method));
        j["method"] = row.method;
        j["variable"] = row.variable;
        j["horizon"] = std::string(to_string(row.horizon));
        j["n"] = row.n;
        j["feasible"] = row.n > 0;
        if (row.n > 0) {
            j["wis"] = row.interval_score;
            nlohmann::ordered_json cov = nlohmann::ordered_json::object();
            for (std::size_t k = 0; k < r.levels.size(); ++k) cov[csv::format_double(r.levels[k].value())] = row.coverage[k];
            j["coverage"] = std::move(cov);
        }
        rows.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Prospective forecasts
// ---------------------------------------------------------------------------

inline constexpr std::string_view kForecastHeader =
    "country,variable,origin_year,origin_season,target_year,level,lower,upper,point,method,generated_at";

struct ForecastOutput {
    std::string csv;
    std::size_t intervals = 0;
    std::vector<Gap> gaps;
};

/// Intervals for every target, method and horizon with a published point
/// forecast at `origin`. Rows carry the issuing release of their point.
inline ForecastOutput produce_forecast(const RunConfig& cfg, const RunData& data, Origin origin) {
    cfg.validate();
    const auto params = grid_params(cfg);
    ForecastOutput out;
    out.csv = std::string(kForecastHeader) + "\n";

    const auto present = data.panel.targets();
    for (const auto& country : cfg.universe.countries)
        for (const auto& variable : cfg.universe.variables) {
            const TargetId t{country, variable};
            if (!present.contains(t)) out.gaps.push_back({t, "*", origin, std::nullopt, "no forecasts in panel"});
        }

    for (const auto& method : cfg.methods)
        for (const auto& target : present) {
            const bool available = with_sources(data, cfg, method, target, [&](const auto& points, const auto& truths,
                                                                                int earliest) {
                auto build = build_grid(points, truths, target, origin, params, earliest, method.label);
                out.gaps.insert(out.gaps.end(), build.gaps.begin(), build.gaps.end());
                for (const auto& e : build.grid.entries) {
                    if (!e.point) {
                        if (origin_for(e.target_year, e.horizon) <= origin)
                            out.gaps.push_back({target, method.label, origin, e.horizon, "missing point forecast"});
                        continue;
                    }
                    const Origin issued = origin_for(e.target_year, e.horizon);
                    for (std::size_t k = 0; k < params.levels.size(); ++k) {
                        const auto pi = build.grid.interval(e, k);
                        out.csv += csv::join({target.country, target.variable, std::to_string(issued.year),
                                              std::string(1, season_code(issued.season)), std::to_string(e.target_year),
                                              csv::format_double(pi.level.value()), csv::format_double(pi.lower),
                                              csv::format_double(pi.upper), csv::format_double(pi.center),
                                              method.label, cfg.generated_at});
                        out.csv += '\n';
                        ++out.intervals;
                    }
                }
            });
            if (!available) out.gaps.push_back({target, method.label, origin, std::nullopt, "no data for method"});
        }
    return out;
}

} // namespace errband
