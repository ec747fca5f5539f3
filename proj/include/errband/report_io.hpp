#pragma once

#include "errband/csv.hpp"
#include "errband/scoring.hpp"

#include <json.hpp>

#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace errband {

// ---------------------------------------------------------------------------
// Evaluation reports: long CSV and its JSON mirror
// ---------------------------------------------------------------------------

inline constexpr std::string_view kReportHeader = "country,variable,horizon,method,level,metric,value,n";

struct ReportRow {
    CellKey key;
    std::string level;  ///< tau, or "all" for weighted-score metrics
    std::string metric;
    double value = 0.0;
    std::size_t n = 0;
};

inline std::vector<ReportRow> report_rows(const EvaluationReport& report) {
    std::vector<ReportRow> rows;
    for (const auto& c : report.cells) {
        rows.push_back({c.key, "all", "wis", c.mean_wis.total, c.n});
        rows.push_back({c.key, "all", "dispersion", c.mean_wis.dispersion, c.n});
        rows.push_back({c.key, "all", "overprediction", c.mean_wis.overprediction, c.n});
        rows.push_back({c.key, "all", "underprediction", c.mean_wis.underprediction, c.n});
        for (const auto& l : c.levels) {
            const auto tau = csv::format_double(l.tau);
            rows.push_back({c.key, tau, "coverage", l.coverage, c.n});
            rows.push_back({c.key, tau, "length", l.mean_length, c.n});
            rows.push_back({c.key, tau, "is", l.mean_score, c.n});
        }
    }
    return rows;
}

inline std::string report_to_csv(const EvaluationReport& report) {
    std::string out(kReportHeader);
    out += '\n';
    for (const auto& r : report_rows(report)) {
        out += csv::join({r.key.country, r.key.variable, r.key.horizon, r.key.method, r.level, r.metric,
                          csv::format_double(r.value), std::to_string(r.n)});
        out += '\n';
    }
    return out;
}

inline std::string report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : report_rows(report)) {
        nlohmann::ordered_json row;
        row["country"] = r.key.country;
        row["variable"] = r.key.variable;
        row["horizon"] = r.key.horizon;
        row["method"] = r.key.method;
        row["level"] = r.level;
        row["metric"] = r.metric;
        row["value"] = r.value;
        row["n"] = r.n;
        rows.push_back(std::move(row));
    }
    nlohmann::ordered_json doc;
    doc["schema"] = std::string(kReportHeader);
    doc["rows"] = std::move(rows);
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Per-forecast audit trail
// ---------------------------------------------------------------------------

inline constexpr std::string_view kScoresHeader =
    "country,variable,method,origin_year,origin_season,target_year,horizon,level,lower,upper,point,outcome,"
    "raw_lower_offset,raw_upper_offset,dispersion,overprediction,underprediction,score,block,pooled,degenerate,"
    "excludes_point,source_years,skipped_years";

namespace detail {

inline std::string join_years(const std::vector<int>& years) {
    std::string out;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(years[i]);
    }
    return out;
}

inline std::vector<int> split_years(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';'))
        if (!item.empty()) {
            const auto y = csv::parse_int(item);
            if (!y) throw Error(ErrorCode::schema_mismatch, "bad year list '" + text + "'");
            out.push_back(*y);
        }
    return out;
}

} // namespace detail

inline std::string scores_to_csv(const std::vector<ScoredForecast>& scored) {
    std::string out(kScoresHeader);
    out += '\n';
    for (const auto& s : scored)
        for (const auto& l : s.levels) {
            out += csv::join({s.target.country, s.target.variable, s.method, std::to_string(s.origin.year),
                              std::string(1, season_code(s.origin.season)), std::to_string(s.target_year),
                              std::string(to_string(s.horizon)), csv::format_double(l.tau),
                              csv::format_double(l.lower), csv::format_double(l.upper), csv::format_double(s.point),
                              csv::format_double(s.outcome), csv::format_double(l.raw_offsets.lower),
                              csv::format_double(l.raw_offsets.upper), csv::format_double(l.score.dispersion),
                              csv::format_double(l.score.overprediction), csv::format_double(l.score.underprediction),
                              csv::format_double(l.score.total), std::to_string(s.block), s.pooled ? "1" : "0",
                              s.degenerate ? "1" : "0", s.excludes_point ? "1" : "0", detail::join_years(s.source_years),
                              detail::join_years(s.skipped_years)});
            out += '\n';
        }
    return out;
}

/// Rebuilds scored forecasts from an audit trail. Scores are recomputed
/// from the stored endpoints and outcomes, not trusted from the file.
inline std::vector<ScoredForecast> scores_from_csv(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != kScoresHeader) throw Error(ErrorCode::schema_mismatch, "scores header");

    using Key = std::tuple<std::string, std::string, std::string, int, int, int, std::string>;
    std::vector<ScoredForecast> out;
    std::map<Key, std::size_t> index;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        const auto where = "line " + std::to_string(reader.line_number());
        if (f.size() != 24) throw Error(ErrorCode::schema_mismatch, where + ": expected 24 fields");
        auto num = [&](std::size_t i) {
            const auto v = csv::parse_double(f[i]);
            if (!v) throw Error(ErrorCode::schema_mismatch, where + ": bad number '" + f[i] + "'");
            return *v;
        };
        auto integer = [&](std::size_t i) {
            const auto v = csv::parse_int(f[i]);
            if (!v) throw Error(ErrorCode::schema_mismatch, where + ": bad integer '" + f[i] + "'");
            return *v;
        };
        const auto season = parse_season(f[4]);
        const auto horizon = parse_horizon(f[6]);
        if (!season || !horizon) throw Error(ErrorCode::schema_mismatch, where + ": bad origin season or horizon");

        const Key key{f[0], f[1], f[2], integer(3), static_cast<int>(*season), integer(5), f[6]};
        auto [it, fresh] = index.emplace(key, out.size());
        if (fresh) {
            ScoredForecast s;
            s.target = {f[0], f[1]};
            s.method = f[2];
            s.origin = {integer(3), *season};
            s.target_year = integer(5);
            s.horizon = *horizon;
            s.point = num(10);
            s.outcome = num(11);
            s.block = integer(18);
            s.pooled = f[19] == "1";
            s.degenerate = f[20] == "1";
            s.excludes_point = f[21] == "1";
            s.source_years = detail::split_years(f[22]);
            s.skipped_years = detail::split_years(f[23]);
            out.push_back(std::move(s));
        }
        auto& s = out[it->second];
        const ConfidenceLevel tau(num(7));
        LevelScore l{tau.value(), num(8), num(9), {num(12), num(13)}, {}};
        l.score = interval_score(l.lower, l.upper, s.outcome, tau);
        s.levels.push_back(l);
    }

    for (auto& s : out) {
        std::vector<double> taus;
        std::vector<PredictionInterval> intervals;
        for (const auto& l : s.levels) {
            taus.push_back(l.tau);
            intervals.push_back({ConfidenceLevel(l.tau), l.lower, l.upper, s.point, false, false});
        }
        s.wis = weighted_score(intervals, s.outcome, WisWeights(LevelSet(taus)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gap manifests
// ---------------------------------------------------------------------------

/// A cell that could not be produced or scored.
struct Gap {
    TargetId target;
    std::string method;
    std::optional<Origin> origin;
    std::optional<Horizon> horizon;
    std::string reason;
};

inline constexpr std::string_view kGapsHeader = "country,variable,method,origin_year,origin_season,horizon,reason";

inline std::string gaps_to_csv(const std::vector<Gap>& gaps) {
    std::string out(kGapsHeader);
    out += '\n';
    for (const auto& g : gaps) {
        std::string reason = g.reason;
        for (char& c : reason)
            if (c == ',' || c == '\n') c = ';';
        out += csv::join({g.target.country, g.target.variable, g.method,
                          g.origin ? std::to_string(g.origin->year) : std::string(csv::kMissing),
                          g.origin ? std::string(1, season_code(g.origin->season)) : std::string(csv::kMissing),
                          g.horizon ? std::string(to_string(*g.horizon)) : std::string(csv::kMissing), reason});
        out += '\n';
    }
    return out;
}

} // namespace errband
