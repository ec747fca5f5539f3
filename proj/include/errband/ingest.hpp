#pragma once

#include "errband/benchmark_ar.hpp"
#include "errband/csv.hpp"
#include "errband/panel.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace errband {

inline constexpr std::string_view kPanelHeader =
    "country,variable,kind,origin_year,origin_season,target_year,vintage_year,vintage_season,value";
inline constexpr std::string_view kQuarterlyHeader = "country,variable,year,quarter,value";

struct ParseReport {
    std::size_t rows = 0;
    std::size_t forecasts = 0;
    std::size_t realizations = 0;
    std::size_t skipped_missing = 0;          ///< value was NA
    std::size_t skipped_outside_horizons = 0; ///< forecasts beyond the next year
    std::vector<std::string> rejected;        ///< "line N: reason"
};

struct PanelParse {
    ForecastPanel panel;
    ParseReport report;
};

namespace detail {

inline void expect_header(csv::LineReader& reader, std::string_view expected) {
    std::string line;
    if (!reader.next(line)) throw Error(ErrorCode::schema_mismatch, "empty file");
    if (line != expected) throw Error(ErrorCode::schema_mismatch, "header '" + line + "', expected '" + std::string(expected) + "'");
}

inline std::string at_line(std::size_t n, std::string_view what) { return "line " + std::to_string(n) + ": " + std::string(what); }

} // namespace detail

/// Reads the long-format forecast/realization CSV. Rows that fail
/// validation are rejected with a diagnostic; duplicate keys and a wrong
/// header are fatal.
inline PanelParse parse_forecast_panel(std::istream& in, const Universe& universe = {}, std::string source = {}) {
    PanelParse out;
    out.panel.provenance.source = std::move(source);
    csv::LineReader reader(in);
    detail::expect_header(reader, kPanelHeader);

    std::map<ForecastPanel::ForecastKey, std::size_t> forecast_lines;
    std::map<ForecastPanel::RealizationKey, std::size_t> realization_lines;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const std::size_t ln = reader.line_number();
        ++out.report.rows;
        const auto f = csv::split(line);
        auto reject = [&](std::string_view why) { out.report.rejected.push_back(detail::at_line(ln, why)); };
        if (f.size() != 9) {
            reject("expected 9 fields, got " + std::to_string(f.size()));
            continue;
        }
        TargetId target{f[0], f[1]};
        if (!universe.contains(target)) {
            reject("unknown target " + to_string(target));
            continue;
        }
        const auto target_year = csv::parse_int(f[5]);
        if (!target_year) {
            reject("bad target_year '" + f[5] + "'");
            continue;
        }
        std::optional<double> value;
        if (!csv::is_missing(f[8])) {
            value = csv::parse_double(f[8]);
            if (!value) {
                reject("bad value '" + f[8] + "'");
                continue;
            }
        }

        if (f[2] == "forecast") {
            const auto oy = csv::parse_int(f[3]);
            const auto os = parse_season(f[4]);
            if (!oy || !os) {
                reject("bad forecast origin");
                continue;
            }
            if (!csv::is_missing(f[6]) || !csv::is_missing(f[7])) {
                reject("forecast rows carry no vintage");
                continue;
            }
            const Origin origin{*oy, *os};
            if (*target_year != origin.year && *target_year != origin.year + 1) {
                ++out.report.skipped_outside_horizons;
                continue;
            }
            const ForecastPanel::ForecastKey key{target, origin, *target_year};
            if (auto it = forecast_lines.find(key); it != forecast_lines.end())
                throw Error(ErrorCode::duplicate_record,
                            "lines " + std::to_string(it->second) + " and " + std::to_string(ln));
            forecast_lines.emplace(key, ln);
            if (!value) {
                ++out.report.skipped_missing;
                continue;
            }
            out.panel.add(ForecastRecord{target, origin, *target_year, *value});
            ++out.report.forecasts;
        } else if (f[2] == "realization") {
            const auto vy = csv::parse_int(f[6]);
            const auto vs = parse_season(f[7]);
            if (!vy || !vs) {
                reject("bad vintage");
                continue;
            }
            if (!csv::is_missing(f[3]) || !csv::is_missing(f[4])) {
                reject("realization rows carry no origin");
                continue;
            }
            const RealizationVintage r{target, *target_year, Origin{*vy, *vs}, value.value_or(0.0)};
            if (r.vintage.year < r.target_year) {
                reject("vintage precedes target year");
                continue;
            }
            const ForecastPanel::RealizationKey key{target, *target_year, r.vintage};
            if (auto it = realization_lines.find(key); it != realization_lines.end())
                throw Error(ErrorCode::duplicate_record,
                            "lines " + std::to_string(it->second) + " and " + std::to_string(ln));
            realization_lines.emplace(key, ln);
            if (!value) {
                ++out.report.skipped_missing;
                continue;
            }
            out.panel.add(r);
            ++out.report.realizations;
        } else {
            reject("unknown kind '" + f[2] + "'");
        }
    }
    return out;
}

inline PanelParse parse_forecast_panel(const std::string& text, const Universe& universe = {}) {
    std::istringstream in(text);
    return parse_forecast_panel(in, universe);
}

/// Canonical CSV: forecasts then realizations, in key order, numbers in
/// shortest round-trip form.
inline std::string serialize_panel(const ForecastPanel& panel) {
    std::string out(kPanelHeader);
    out += '\n';
    for (const auto& r : panel.forecast_records()) {
        out += csv::join({r.target.country, r.target.variable, "forecast", std::to_string(r.origin.year),
                          std::string(1, season_code(r.origin.season)), std::to_string(r.target_year),
                          std::string(csv::kMissing), std::string(csv::kMissing), csv::format_double(r.value)});
        out += '\n';
    }
    for (const auto& r : panel.realization_records()) {
        out += csv::join({r.target.country, r.target.variable, "realization", std::string(csv::kMissing),
                          std::string(csv::kMissing), std::to_string(r.target_year), std::to_string(r.vintage.year),
                          std::string(1, season_code(r.vintage.season)), csv::format_double(r.value)});
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quarterly benchmark data
// ---------------------------------------------------------------------------

enum class QuarterlyKind {
    growth_rate,  ///< percent growth per quarter, passed through
    index_level,  ///< positive index levels, converted to 100 * log growth
};

struct QuarterlyConventions {
    std::map<std::string, QuarterlyKind> kinds{{std::string(kGdpGrowth), QuarterlyKind::growth_rate},
                                               {std::string(kCpiInflation), QuarterlyKind::index_level}};

    QuarterlyKind kind_of(const std::string& variable) const {
        auto it = kinds.find(variable);
        return it == kinds.end() ? QuarterlyKind::growth_rate : it->second;
    }
};

struct QuarterlyParse {
    QuarterlyCollection raw;     ///< values as read
    QuarterlyCollection series;  ///< quarterly growth in percent
    std::size_t rows = 0;
    std::vector<std::string> rejected;
    std::vector<std::string> gaps;  ///< "CTY/var: 2021Q2-2023Q4"
};

inline QuarterlyParse parse_quarterly(std::istream& in, const Universe& universe = {},
                                      const QuarterlyConventions& conventions = {}) {
    QuarterlyParse out;
    csv::LineReader reader(in);
    detail::expect_header(reader, kQuarterlyHeader);
    std::map<std::pair<TargetId, int>, std::size_t> lines;
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const std::size_t ln = reader.line_number();
        ++out.rows;
        const auto f = csv::split(line);
        auto reject = [&](std::string_view why) { out.rejected.push_back(detail::at_line(ln, why)); };
        if (f.size() != 5) {
            reject("expected 5 fields, got " + std::to_string(f.size()));
            continue;
        }
        TargetId target{f[0], f[1]};
        if (!universe.contains(target)) {
            reject("unknown target " + to_string(target));
            continue;
        }
        const auto year = csv::parse_int(f[2]);
        const auto quarter = csv::parse_int(f[3]);
        if (!year || !quarter || *quarter < 1 || *quarter > 4) {
            reject("bad year/quarter");
            continue;
        }
        const Quarter q{*year, *quarter};
        if (auto [it, fresh] = lines.emplace(std::pair{target, q.index()}, ln); !fresh)
            throw Error(ErrorCode::duplicate_record, "lines " + std::to_string(it->second) + " and " + std::to_string(ln));
        if (csv::is_missing(f[4])) continue;
        const auto value = csv::parse_double(f[4]);
        if (!value) {
            reject("bad value '" + f[4] + "'");
            continue;
        }
        auto& s = out.raw.try_emplace(target, target).first->second;
        s.set(q, *value);
    }

    for (const auto& [target, raw] : out.raw) {
        QuarterlySeries growth(target);
        if (conventions.kind_of(target.variable) == QuarterlyKind::index_level) {
            for (const auto& [q, level] : raw.observations())
                if (!(level > 0.0))
                    throw Error(ErrorCode::invalid_level, to_string(target) + " " + to_string(q));
            for (const auto& [q, level] : raw.observations()) {
                const auto prev = raw.at(Quarter::from_index(q.index() - 1));
                if (prev) growth.set(q, 100.0 * std::log(level / *prev));
            }
        } else {
            growth = raw;
        }
        if (!growth.empty()) {
            for (const auto& [from, to] : growth.gaps())
                out.gaps.push_back(to_string(target) + ": " + to_string(from) + "-" + to_string(to));
        }
        out.series.emplace(target, std::move(growth));
    }
    return out;
}

inline std::string serialize_quarterly(const QuarterlyCollection& raw) {
    std::string out(kQuarterlyHeader);
    out += '\n';
    for (const auto& [target, s] : raw)
        for (const auto& [q, v] : s.observations()) {
            out += csv::join({target.country, target.variable, std::to_string(q.year), std::to_string(q.quarter),
                              csv::format_double(v)});
            out += '\n';
        }
    return out;
}

} // namespace errband
