#pragma once

#include "errband/benchmark_ar.hpp"
#include "errband/csv.hpp"
#include "errband/domain.hpp"
#include "errband/forecast_errors.hpp"
#include "errband/panel.hpp"
#include "errband/quantile.hpp"
#include "errband/scoring.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace errband {

/// Closed range of target years.
struct YearSpan {
    int first = 0;
    int last = 0;

    bool contains(int year) const { return year >= first && year <= last; }
    friend bool operator==(const YearSpan&, const YearSpan&) = default;
};

enum class MethodKind { imf, ar, external };

/// A source of point forecasts to wrap with intervals.
struct MethodSpec {
    std::string label;
    MethodKind kind = MethodKind::imf;
    std::string path;  ///< forecast file for external methods
};

struct RunConfig {
    std::string data_path;
    std::string quarterly_path;
    std::string out_dir = "out";
    LevelSet levels;
    ErrorMethod error_method = ErrorMethod::absolute;
    QuantileMethod quantile_method = QuantileMethod::linear;
    std::size_t window = 11;
    YearSpan train{1990, 2012};
    YearSpan holdout{2013, 2023};
    TruthRule truth_rule;
    std::optional<Origin> evaluation_as_of;  ///< defaults to the latest vintage in the panel
    std::vector<MethodSpec> methods{{"imf", MethodKind::imf, {}}};
    std::vector<Exclusion> exclusions;
    Ar1Options ar;
    std::string generated_at;
    Universe universe;

    void validate() const {
        if (window < 1) throw Error(ErrorCode::invalid_argument, "window must be >= 1");
        if (train.first > train.last || holdout.first > holdout.last)
            throw Error(ErrorCode::invalid_argument, "spans must have first <= last");
        if (!(train.last < holdout.first))
            throw Error(ErrorCode::invalid_argument, "training span must end before the hold-out span starts");
        if (methods.empty()) throw Error(ErrorCode::invalid_argument, "no methods configured");
        for (const auto& m : methods) {
            if (m.kind == MethodKind::ar && quarterly_path.empty())
                throw Error(ErrorCode::invalid_argument, "method 'ar' needs quarterly data");
            if (m.kind == MethodKind::external && m.path.empty())
                throw Error(ErrorCode::invalid_argument, "method '" + m.label + "' needs a forecast file");
        }
    }
};

// ---------------------------------------------------------------------------
// Text forms of configuration values
// ---------------------------------------------------------------------------

namespace config_text {

inline std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline LevelSet parse_levels(const std::string& text) {
    std::vector<double> taus;
    for (const auto& s : split_list(text)) {
        const auto v = csv::parse_double(s);
        if (!v) throw Error(ErrorCode::invalid_argument, "bad level '" + s + "'");
        taus.push_back(*v);
    }
    return LevelSet(taus);
}

/// "1990-2012"
inline YearSpan parse_span(const std::string& text) {
    const auto dash = text.find('-', 1);
    if (dash == std::string::npos) throw Error(ErrorCode::invalid_argument, "bad span '" + text + "'");
    const auto a = csv::parse_int(text.substr(0, dash));
    const auto b = csv::parse_int(text.substr(dash + 1));
    if (!a || !b) throw Error(ErrorCode::invalid_argument, "bad span '" + text + "'");
    return {*a, *b};
}

/// "2023F" or "2024S"
inline Origin parse_origin(const std::string& text) {
    if (text.size() < 2) throw Error(ErrorCode::invalid_argument, "bad origin '" + text + "'");
    const auto year = csv::parse_int(text.substr(0, text.size() - 1));
    const auto season = parse_season(text.substr(text.size() - 1));
    if (!year || !season) throw Error(ErrorCode::invalid_argument, "bad origin '" + text + "'");
    return {*year, *season};
}

/// "imf,ar,bvar=path/to/bvar.csv"
inline std::vector<MethodSpec> parse_methods(const std::string& text) {
    std::vector<MethodSpec> out;
    for (const auto& item : split_list(text)) {
        const auto eq = item.find('=');
        if (eq != std::string::npos) {
            out.push_back({item.substr(0, eq), MethodKind::external, item.substr(eq + 1)});
        } else if (item == "imf") {
            out.push_back({"imf", MethodKind::imf, {}});
        } else if (item == "ar") {
            out.push_back({"ar", MethodKind::ar, {}});
        } else {
            throw Error(ErrorCode::invalid_argument, "unknown method '" + item + "' (external methods need label=path)");
        }
    }
    return out;
}

/// "JPN:2021-2023" or "JPN:2021-2023:ar", comma separated.
inline std::vector<Exclusion> parse_exclusions(const std::string& text) {
    std::vector<Exclusion> out;
    for (const auto& item : split_list(text)) {
        const auto parts = split_list(item, ':');
        if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorCode::invalid_argument, "bad exclusion '" + item + "'");
        const auto span = parse_span(parts[1]);
        out.push_back({parts[0], span.first, span.last, parts.size() == 3 ? parts[2] : std::string{}});
    }
    return out;
}

} // namespace config_text

/// Applies one "key = value" setting. Keys mirror the long CLI flags.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace config_text;
    if (key == "data") cfg.data_path = value;
    else if (key == "quarterly-data") cfg.quarterly_path = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "levels") cfg.levels = parse_levels(value);
    else if (key == "window") {
        const auto w = csv::parse_int(value);
        if (!w || *w < 1) throw Error(ErrorCode::invalid_argument, "bad window '" + value + "'");
        cfg.window = static_cast<std::size_t>(*w);
    } else if (key == "error-method") {
        const auto m = parse_error_method(value);
        if (!m) throw Error(ErrorCode::invalid_argument, "bad error method '" + value + "'");
        cfg.error_method = *m;
    } else if (key == "quantile-method") {
        const auto m = parse_quantile_method(value);
        if (!m) throw Error(ErrorCode::invalid_argument, "bad quantile method '" + value + "'");
        cfg.quantile_method = *m;
    } else if (key == "train-span") cfg.train = parse_span(value);
    else if (key == "holdout-span") cfg.holdout = parse_span(value);
    else if (key == "methods") cfg.methods = parse_methods(value);
    else if (key == "exclude") cfg.exclusions = parse_exclusions(value);
    else if (key == "evaluation-as-of") cfg.evaluation_as_of = parse_origin(value);
    else if (key == "generated-at") cfg.generated_at = value;
    else if (key == "countries") {
        const auto list = split_list(value);
        cfg.universe.countries = {list.begin(), list.end()};
    } else if (key == "variables") {
        const auto list = split_list(value);
        cfg.universe.variables = {list.begin(), list.end()};
    } else if (key == "truth-fallback") {
        if (value == "latest") cfg.truth_rule.fallback = TruthFallback::latest_available_release;
        else if (value == "none") cfg.truth_rule.fallback = TruthFallback::none;
        else throw Error(ErrorCode::invalid_argument, "bad truth-fallback '" + value + "'");
    } else if (key == "ar-window") {
        if (value == "expanding") cfg.ar.window = FitWindow::expanding;
        else {
            const auto n = csv::parse_int(value);
            if (!n || *n < 2) throw Error(ErrorCode::invalid_argument, "bad ar-window '" + value + "'");
            cfg.ar.window = FitWindow::rolling;
            cfg.ar.rolling_length = static_cast<std::size_t>(*n);
        }
    } else if (key == "ar-min-obs") {
        const auto n = csv::parse_int(value);
        if (!n || *n < 2) throw Error(ErrorCode::invalid_argument, "bad ar-min-obs '" + value + "'");
        cfg.ar.min_observations = static_cast<std::size_t>(*n);
    } else {
        throw Error(ErrorCode::invalid_argument, "unknown setting '" + key + "'");
    }
}

/// Reads "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::invalid_argument, "config line " + std::to_string(n) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

} // namespace errband
