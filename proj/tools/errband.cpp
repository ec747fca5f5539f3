// Command-line front end: ingest, tune, backtest, forecast, report.

#include "errband/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace fs = std::filesystem;
using namespace errband;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartial = 2;

// Flag values keyed by setting name; only flags given on the command line
// are applied, after the config file.
struct CommonFlags {
    std::string config;
    std::map<std::string, std::string> values;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "key = value configuration file");
    for (const char* key : {"data", "quarterly-data", "out", "levels", "window", "error-method", "quantile-method",
                            "train-span", "holdout-span", "methods", "exclude", "evaluation-as-of", "generated-at",
                            "countries", "variables", "truth-fallback", "ar-window", "ar-min-obs"}) {
        cmd->add_option(std::string("--") + key, flags.values[key]);
    }
}

RunConfig resolve(const CLI::App* cmd, const CommonFlags& flags) {
    std::map<std::string, std::string> settings;
    if (!flags.config.empty()) {
        std::ifstream in(flags.config);
        if (!in) throw Error(ErrorCode::io, "cannot open " + flags.config);
        settings = read_config_file(in);
    }
    for (const auto& [key, value] : flags.values)
        if (cmd->count(std::string("--") + key) > 0) settings[key] = value;
    RunConfig cfg;
    for (const auto& [key, value] : settings) apply_setting(cfg, key, value);
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    out << content;
}

std::vector<std::size_t> parse_window_grid(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : config_text::split_list(text)) {
        if (item.find('-') != std::string::npos) {
            const auto span = config_text::parse_span(item);
            for (int w = span.first; w <= span.last; ++w) out.push_back(static_cast<std::size_t>(w));
        } else if (const auto w = csv::parse_int(item); w && *w > 0) {
            out.push_back(static_cast<std::size_t>(*w));
        } else {
            throw Error(ErrorCode::invalid_argument, "bad window grid '" + text + "'");
        }
    }
    return out;
}

int report_gaps(const fs::path& path, const std::vector<Gap>& gaps) {
    if (gaps.empty()) return kExitOk;
    write_file(path, gaps_to_csv(gaps));
    std::cerr << gaps.size() << " gap(s) written to " << path.string() << "\n";
    return kExitPartial;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction intervals from past forecast errors"};
    app.require_subcommand(1);

    CommonFlags ingest_flags, tune_flags, backtest_flags, forecast_flags, report_flags;
    auto* ingest = app.add_subcommand("ingest", "validate and canonicalize input files");
    add_common(ingest, ingest_flags);

    auto* tune = app.add_subcommand("tune", "score a grid of settings on the training span");
    add_common(tune, tune_flags);
    std::string grid_windows = "4-11", grid_errors = "absolute,directional", grid_quantiles = "type7";
    tune->add_option("--grid-windows", grid_windows, "window lengths, e.g. 4-11 or 8,11");
    tune->add_option("--grid-error-methods", grid_errors);
    tune->add_option("--grid-quantile-methods", grid_quantiles);

    auto* backtest = app.add_subcommand("backtest", "issue and score intervals over the hold-out span");
    add_common(backtest, backtest_flags);

    auto* forecast = app.add_subcommand("forecast", "write intervals for one release");
    add_common(forecast, forecast_flags);
    std::string origin_text;
    forecast->add_option("--origin", origin_text, "release, e.g. 2023F")->required();

    auto* report = app.add_subcommand("report", "re-render report tables from a stored audit trail");
    add_common(report, report_flags);
    std::string scores_path;
    report->add_option("--scores", scores_path, "audit trail written by backtest (default <out>/scores.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            const auto cfg = resolve(ingest, ingest_flags);
            std::ifstream in(cfg.data_path);
            if (!in) throw Error(ErrorCode::io, "cannot open " + cfg.data_path);
            const auto parsed = parse_forecast_panel(in, cfg.universe, cfg.data_path);
            const auto& r = parsed.report;
            std::cout << "rows " << r.rows << ", forecasts " << r.forecasts << ", realizations " << r.realizations
                      << ", missing " << r.skipped_missing << ", outside horizons " << r.skipped_outside_horizons
                      << ", rejected " << r.rejected.size() << "\n";
            for (const auto& msg : r.rejected) std::cerr << cfg.data_path << ": " << msg << "\n";
            write_file(fs::path(cfg.out_dir) / "panel.csv", serialize_panel(parsed.panel));
            bool rejected = !r.rejected.empty();
            if (!cfg.quarterly_path.empty()) {
                std::ifstream qin(cfg.quarterly_path);
                if (!qin) throw Error(ErrorCode::io, "cannot open " + cfg.quarterly_path);
                const auto q = parse_quarterly(qin, cfg.universe);
                std::cout << "quarterly rows " << q.rows << ", series " << q.series.size() << ", rejected "
                          << q.rejected.size() << "\n";
                for (const auto& g : q.gaps) std::cout << "gap " << g << "\n";
                for (const auto& msg : q.rejected) std::cerr << cfg.quarterly_path << ": " << msg << "\n";
                write_file(fs::path(cfg.out_dir) / "quarterly.csv", serialize_quarterly(q.raw));
                rejected = rejected || !q.rejected.empty();
            }
            return rejected ? kExitValidation : kExitOk;
        }

        if (tune->parsed()) {
            const auto cfg = resolve(tune, tune_flags);
            std::vector<TuningCell> grid;
            for (auto w : parse_window_grid(grid_windows))
                for (const auto& e : config_text::split_list(grid_errors))
                    for (const auto& q : config_text::split_list(grid_quantiles)) {
                        const auto em = parse_error_method(e);
                        const auto qm = parse_quantile_method(q);
                        if (!em || !qm) throw Error(ErrorCode::invalid_argument, "bad tuning grid entry");
                        grid.push_back({w, *em, *qm});
                    }
            const auto data = load_run_data(cfg);
            const auto result = run_tuning(cfg, data, grid);
            write_file(fs::path(cfg.out_dir) / "tuning.csv", tuning_to_csv(result));
            write_file(fs::path(cfg.out_dir) / "tuning.json", tuning_to_json(result));
            if (!result.gaps.empty()) write_file(fs::path(cfg.out_dir) / "tuning_gaps.csv", gaps_to_csv(result.gaps));
            return kExitOk;
        }

        if (backtest->parsed()) {
            const auto cfg = resolve(backtest, backtest_flags);
            const auto data = load_run_data(cfg);
            const auto result = run_backtest(cfg, data);
            const fs::path out(cfg.out_dir);
            write_file(out / "report.csv", report_to_csv(result.report));
            write_file(out / "report.json", report_to_json(result.report));
            write_file(out / "scores.csv", scores_to_csv(result.scored));
            for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << result.scored.size() << " forecasts scored\n";
            return report_gaps(out / "gaps.csv", result.gaps);
        }

        if (forecast->parsed()) {
            auto cfg = resolve(forecast, forecast_flags);
            const Origin origin = config_text::parse_origin(origin_text);
            const auto data = load_run_data(cfg);
            const auto result = produce_forecast(cfg, data, origin);
            const fs::path out(cfg.out_dir);
            const std::string stem = "forecast_" + to_string(origin);
            write_file(out / (stem + ".csv"), result.csv);
            std::cout << result.intervals << " intervals written\n";
            return report_gaps(out / (stem + "_gaps.csv"), result.gaps);
        }

        if (report->parsed()) {
            const auto cfg = resolve(report, report_flags);
            const fs::path out(cfg.out_dir);
            const fs::path path = scores_path.empty() ? out / "scores.csv" : fs::path(scores_path);
            std::ifstream in(path);
            if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
            const auto scored = scores_from_csv(in);
            const auto groupings = default_groupings();
            const auto rep = aggregate_report(scored, groupings, cfg.exclusions);
            write_file(out / "report.csv", report_to_csv(rep));
            write_file(out / "report.json", report_to_json(rep));
            for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
