// Writes a simulated forecast panel and quarterly series for demos and tests.

#include "errband/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Simulated forecast panel with Gaussian forecast errors"};
    errband::SyntheticSpec spec;
    std::string out_dir = ".";
    std::vector<std::string> drop;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--first-year", spec.first_year);
    app.add_option("--last-year", spec.last_year);
    app.add_option("--seed", spec.seed);
    app.add_option("--drop-country", drop, "omit a country from the panel file");
    CLI11_PARSE(app, argc, argv);

    const auto data = errband::make_synthetic_panel(spec);
    errband::ForecastPanel panel;
    for (const auto& r : data.panel.forecast_records())
        if (std::find(drop.begin(), drop.end(), r.target.country) == drop.end()) panel.add(r);
    for (const auto& r : data.panel.realization_records())
        if (std::find(drop.begin(), drop.end(), r.target.country) == drop.end()) panel.add(r);

    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "panel.csv", std::ios::binary) << errband::serialize_panel(panel);
    std::ofstream(std::filesystem::path(out_dir) / "quarterly.csv", std::ios::binary)
        << errband::serialize_quarterly(data.quarterly_raw);
    std::cout << panel.forecast_count() << " forecasts, " << panel.realization_count() << " realizations\n";
    return 0;
}
