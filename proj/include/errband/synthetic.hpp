#pragma once

#include "errband/benchmark_ar.hpp"
#include "errband/ingest.hpp"
#include "errband/panel.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace errband {

/// Parameters of a simulated forecast panel with known error laws.
struct SyntheticSpec {
    std::vector<std::string> countries{"CAN", "DEU", "FRA", "GBR", "ITA", "JPN", "USA"};
    std::vector<std::string> variables{std::string(kGdpGrowth), std::string(kCpiInflation)};
    int first_year = 1990;
    int last_year = 2023;
    /// Standard deviation of the forecast error by horizon rank.
    std::array<double, 4> error_sd{0.25, 0.5, 1.0, 2.0};
    /// Noise of the spring (first) release relative to the fall release.
    double revision_sd = 0.05;
    std::uint64_t seed = 20240501;
};

struct SyntheticData {
    ForecastPanel panel;
    QuarterlyCollection quarterly_raw;     ///< as it would appear on disk
    QuarterlyCollection quarterly_growth;  ///< percent growth per quarter
};

/// Quarterly growth follows a Gaussian AR(1); annual truths aggregate it.
/// Forecasts equal the truth minus a centred Gaussian error whose spread
/// depends on the horizon only. The data stand as of the spring release
/// after `last_year`: forecasts up to the fall `last_year` release,
/// realizations up to the spring release after it, quarterly data through
/// the first quarter of the following year.
inline SyntheticData make_synthetic_panel(const SyntheticSpec& spec) {
    SyntheticData out;
    out.panel.provenance.source = "synthetic";
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const Origin last_release{spec.last_year, Season::fall};
    const Origin cutoff{spec.last_year + 1, Season::spring};
    const Quarter last_quarter = data_cutoff(cutoff);

    for (const auto& country : spec.countries)
        for (const auto& variable : spec.variables) {
            const TargetId t{country, variable};
            QuarterlySeries growth(t), raw(t);
            double x = 0.5;
            double level = 100.0;
            const bool as_index = variable == kCpiInflation;
            for (int y = spec.first_year - 6; y <= spec.last_year + 1; ++y)
                for (int q = 1; q <= 4; ++q) {
                    x = 0.25 + 0.5 * x + 0.4 * z(rng);
                    growth.set({y, q}, x);
                    level *= std::exp(x / 100.0);
                    if (!(last_quarter < Quarter{y, q})) raw.set({y, q}, as_index ? level : x);
                }

            for (int year = spec.first_year; year <= spec.last_year + 1; ++year) {
                std::array<double, 7> window{};
                for (int j = 0; j < 7; ++j)
                    window[static_cast<std::size_t>(j)] = *growth.at(Quarter::from_index(annual_window_start(year).index() + j));
                const double truth = aggregate_annual(window);
                const Origin spring{year + 1, Season::spring}, fall{year + 1, Season::fall};
                const double first_release = truth + spec.revision_sd * z(rng);
                if (spring <= cutoff) out.panel.add(RealizationVintage{t, year, spring, first_release});
                if (fall <= cutoff) out.panel.add(RealizationVintage{t, year, fall, truth});
                for (Horizon h : kHorizons) {
                    const Origin o = origin_for(year, h);
                    const double e = spec.error_sd[static_cast<std::size_t>(horizon_rank(h))] * z(rng);
                    if (o.year < spec.first_year || last_release < o) continue;
                    out.panel.add(ForecastRecord{t, o, year, truth - e});
                }
            }
            // Growth as the pipeline sees it: derived from what is stored.
            QuarterlySeries visible(t);
            for (const auto& [q, v] : growth.observations())
                if (!(last_quarter < q) && (!as_index || q.index() > raw.first().index())) visible.set(q, v);
            out.quarterly_raw.emplace(t, std::move(raw));
            out.quarterly_growth.emplace(t, std::move(visible));
        }
    return out;
}

} // namespace errband
