#pragma once

#include "errband/domain.hpp"
#include "errband/forecast_errors.hpp"
#include "errband/quantile.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace errband {

/// Distances of the interval endpoints from the point forecast.
struct IntervalOffsets {
    double lower = 0.0;
    double upper = 0.0;

    friend bool operator==(const IntervalOffsets&, const IntervalOffsets&) = default;
};

struct PredictionInterval {
    ConfidenceLevel level{0.5};
    double lower = 0.0;
    double upper = 0.0;
    double center = 0.0;        ///< the point forecast
    bool degenerate = false;     ///< zero width
    bool excludes_point = false;

    double length() const { return upper - lower; }
    bool covers(double y) const { return lower <= y && y <= upper; }
};

inline PredictionInterval make_interval(double point, ConfidenceLevel level, IntervalOffsets off) {
    PredictionInterval pi{level, point + off.lower, point + off.upper, point, false, false};
    pi.degenerate = !(pi.lower < pi.upper);
    pi.excludes_point = point < pi.lower || point > pi.upper;
    return pi;
}

namespace detail {

inline std::vector<double> sorted_errors(const ErrorSet& errs) {
    std::vector<double> s = errs.errors;
    for (double v : s)
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_error_value);
    std::sort(s.begin(), s.end());
    return s;
}

inline IntervalOffsets offsets_from_sorted(std::span<const double> sorted, ErrorMethod method, ConfidenceLevel tau,
                                           QuantileMethod qm) {
    if (method == ErrorMethod::absolute) {
        const double q = sorted_quantile(sorted, tau.value(), qm);
        return {-q, q};
    }
    const double tail = tau.alpha() / 2.0;
    return {sorted_quantile(sorted, tail, qm), sorted_quantile(sorted, 1.0 - tail, qm)};
}

} // namespace detail

/// Symmetric interval: point -/+ the tau-quantile of absolute errors.
inline PredictionInterval interval_absolute(double point, const ErrorSet& errs, ConfidenceLevel tau,
                                            QuantileMethod qm) {
    if (errs.method != ErrorMethod::absolute) throw Error(ErrorCode::method_mismatch, "expected absolute errors");
    const auto sorted = detail::sorted_errors(errs);
    return make_interval(point, tau, detail::offsets_from_sorted(sorted, ErrorMethod::absolute, tau, qm));
}

/// Interval from the (1-tau)/2 and (1+tau)/2 quantiles of signed errors.
/// The result may exclude the point forecast; `excludes_point` flags it.
inline PredictionInterval interval_directional(double point, const ErrorSet& errs, ConfidenceLevel tau,
                                               QuantileMethod qm) {
    if (errs.method != ErrorMethod::directional)
        throw Error(ErrorCode::method_mismatch, "expected directional errors");
    const auto sorted = detail::sorted_errors(errs);
    return make_interval(point, tau, detail::offsets_from_sorted(sorted, ErrorMethod::directional, tau, qm));
}

/// Offsets at every level, for either error method.
inline std::vector<IntervalOffsets> level_offsets(const ErrorSet& errs, const LevelSet& levels, QuantileMethod qm) {
    const auto sorted = detail::sorted_errors(errs);
    std::vector<IntervalOffsets> out;
    out.reserve(levels.size());
    for (const auto& level : levels) out.push_back(detail::offsets_from_sorted(sorted, errs.method, level, qm));
    return out;
}

// ---------------------------------------------------------------------------
// Cross-horizon coherence
// ---------------------------------------------------------------------------

struct GridEntry {
    Horizon horizon = Horizon::fall_current;
    int target_year = 0;
    std::optional<double> point;             ///< absent when not yet published at the grid's origin
    std::vector<IntervalOffsets> raw;        ///< per level, as estimated
    std::vector<IntervalOffsets> offsets;    ///< per level, after pooling
    int block = 0;                           ///< pooled block index
};

/// Interval offsets of one target at one release, for every horizon whose
/// error set could be built, in increasing horizon order.
struct IntervalGrid {
    TargetId target;
    Origin origin;
    LevelSet levels;
    std::vector<GridEntry> entries;
    int merges = 0;

    bool symmetric() const {
        for (const auto& e : entries)
            for (const auto& o : e.offsets)
                if (o.lower != -o.upper) return false;
        return true;
    }

    const GridEntry* find(Horizon h) const {
        for (const auto& e : entries)
            if (e.horizon == h) return &e;
        return nullptr;
    }

    PredictionInterval interval(const GridEntry& e, std::size_t level) const {
        return make_interval(e.point.value(), levels[level], e.offsets[level]);
    }
};

/// Pools adjacent horizons until, at every level, upper offsets are
/// nondecreasing and lower offsets nonincreasing in the horizon order.
///
/// A violation at any level merges the two blocks at all levels and on both
/// sides; pooled offsets are size-weighted block means. The scan restarts
/// from the first block after every merge. Lower offsets are only inspected
/// when the grid is not symmetric. Ties are not violations.
inline IntervalGrid enforce_horizon_monotonicity(IntervalGrid grid) {
    struct Block {
        std::size_t first = 0;
        std::size_t count = 0;
        std::vector<double> lower_sum;
        std::vector<double> upper_sum;

        double lower(std::size_t k) const { return lower_sum[k] / static_cast<double>(count); }
        double upper(std::size_t k) const { return upper_sum[k] / static_cast<double>(count); }
    };

    std::sort(grid.entries.begin(), grid.entries.end(),
              [](const GridEntry& a, const GridEntry& b) { return horizon_before(a.horizon, b.horizon); });
    const std::size_t levels = grid.levels.size();
    const bool check_lower = !grid.symmetric();

    std::vector<Block> blocks;
    for (std::size_t i = 0; i < grid.entries.size(); ++i) {
        const auto& off = grid.entries[i].offsets;
        if (off.size() != levels) throw Error(ErrorCode::incomplete_level_set, "grid entry offsets");
        Block b{i, 1, std::vector<double>(levels), std::vector<double>(levels)};
        for (std::size_t k = 0; k < levels; ++k) {
            b.lower_sum[k] = off[k].lower;
            b.upper_sum[k] = off[k].upper;
        }
        blocks.push_back(std::move(b));
    }

    auto violates = [&](const Block& a, const Block& b) {
        for (std::size_t k = 0; k < levels; ++k) {
            if (a.upper(k) > b.upper(k)) return true;
            if (check_lower && a.lower(k) < b.lower(k)) return true;
        }
        return false;
    };

    for (;;) {
        std::size_t r = 0;
        while (r + 1 < blocks.size() && !violates(blocks[r], blocks[r + 1])) ++r;
        if (r + 1 >= blocks.size()) break;
        Block& a = blocks[r];
        const Block& b = blocks[r + 1];
        a.count += b.count;
        for (std::size_t k = 0; k < levels; ++k) {
            a.lower_sum[k] += b.lower_sum[k];
            a.upper_sum[k] += b.upper_sum[k];
        }
        blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(r) + 1);
        ++grid.merges;
    }

    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const Block& b = blocks[bi];
        for (std::size_t i = b.first; i < b.first + b.count; ++i) {
            auto& e = grid.entries[i];
            e.block = static_cast<int>(bi);
            if (b.count == 1) continue;
            for (std::size_t k = 0; k < levels; ++k) e.offsets[k] = {b.lower(k), b.upper(k)};
        }
    }
    return grid;
}

} // namespace errband
