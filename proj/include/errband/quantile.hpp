#pragma once

#include "errband/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace errband {

/// Empirical quantile estimators (Hyndman & Fan numbering).
enum class QuantileMethod {
    inverse_ecdf,  ///< type 1: the ceil(n*tau)-th order statistic
    linear,        ///< type 7: interpolation at rank 1 + (n-1)*tau
};

inline std::string_view to_string(QuantileMethod m) {
    return m == QuantileMethod::inverse_ecdf ? "type1" : "type7";
}

inline std::optional<QuantileMethod> parse_quantile_method(std::string_view text) {
    if (text == "type1" || text == "1" || text == "inverse-ecdf") return QuantileMethod::inverse_ecdf;
    if (text == "type7" || text == "7" || text == "linear") return QuantileMethod::linear;
    return std::nullopt;
}

namespace detail {

inline void check_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::invalid_argument, "quantile level must lie in (0,1)");
}

// Smallest rank k in [1, n] with k/n >= tau. The ECDF at the k-th order
// statistic is evaluated exactly as k/n so that products like 10*0.3 that
// round above an integer do not skip a rank.
inline std::size_t ecdf_rank(std::size_t n, double tau) {
    const double nd = static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::clamp(std::ceil(nd * tau), 1.0, nd));
    while (k > 1 && static_cast<double>(k - 1) / nd >= tau) --k;
    while (k < n && static_cast<double>(k) / nd < tau) ++k;
    return k;
}

} // namespace detail

/// Quantile of samples already sorted in ascending order.
inline double sorted_quantile(std::span<const double> sorted, double tau, QuantileMethod method) {
    detail::check_tau(tau);
    if (sorted.empty()) throw Error(ErrorCode::empty_error_set);
    const std::size_t n = sorted.size();
    if (method == QuantileMethod::inverse_ecdf) return sorted[detail::ecdf_rank(n, tau) - 1];

    const double rank = 1.0 + static_cast<double>(n - 1) * tau;
    const double lo = std::floor(rank);
    const auto i = static_cast<std::size_t>(lo) - 1;
    const double frac = rank - lo;
    if (frac == 0.0 || i + 1 >= n) return sorted[i];
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

/// Empirical tau-quantile of an unordered, finite, nonempty sample.
inline double empirical_quantile(std::span<const double> samples, double tau, QuantileMethod method) {
    if (samples.empty()) throw Error(ErrorCode::empty_error_set);
    for (double v : samples)
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_error_value);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, tau, method);
}

} // namespace errband
