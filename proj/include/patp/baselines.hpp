#pragma once

// Robust scalar location baselines used for head-to-head comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patp/error.hpp"
#include "patp/estimators.hpp"

namespace patp {

enum class BaselineId { mean, median, trimmed10, winsorized10, huber, median_of_means };

inline constexpr std::array<BaselineId, 6> all_baselines{
    BaselineId::mean,         BaselineId::median, BaselineId::trimmed10,
    BaselineId::winsorized10, BaselineId::huber,  BaselineId::median_of_means};

inline std::string_view to_string(BaselineId id) noexcept {
    switch (id) {
        case BaselineId::mean: return "mean";
        case BaselineId::median: return "median";
        case BaselineId::trimmed10: return "trimmed10";
        case BaselineId::winsorized10: return "winsorized10";
        case BaselineId::huber: return "huber";
        case BaselineId::median_of_means: return "median_of_means";
    }
    return "?";
}

inline BaselineId parse_baseline(std::string_view s) {
    for (BaselineId id : all_baselines) {
        if (to_string(id) == s) return id;
    }
    throw invalid_argument("unknown baseline '" + std::string(s) + "'");
}

inline constexpr double huber_default_c = 1.345;

namespace detail {

inline std::size_t trim_count(std::size_t n, double fraction) {
    if (!(fraction >= 0.0 && fraction < 0.5)) throw invalid_argument("trim fraction must lie in [0, 0.5)");
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (2 * k >= n) throw invalid_argument("trimming removes every observation");
    return k;
}

}  // namespace detail

/// Mean after dropping floor(f N) observations from each end.
inline double trimmed_mean(std::span<const double> sample, double fraction) {
    if (sample.empty()) throw invalid_argument("trimmed_mean of empty sample");
    const std::size_t k = detail::trim_count(sample.size(), fraction);
    if (k == 0) return mean_of(sample);
    std::vector<double> v(sample.begin(), sample.end());
    std::sort(v.begin(), v.end());
    const auto first = v.begin() + static_cast<std::ptrdiff_t>(k);
    const auto last = v.end() - static_cast<std::ptrdiff_t>(k);
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

/// Mean after clamping the floor(f N) extremes on each side to the nearest
/// retained order statistic.
inline double winsorized_mean(std::span<const double> sample, double fraction) {
    if (sample.empty()) throw invalid_argument("winsorized_mean of empty sample");
    const std::size_t k = detail::trim_count(sample.size(), fraction);
    if (k == 0) return mean_of(sample);
    std::vector<double> v(sample.begin(), sample.end());
    std::sort(v.begin(), v.end());
    const double lo = v[k];
    const double hi = v[v.size() - 1 - k];
    double s = 0.0;
    for (double x : v) s += std::clamp(x, lo, hi);
    return s / static_cast<double>(v.size());
}

/// Huber M-estimate of location by iterative reweighting with weights
/// min(1, c s / |xi|), s = 1.4826 MAD held fixed.  Starts at the median.
inline double huber_location(std::span<const double> sample, double tuning_c = huber_default_c,
                             int max_iters = 100) {
    if (sample.empty()) throw invalid_argument("huber_location of empty sample");
    if (!(tuning_c > 0.0)) throw invalid_argument("Huber tuning constant must be > 0");
    const double med = median_of(sample);
    const double s = 1.4826 * mad_of(sample);
    if (!(s > 0.0)) return med;
    const double cutoff = tuning_c * s;
    double mu = med;
    for (int it = 0; it < max_iters; ++it) {
        double sw = 0.0, swx = 0.0;
        for (double x : sample) {
            const double d = std::abs(x - mu);
            const double w = d <= cutoff ? 1.0 : cutoff / d;
            sw += w;
            swx += w * x;
        }
        const double next = swx / sw;
        const double step = next - mu;
        mu = next;
        if (std::abs(step) < 1e-9 * s) break;
    }
    return mu;
}

/// Median of the means of `blocks` contiguous groups (sizes differ by at
/// most one; the first N mod blocks groups take the extra element).
inline double median_of_means(std::span<const double> sample, std::size_t blocks) {
    if (sample.empty()) throw invalid_argument("median_of_means of empty sample");
    if (blocks < 1 || blocks > sample.size()) throw invalid_argument("blocks must lie in [1, N]");
    const std::size_t base = sample.size() / blocks;
    const std::size_t extra = sample.size() % blocks;
    std::vector<double> means;
    means.reserve(blocks);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        means.push_back(mean_of(sample.subspan(pos, len)));
        pos += len;
    }
    return median_of(means);
}

inline std::size_t default_mom_blocks(std::size_t n) {
    return std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
}

/// Dispatch with the conventional defaults: 10% trim / winsor, Huber
/// c = 1.345, ceil(sqrt N) median-of-means blocks.
inline double run_baseline(BaselineId id, std::span<const double> sample) {
    if (sample.empty()) throw invalid_argument("run_baseline on empty sample");
    switch (id) {
        case BaselineId::mean: return mean_of(sample);
        case BaselineId::median: return median_of(sample);
        case BaselineId::trimmed10: return trimmed_mean(sample, 0.1);
        case BaselineId::winsorized10: return winsorized_mean(sample, 0.1);
        case BaselineId::huber: return huber_location(sample);
        case BaselineId::median_of_means: return median_of_means(sample, default_mom_blocks(sample.size()));
    }
    throw invalid_argument("unknown baseline");
}

}  // namespace patp
