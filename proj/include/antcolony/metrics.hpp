#pragma once

// Local heterogeneity measures comparing two 3x3 intensity windows.
//
// Two measures are provided:
//  * an ordinal one built on the Ulam distance between rank permutations, and
//  * a statistical one mixing mean, variance and histogram differences.
// Both are mapped onto a [0,1] score where 0 means "the windows agree".

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ranges>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "antcolony/habitat.hpp"

namespace antcolony {

inline constexpr std::size_t kWindowSize = 9;

/// Ranks 1..9, positionally aligned with Window9.
using RankPermutation = std::array<std::uint8_t, kWindowSize>;

inline constexpr RankPermutation kIdentityPermutation{1, 2, 3, 4, 5, 6, 7, 8, 9};

inline bool is_permutation_of_1_to_9(const RankPermutation& p) noexcept {
    std::array<bool, kWindowSize + 1> seen{};
    for (auto v : p) {
        if (v < 1 || v > kWindowSize || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

/// Rank of each pixel within its window. Ties resolve in raster order, so the
/// result is always a permutation of 1..9.
inline RankPermutation rank_window(const Window9& w) noexcept {
    RankPermutation ranks{};
    for (std::size_t i = 0; i < kWindowSize; ++i) {
        std::uint8_t r = 1;
        for (std::size_t j = 0; j < kWindowSize; ++j) {
            if (w[j] < w[i] || (w[j] == w[i] && j < i)) ++r;
        }
        ranks[i] = r;
    }
    return ranks;
}

/// s[i] = rank in the second window of the pixel holding rank i+1 in the first.
inline RankPermutation compose(const RankPermutation& first, const RankPermutation& second) {
    RankPermutation s{};
    for (std::size_t j = 0; j < kWindowSize; ++j) {
        const auto rank = first[j];
        if (rank < 1 || rank > kWindowSize) throw std::invalid_argument("compose: not a permutation");
        s[rank - 1] = second[j];
    }
    return s;
}

/// Length of the longest strictly increasing subsequence (patience sorting).
template <std::ranges::input_range R>
    requires std::totally_ordered<std::ranges::range_value_t<R>>
std::size_t longest_increasing_subsequence(R&& seq) {
    using T = std::ranges::range_value_t<R>;
    std::vector<T> tails;
    for (const T& v : seq) {
        auto it = std::lower_bound(tails.begin(), tails.end(), v);
        if (it == tails.end()) {
            tails.push_back(v);
        } else {
            *it = v;
        }
    }
    return tails.size();
}

inline std::size_t lis_length(const RankPermutation& p) { return longest_increasing_subsequence(p); }

struct UlamCorrelation {
    RankPermutation ranks1{};
    RankPermutation ranks2{};
    RankPermutation composition{};  // s
    RankPermutation reversed{};     // s*, s read back to front
    int delta1 = 0;                 // Ulam distance of s to the identity
    int delta2 = 0;                 // Ulam distance of s to the reverse identity
    double tau_u = 0.0;
    double tau_r = 0.0;
    double tau = 0.0;
};

inline UlamCorrelation ulam_tau(const Window9& w1, const Window9& w2) {
    constexpr int n = static_cast<int>(kWindowSize);
    UlamCorrelation u;
    u.ranks1 = rank_window(w1);
    u.ranks2 = rank_window(w2);
    u.composition = compose(u.ranks1, u.ranks2);
    std::ranges::reverse_copy(u.composition, u.reversed.begin());
    u.delta1 = n - static_cast<int>(lis_length(u.composition));
    u.delta2 = n - static_cast<int>(lis_length(u.reversed));
    u.tau_u = 1.0 - 2.0 * u.delta1 / (n - 1);
    u.tau_r = 1.0 - 2.0 * u.delta2 / (n - 1);
    u.tau = (u.tau_u - u.tau_r) / 2.0;
    return u;
}

/// Non-negative (a, b, c) weights of the statistical measure, stored normalised
/// so that a + b + c = 1.
class MetricWeights {
public:
    MetricWeights() = default;

    static MetricWeights normalized(double a, double b, double c) {
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c)) || a < 0 || b < 0 || c < 0) {
            throw std::invalid_argument("metric weights must be finite and non-negative");
        }
        const double sum = a + b + c;
        if (!(sum > 0.0)) throw std::invalid_argument("metric weights must not all be zero");
        MetricWeights w;
        w.a_ = a / sum;
        w.b_ = b / sum;
        w.c_ = c / sum;
        return w;
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }

    friend bool operator==(const MetricWeights&, const MetricWeights&) = default;

private:
    double a_ = 1.0 / 3.0;
    double b_ = 1.0 / 3.0;
    double c_ = 1.0 / 3.0;
};

// Worst cases over 8-bit 9-pixel windows.
inline constexpr double kMaxMeanDiff = 255.0;
inline constexpr double kMaxVarianceDiff = 127.5 * 127.5;
inline constexpr double kMaxHistogramDiff = 2.0 * kWindowSize;

struct StatDelta {
    double mean1 = 0.0, mean2 = 0.0;
    double variance1 = 0.0, variance2 = 0.0;  // population variance
    int histogram_diff = 0;                   // S
    double mean_term = 0.0;                   // |m1 - m2| / 255
    double variance_term = 0.0;               // |v1 - v2| / 127.5^2
    double histogram_term = 0.0;              // S / 18
    double value = 0.0;
};

/// Statistical heterogeneity between two windows, in [0,1].
inline StatDelta stat_delta(const Window9& w1, const Window9& w2, const MetricWeights& wt) {
    constexpr std::int64_t n = kWindowSize;
    // Integer moments keep every term exact and symmetric in (w1, w2).
    std::int64_t sum1 = 0, sum2 = 0, sq1 = 0, sq2 = 0;
    for (std::size_t i = 0; i < kWindowSize; ++i) {
        sum1 += w1[i];
        sum2 += w2[i];
        sq1 += std::int64_t{w1[i]} * w1[i];
        sq2 += std::int64_t{w2[i]} * w2[i];
    }
    // n^2 * variance
    const std::int64_t scaled_var1 = n * sq1 - sum1 * sum1;
    const std::int64_t scaled_var2 = n * sq2 - sum2 * sum2;

    Window9 s1 = w1, s2 = w2;
    std::ranges::sort(s1);
    std::ranges::sort(s2);
    int common = 0;
    for (std::size_t i = 0, j = 0; i < kWindowSize && j < kWindowSize;) {
        if (s1[i] == s2[j]) {
            ++common, ++i, ++j;
        } else if (s1[i] < s2[j]) {
            ++i;
        } else {
            ++j;
        }
    }

    StatDelta d;
    d.mean1 = static_cast<double>(sum1) / n;
    d.mean2 = static_cast<double>(sum2) / n;
    d.variance1 = static_cast<double>(scaled_var1) / (n * n);
    d.variance2 = static_cast<double>(scaled_var2) / (n * n);
    d.histogram_diff = 2 * (static_cast<int>(n) - common);
    d.mean_term = static_cast<double>(std::llabs(sum1 - sum2)) / (n * kMaxMeanDiff);
    d.variance_term =
        static_cast<double>(std::llabs(scaled_var1 - scaled_var2)) / (n * n * kMaxVarianceDiff);
    d.histogram_term = d.histogram_diff / kMaxHistogramDiff;
    d.value = (wt.a() * d.mean_term + wt.b() * d.variance_term + wt.c() * d.histogram_term) /
              (wt.a() + wt.b() + wt.c());
    return d;
}

enum class Metric { Statistical, Ulam };

inline Metric parse_metric(std::string_view name) {
    if (name == "stat" || name == "statistical") return Metric::Statistical;
    if (name == "ulam") return Metric::Ulam;
    throw std::invalid_argument("unknown metric '" + std::string(name) + "' (expected stat or ulam)");
}

inline std::string_view metric_name(Metric m) noexcept {
    return m == Metric::Ulam ? "ulam" : "stat";
}

struct HeterogeneityScore {
    double value = 0.0;             // in [0,1]
    std::optional<double> raw_tau;  // ordinal metric only
};

/// Unified score: statistical value as-is, ordinal as (1 - tau) / 2.
inline HeterogeneityScore heterogeneity(const Window9& w1, const Window9& w2, Metric metric,
                                        const MetricWeights& wt) {
    if (metric == Metric::Ulam) {
        const double tau = ulam_tau(w1, w2).tau;
        return {(1.0 - tau) / 2.0, tau};
    }
    return {stat_delta(w1, w2, wt).value, std::nullopt};
}

}  // namespace antcolony
