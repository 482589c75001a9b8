#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::peaks {

enum class Branch {
    Cluster,
    ClusterWavelet,
    ClusterMedian,
    ClusterMedianWavelet,
};

inline std::string_view to_string(Branch b) {
    switch (b) {
    case Branch::Cluster: return "cluster";
    case Branch::ClusterWavelet: return "cluster+wavelet";
    case Branch::ClusterMedian: return "cluster+median";
    case Branch::ClusterMedianWavelet: return "cluster+median+wavelet";
    }
    return "?";
}

inline bool has_wavelet(Branch b) { return b == Branch::ClusterWavelet || b == Branch::ClusterMedianWavelet; }

struct BranchOutput {
    Branch branch = Branch::Cluster;
    std::vector<CandidatePeak> peaks;
    bool shift_compensated = false;
};

/// Mean of values[i-1], values[i], values[i+1].
inline double sma3(std::span<const double> values, std::size_t i) {
    if (i < 1 || i + 1 >= values.size()) {
        throw Error(Errc::IndexOutOfRange, "sma3 needs an interior index, got " + std::to_string(i));
    }
    return (values[i - 1] + values[i] + values[i + 1]) / 3.0;
}

inline bool is_rise_point(std::span<const double> values, std::size_t i, double deviation) {
    return values[i + 1] - sma3(values, i) > deviation;
}

/// Level at `at` from a least-squares line through values[lo..hi]
/// (inclusive). A single sample is returned as is.
inline double fitted_level(std::span<const double> values, std::size_t lo, std::size_t hi, std::size_t at) {
    const std::size_t m = hi - lo + 1;
    const double base = values[lo];
    if (m == 1) return base;
    // Offsets from the first sample keep constant runs exact.
    double sy = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sy += values[k] - base;
    const double mx = static_cast<double>(m - 1) / 2.0;
    const double my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const double dx = static_cast<double>(k - lo) - mx;
        sxx += dx * dx;
        sxy += dx * (values[k] - base - my);
    }
    return base + my + (sxy / sxx) * (static_cast<double>(at - lo) - mx);
}

/// Upward-step candidates. i is a rise point when the next sample exceeds
/// the centred 3-point average by more than `deviation`. A candidate starts
/// at the first rise point of a run, takes its pre level there, and ends at
/// the first sample j >= max(first + 1, last rise) whose 3-sample span
/// varies by less than `deviation`. Rise points before j are absorbed.
/// Levels are read from a line fit over `level_span` samples ending at
/// the first rise point (pre) and starting at j (post).
/// Ordinals are positions in `values`; callers map them to sample indices.
inline std::vector<CandidatePeak> detect_peaks(std::span<const double> values, double deviation,
                                               std::size_t level_span = 1) {
    if (values.size() < 3) throw Error(Errc::TooShort, "peak detection needs at least three samples");
    if (!(deviation > 0.0)) throw Error(Errc::PreconditionViolation, "deviation must be positive");
    if (level_span < 1) throw Error(Errc::PreconditionViolation, "level_span must be >= 1");

    const std::size_t n = values.size();
    auto stable_at = [&](std::size_t j) {
        if (j + 2 >= n) return true;
        const auto [lo, hi] = std::minmax({values[j], values[j + 1], values[j + 2]});
        return hi - lo < deviation;
    };

    std::vector<CandidatePeak> out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!is_rise_point(values, i, deviation)) {
            ++i;
            continue;
        }
        const std::size_t first = i;
        std::size_t last = i;
        while (last + 2 < n && is_rise_point(values, last + 1, deviation)) ++last;
        std::size_t j = std::max(first + 1, last);
        while (!stable_at(j)) ++j;
        j = std::min(j, n - 1);

        const double pre = fitted_level(values, first + 1 >= level_span ? first + 1 - level_span : 0, first, first);
        const double post = fitted_level(values, j, std::min(n - 1, j + level_span - 1), j);
        if (post - pre > 0.0) {
            out.push_back({static_cast<Index>(first), pre, post, static_cast<Index>(j)});
        }
        i = std::max(j, last + 1);
    }
    return out;
}

/// Keeps the peaks of `a` that have a partner in `b` within `tolerance`
/// index units. Each peak of `a`, in order, claims the nearest unclaimed
/// peak of `b` (lower index on ties); a claim farther than the tolerance
/// is dropped and leaves the `b` peak available.
inline std::vector<CandidatePeak> validate_cross_branch(const BranchOutput& a, const BranchOutput& b,
                                                        Index tolerance) {
    std::vector<bool> taken(b.peaks.size(), false);
    std::vector<CandidatePeak> kept;
    for (const auto& p : a.peaks) {
        std::size_t best = b.peaks.size();
        Index best_dist = 0;
        for (std::size_t k = 0; k < b.peaks.size(); ++k) {
            if (taken[k]) continue;
            const Index q = b.peaks[k].index;
            const Index dist = q > p.index ? q - p.index : p.index - q;
            if (best == b.peaks.size() || dist < best_dist) {
                best = k;
                best_dist = dist;
            }
        }
        if (best < b.peaks.size() && best_dist <= tolerance) {
            taken[best] = true;
            kept.push_back(p);
        }
    }
    return kept;
}

/// Single left-to-right pass over consecutive triples (previous, current,
/// next) of surviving peaks. With A = prev - cur and B = cur - next on
/// post levels, the current peak is dropped when both index gaps are below
/// `distance` and |A - B| is below `difference`.
inline std::vector<CandidatePeak> validate_final(const std::vector<CandidatePeak>& peaks, Index distance,
                                                 double difference) {
    if (peaks.size() < 3) return peaks;
    std::vector<CandidatePeak> out{peaks.front()};
    for (std::size_t i = 1; i + 1 < peaks.size(); ++i) {
        const auto& prev = out.back();
        const auto& cur = peaks[i];
        const auto& next = peaks[i + 1];
        const double a = prev.post_level - cur.post_level;
        const double b = cur.post_level - next.post_level;
        const bool close = cur.index - prev.index < distance && next.index - cur.index < distance;
        if (close && std::abs(a - b) < difference) continue;
        out.push_back(cur);
    }
    out.push_back(peaks.back());
    return out;
}

inline std::vector<RefillEvent> to_events(const std::vector<CandidatePeak>& peaks) {
    std::vector<RefillEvent> events;
    events.reserve(peaks.size());
    for (const auto& p : peaks) events.push_back({p.index, p.stop_index, p.rise()});
    return events;
}

/// Level drops around refills: first sample to the first refill, between
/// consecutive refills (post level of one to pre level of the next) and
/// from the last refill to the final sample. No refills, no segments.
/// `levels[k]` is the level at sample index `indices[k]`.
inline std::vector<ConsumptionSegment> consumption_segments(const std::vector<CandidatePeak>& refills,
                                                            std::span<const Index> indices,
                                                            std::span<const double> levels) {
    std::vector<ConsumptionSegment> out;
    if (refills.empty() || levels.empty()) return out;
    auto emit = [&](Index from, double from_level, Index to, double to_level) {
        if (from < to) out.push_back({from, to, std::max(0.0, from_level - to_level)});
    };
    emit(indices.front(), levels.front(), refills.front().index, refills.front().pre_level);
    for (std::size_t k = 0; k + 1 < refills.size(); ++k) {
        emit(refills[k].stop_index, refills[k].post_level, refills[k + 1].index, refills[k + 1].pre_level);
    }
    emit(refills.back().stop_index, refills.back().post_level, indices.back(), levels.back());
    return out;
}

} // namespace fuelclean::peaks
