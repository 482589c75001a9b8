#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::preprocess {

/// A sample flagged as white noise. `alpha` is the spike product
/// (x[i]-x[i+1])*(x[i]-x[i-1]); positive at local extrema.
struct WhiteNoiseMark {
    Index index = 0;
    double alpha = 0.0;
    friend bool operator==(const WhiteNoiseMark&, const WhiteNoiseMark&) = default;
};

struct WhiteNoiseResult {
    Trace trace;
    std::vector<WhiteNoiseMark> marks;
};

enum class BoundaryGaps {
    Reject, // missing runs touching either end raise UnboundedGap
    Keep,   // such runs are left missing for extrapolate_midpoint
};

inline Trace zeros_to_missing(const Trace& trace) {
    TraceEditor edit(trace);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        auto& level = edit.level(i);
        if (level && *level == 0.0) level.reset();
    }
    return std::move(edit).release();
}

/// Fills each interior missing run on the straight line through the known
/// samples that straddle it, using sample indices as the x axis.
inline Trace interpolate_linear(const Trace& trace, BoundaryGaps boundary = BoundaryGaps::Reject) {
    TraceEditor edit(trace);
    const std::size_t n = trace.size();
    std::size_t i = 0;
    while (i < n) {
        if (!trace[i].missing()) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < n && trace[run_end].missing()) ++run_end;
        if (i == 0 || run_end == n) {
            if (boundary == BoundaryGaps::Reject) {
                throw Error(Errc::UnboundedGap, "missing run at sample " + std::to_string(trace[i].index) +
                                                    " touches the trace boundary");
            }
            i = run_end;
            continue;
        }
        const auto& left = trace[i - 1];
        const auto& right = trace[run_end];
        const double x1 = static_cast<double>(left.index);
        const double x2 = static_cast<double>(right.index);
        const double y1 = *left.level;
        const double y2 = *right.level;
        const double slope = (y2 - y1) / (x2 - x1);
        for (std::size_t k = i; k < run_end; ++k) {
            edit.level(k) = y1 + slope * (static_cast<double>(trace[k].index) - x1);
        }
        i = run_end;
    }
    return std::move(edit).release();
}

/// Fills boundary missing runs outward from the known region: each missing
/// sample takes the mean level of the two nearest filled samples, repeated
/// until the run is exhausted. Interior runs are linearly interpolated first.
inline Trace extrapolate_midpoint(const Trace& trace) {
    std::size_t known = trace.size() - trace.missing_count();
    if (known == trace.size()) return trace;
    if (known < 2) {
        throw Error(Errc::InsufficientData, "midpoint extrapolation needs two known samples");
    }
    const Trace interior = interpolate_linear(trace, BoundaryGaps::Keep);
    TraceEditor edit(interior);
    const std::size_t n = interior.size();

    std::size_t first = 0;
    while (interior[first].missing()) ++first;
    for (std::size_t k = first; k-- > 0;) {
        edit.level(k) = 0.5 * (*edit.level(k + 1) + *edit.level(k + 2));
    }
    std::size_t last = n - 1;
    while (interior[last].missing()) --last;
    for (std::size_t k = last + 1; k < n; ++k) {
        edit.level(k) = 0.5 * (*edit.level(k - 1) + *edit.level(k - 2));
    }
    return std::move(edit).release();
}

/// zeros -> interior interpolation -> boundary extrapolation.
inline Trace repair(const Trace& trace) {
    return extrapolate_midpoint(interpolate_linear(zeros_to_missing(trace), BoundaryGaps::Keep));
}

/// Spike product at an interior position, or nullopt where the sample equals
/// one of its neighbours.
inline std::optional<double> spike_alpha(double prev, double cur, double next) {
    if (cur == next || cur == prev) return std::nullopt;
    return (cur - next) * (cur - prev);
}

/// A local extremum (alpha > 0) counts as white noise unless its two
/// neighbours differ by more than `step_guard`: such a sample is the corner
/// of a genuine level step and is kept.
inline bool is_white_noise(double prev, double cur, double next, double step_guard) {
    const auto alpha = spike_alpha(prev, cur, next);
    return alpha && *alpha > 0.0 && std::abs(next - prev) <= step_guard;
}

inline constexpr double kDefaultStepGuard = 4.0;

/// Repeatedly marks white-noise samples, drops them and re-interpolates.
/// Stops early once a pass finds nothing.
inline WhiteNoiseResult remove_white_noise(const Trace& trace, int passes, double step_guard = kDefaultStepGuard) {
    if (passes < 1) throw Error(Errc::PreconditionViolation, "passes must be >= 1");
    if (!trace.filled()) throw Error(Errc::NotFilled, "white-noise removal needs a filled trace");

    WhiteNoiseResult result{trace, {}};
    for (int pass = 0; pass < passes; ++pass) {
        const auto levels = result.trace.levels();
        TraceEditor edit(result.trace);
        bool changed = false;
        for (std::size_t i = 1; i + 1 < levels.size(); ++i) {
            if (!is_white_noise(levels[i - 1], levels[i], levels[i + 1], step_guard)) continue;
            result.marks.push_back({result.trace[i].index, *spike_alpha(levels[i - 1], levels[i], levels[i + 1])});
            edit.level(i).reset();
            changed = true;
        }
        if (!changed) break;
        result.trace = interpolate_linear(std::move(edit).release());
    }
    return result;
}

/// First differences x[i] - x[i-1].
inline std::vector<double> difference_feature(const Trace& trace) {
    if (trace.size() < 2) throw Error(Errc::TooShort, "differencing needs at least two samples");
    const auto levels = trace.levels();
    std::vector<double> out(levels.size() - 1);
    for (std::size_t i = 1; i < levels.size(); ++i) out[i - 1] = levels[i] - levels[i - 1];
    return out;
}

} // namespace fuelclean::preprocess
