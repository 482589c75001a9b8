#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuelclean/error.hpp"

namespace fuelclean {

using Index = std::uint64_t;

/// One sensor reading. An empty `level` is the "missing" marker, distinct
/// from a literal 0.0 reading.
struct Sample {
    Index index = 0;
    std::optional<double> level;

    bool missing() const noexcept { return !level.has_value(); }
    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered fuel-level readings for one vehicle. Indices are strictly
/// increasing; constructing through `Trace::from_*` enforces that.
class Trace {
public:
    Trace() = default;

    explicit Trace(std::vector<Sample> samples, std::string vehicle_id = {})
        : samples_(std::move(samples)), vehicle_id_(std::move(vehicle_id)) {
        for (std::size_t i = 1; i < samples_.size(); ++i) {
            if (samples_[i].index <= samples_[i - 1].index) {
                throw Error(Errc::NonMonotoneIndex,
                            "sample index " + std::to_string(samples_[i].index) +
                                " does not increase");
            }
        }
    }

    /// Samples at ordinals 0..n-1.
    static Trace from_levels(std::span<const double> levels, std::string vehicle_id = {}) {
        std::vector<Sample> samples(levels.size());
        for (std::size_t i = 0; i < levels.size(); ++i) {
            samples[i] = Sample{static_cast<Index>(i), levels[i]};
        }
        return Trace(std::move(samples), std::move(vehicle_id));
    }

    /// Same index set as `like`, new levels. Sizes must agree.
    static Trace with_levels(const Trace& like, std::span<const double> levels) {
        if (levels.size() != like.size()) {
            throw Error(Errc::ShapeMismatch, "level count does not match trace length");
        }
        std::vector<Sample> samples = like.samples_;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            samples[i].level = levels[i];
        }
        Trace out;
        out.samples_ = std::move(samples);
        out.vehicle_id_ = like.vehicle_id_;
        return out;
    }

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const std::string& vehicle_id() const noexcept { return vehicle_id_; }

    std::size_t missing_count() const noexcept {
        std::size_t count = 0;
        for (const auto& s : samples_) count += s.missing() ? 1 : 0;
        return count;
    }
    bool filled() const noexcept { return missing_count() == 0; }

    /// Levels of a fully filled trace; throws NotFilled otherwise.
    std::vector<double> levels() const {
        std::vector<double> out;
        out.reserve(samples_.size());
        for (const auto& s : samples_) {
            if (s.missing()) {
                throw Error(Errc::NotFilled,
                            "sample " + std::to_string(s.index) + " is missing");
            }
            out.push_back(*s.level);
        }
        return out;
    }

    std::vector<Index> indices() const {
        std::vector<Index> out;
        out.reserve(samples_.size());
        for (const auto& s : samples_) out.push_back(s.index);
        return out;
    }

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    friend class TraceEditor;
    std::vector<Sample> samples_;
    std::string vehicle_id_;
};

/// Mutable view over a trace's levels, used by repair stages that only
/// touch levels and never reorder indices.
class TraceEditor {
public:
    explicit TraceEditor(Trace trace) : trace_(std::move(trace)) {}
    std::optional<double>& level(std::size_t i) { return trace_.samples_[i].level; }
    const Trace& view() const noexcept { return trace_; }
    Trace release() && { return std::move(trace_); }

private:
    Trace trace_;
};

/// A detected upward step. `index` is the last sample before the jump,
/// `stop_index` the sample where the level stabilized.
struct CandidatePeak {
    Index index = 0;
    double pre_level = 0.0;
    double post_level = 0.0;
    Index stop_index = 0;

    double rise() const noexcept { return post_level - pre_level; }
    friend bool operator==(const CandidatePeak&, const CandidatePeak&) = default;
};

struct RefillEvent {
    Index start_index = 0;
    Index stop_index = 0;
    double detected_volume = 0.0;
    friend bool operator==(const RefillEvent&, const RefillEvent&) = default;
};

struct ConsumptionSegment {
    Index from_index = 0;
    Index to_index = 0;
    double consumed_volume = 0.0;
    friend bool operator==(const ConsumptionSegment&, const ConsumptionSegment&) = default;
};

struct TruthRefill {
    Index index = 0;
    double volume = 0.0;
    friend bool operator==(const TruthRefill&, const TruthRefill&) = default;
};

/// Labels for a synthetic trace: the clean signal it was derived from,
/// the injected refills and the engine-off plateaus ([start, stop]).
struct GroundTruth {
    std::vector<double> clean_signal;
    std::vector<TruthRefill> refills;
    std::vector<std::pair<Index, Index>> plateaus;
};

/// All thresholds and windows of the pipeline.
struct PipelineConfig {
    int white_noise_passes = 2;
    double cluster_threshold_T = 0.1;
    std::size_t cluster_window = 200;
    std::size_t cluster_window_step = 200;
    // sigma == T goes to agglomerative unless this is set.
    bool cluster_tie_spectral = false;
    double wavelet_alpha = 1.0;
    int wavelet_levels = 4;
    std::size_t median_window = 5;
    double peak_deviation = 4.0;
    // Samples in the line fit behind each pre/post level.
    std::size_t level_span = 8;
    Index match_tolerance = 100;
    Index final_distance = 30;
    double final_difference = 5.0;
    std::size_t max_lag = 6000;

    void validate() const {
        auto bad = [](const std::string& key, const std::string& why) {
            throw Error(Errc::InvalidConfig, key + ": " + why);
        };
        if (white_noise_passes < 1) bad("white_noise_passes", "must be >= 1");
        if (!(cluster_threshold_T >= 0.0) || !std::isfinite(cluster_threshold_T))
            bad("cluster_threshold_T", "must be a finite non-negative number");
        if (cluster_window < 1) bad("cluster_window", "must be positive");
        if (cluster_window_step < 1) bad("cluster_window_step", "must be positive");
        if (!std::isfinite(wavelet_alpha) || wavelet_alpha < 0.0)
            bad("wavelet_alpha", "must be a finite non-negative number");
        if (wavelet_levels < 1) bad("wavelet_levels", "must be >= 1");
        if (median_window < 3 || median_window % 2 == 0)
            bad("median_window", "must be odd and >= 3");
        if (!(peak_deviation > 0.0) || !std::isfinite(peak_deviation))
            bad("peak_deviation", "must be positive");
        if (level_span < 1) bad("level_span", "must be >= 1");
        if (!(final_difference >= 0.0) || !std::isfinite(final_difference))
            bad("final_difference", "must be non-negative");
    }
};

} // namespace fuelclean
