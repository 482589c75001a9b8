#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "fuelclean/clustering.hpp"
#include "fuelclean/error.hpp"
#include "fuelclean/median_filter.hpp"
#include "fuelclean/peaks.hpp"
#include "fuelclean/preprocess.hpp"
#include "fuelclean/types.hpp"
#include "fuelclean/wavelet.hpp"

namespace fuelclean {

/// Per-stage series, aligned with the input trace's indices.
struct StageSeries {
    std::vector<double> preprocessed;
    std::vector<double> clustered;
    std::vector<double> wavelet;   // cluster + wavelet, shift compensated
    std::vector<double> median;    // cluster + median
    std::vector<double> final;     // cluster + median + wavelet, shift compensated
};

struct PipelineResult {
    std::vector<RefillEvent> events;
    std::vector<ConsumptionSegment> segments;

    std::array<peaks::BranchOutput, 4> branches;
    std::vector<CandidatePeak> first_validation;
    std::vector<CandidatePeak> second_validation;
    std::vector<CandidatePeak> validated;
    std::vector<CandidatePeak> final_peaks;
    long wavelet_lag = 0;
    long median_wavelet_lag = 0;

    StageSeries stages;
    std::vector<preprocess::WhiteNoiseMark> white_noise;
    std::vector<clustering::WindowReport> windows;
};

namespace pipeline_detail {

inline peaks::BranchOutput detect_branch(peaks::Branch branch, std::span<const double> series,
                                         std::span<const Index> indices, double deviation,
                                         std::size_t level_span) {
    peaks::BranchOutput out{branch, peaks::detect_peaks(series, deviation, level_span), peaks::has_wavelet(branch)};
    for (auto& p : out.peaks) {
        p.index = indices[static_cast<std::size_t>(p.index)];
        p.stop_index = indices[static_cast<std::size_t>(p.stop_index)];
    }
    return out;
}

} // namespace pipeline_detail

/// Repair and white-noise removal, hybrid clustering, then four detection
/// branches over the clustered series: plain, wavelet, median, and
/// median + wavelet. Peaks survive when the plain/wavelet pair and the
/// median/median+wavelet pair both confirm them, and then pass the final
/// triple rule. Levels come from the plain (clustered) branch.
inline PipelineResult run_pipeline(const Trace& trace, const PipelineConfig& config) {
    config.validate();
    if (trace.size() < 3) throw Error(Errc::TooShort, "pipeline needs at least three samples");

    PipelineResult r;
    const auto indices = trace.indices();

    auto cleaned = preprocess::remove_white_noise(preprocess::repair(trace), config.white_noise_passes,
                                                config.peak_deviation);
    r.white_noise = std::move(cleaned.marks);
    r.stages.preprocessed = cleaned.trace.levels();

    auto clustered = clustering::hybrid_cluster(cleaned.trace, config);
    r.windows = std::move(clustered.windows);
    r.stages.clustered = clustered.trace.levels();
    const auto& base = r.stages.clustered;

    const std::size_t max_lag = std::min(config.max_lag, (base.size() - 1) / 2);
    const auto wavelet_raw = wavelet::denoise(base, config);
    r.wavelet_lag = wavelet::align_shift(base, wavelet_raw, max_lag);
    r.stages.wavelet = wavelet::shift_back(wavelet_raw, r.wavelet_lag);

    r.stages.median = median_filter(base, config.median_window);
    const auto median_wavelet_raw = wavelet::denoise(r.stages.median, config);
    r.median_wavelet_lag = wavelet::align_shift(r.stages.median, median_wavelet_raw, max_lag);
    r.stages.final = wavelet::shift_back(median_wavelet_raw, r.median_wavelet_lag);

    using peaks::Branch;
    using pipeline_detail::detect_branch;
    r.branches = {
        detect_branch(Branch::Cluster, base, indices, config.peak_deviation, config.level_span),
        detect_branch(Branch::ClusterWavelet, r.stages.wavelet, indices, config.peak_deviation, config.level_span),
        detect_branch(Branch::ClusterMedian, r.stages.median, indices, config.peak_deviation, config.level_span),
        detect_branch(Branch::ClusterMedianWavelet, r.stages.final, indices, config.peak_deviation, config.level_span),
    };

    r.first_validation = peaks::validate_cross_branch(r.branches[0], r.branches[1], config.match_tolerance);
    r.second_validation = peaks::validate_cross_branch(r.branches[2], r.branches[3], config.match_tolerance);
    r.validated = peaks::validate_cross_branch({Branch::Cluster, r.first_validation, false},
                                               {Branch::ClusterMedian, r.second_validation, false},
                                               config.match_tolerance);
    r.final_peaks = peaks::validate_final(r.validated, config.final_distance, config.final_difference);

    r.events = peaks::to_events(r.final_peaks);
    r.segments = peaks::consumption_segments(r.final_peaks, indices, base);
    return r;
}

} // namespace fuelclean
