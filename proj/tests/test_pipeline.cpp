#include <cmath>

#include <gtest/gtest.h>

#include "fuelclean/pipeline.hpp"
#include "fuelclean/synth.hpp"
#include "test_support.hpp"

using namespace fuelclean;

namespace {

std::vector<double> single_refill(std::size_t n, std::size_t at, double volume) {
    std::vector<double> v(n);
    v[0] = 45.0;
    for (std::size_t i = 1; i < n; ++i) v[i] = i == at ? v[i - 1] + volume : v[i - 1] - 0.004;
    return v;
}

} // namespace

TEST(Pipeline, NoiselessSingleRefill) {
    const auto r = run_pipeline(Trace::from_levels(single_refill(6000, 3000, 17.77)), PipelineConfig{});
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_NEAR(r.events[0].detected_volume, 17.77, 1e-6);
    EXPECT_LE(std::abs(static_cast<long>(r.events[0].start_index) - 2999), 2);
}

TEST(Pipeline, ConstantTraceHasNoEvents) {
    const auto r = run_pipeline(Trace::from_levels(std::vector<double>(3000, 20.0)), PipelineConfig{});
    EXPECT_TRUE(r.events.empty());
    EXPECT_TRUE(r.segments.empty());
}

TEST(Pipeline, MassBalanceOnNoiselessTraces) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto truth = synth::generate_clean(20000, 80.0, 7, seed);
        const auto r = run_pipeline(Trace::from_levels(truth.clean_signal), PipelineConfig{});
        double consumed = 0.0, refilled = 0.0;
        for (const auto& s : r.segments) consumed += s.consumed_volume;
        for (const auto& e : r.events) refilled += e.detected_volume;
        const double drift = truth.clean_signal.back() - truth.clean_signal.front();
        EXPECT_NEAR(consumed + drift, refilled, 0.5) << "seed " << seed;
    }
}

TEST(Pipeline, StageSeriesMatchInputLength) {
    const auto truth = synth::generate_clean(8000, 80.0, 3, 5);
    synth::NoiseProfile p;
    p.seed = 6;
    const auto trace = synth::corrupt(truth, p);
    const auto r = run_pipeline(trace, PipelineConfig{});
    for (const auto* s : {&r.stages.preprocessed, &r.stages.clustered, &r.stages.wavelet, &r.stages.median,
                          &r.stages.final}) {
        EXPECT_EQ(s->size(), trace.size());
    }
}

TEST(Pipeline, KeepsSampleIndices) {
    const auto v = single_refill(4000, 2000, 20.0);
    std::vector<Sample> s;
    for (std::size_t i = 0; i < v.size(); ++i) s.push_back({1000 + 3 * static_cast<Index>(i), v[i]});
    const auto r = run_pipeline(Trace(s), PipelineConfig{});
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].start_index, 1000u + 3u * 1999u);
}

TEST(Pipeline, TooShort) {
    EXPECT_ERRC(run_pipeline(Trace::from_levels(std::vector<double>{1, 2}), PipelineConfig{}), Errc::TooShort);
}

TEST(Pipeline, InvalidConfig) {
    PipelineConfig c;
    c.median_window = 4;
    EXPECT_ERRC(run_pipeline(Trace::from_levels(std::vector<double>(100, 1.0)), c), Errc::InvalidConfig);
}

TEST(Pipeline, Deterministic) {
    const auto truth = synth::generate_clean(10000, 80.0, 4, 8);
    synth::NoiseProfile p;
    p.seed = 9;
    const auto trace = synth::corrupt(truth, p);
    const auto a = run_pipeline(trace, PipelineConfig{});
    const auto b = run_pipeline(trace, PipelineConfig{});
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.segments, b.segments);
    EXPECT_EQ(a.stages.final, b.stages.final);
}

TEST(Pipeline, ValidationStagesNarrow) {
    const auto truth = synth::generate_clean(20000, 80.0, 7, 10);
    synth::NoiseProfile p;
    p.seed = 11;
    const auto r = run_pipeline(synth::corrupt(truth, p), PipelineConfig{});
    EXPECT_LE(r.first_validation.size(), std::min(r.branches[0].peaks.size(), r.branches[1].peaks.size()));
    EXPECT_LE(r.second_validation.size(), std::min(r.branches[2].peaks.size(), r.branches[3].peaks.size()));
    EXPECT_LE(r.validated.size(), std::min(r.first_validation.size(), r.second_validation.size()));
    EXPECT_LE(r.final_peaks.size(), r.validated.size());
    EXPECT_EQ(r.events.size(), r.final_peaks.size());
}
