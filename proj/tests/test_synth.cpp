#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "fuelclean/synth.hpp"
#include "test_support.hpp"

using namespace fuelclean;
using namespace fuelclean::synth;

TEST(GenerateClean, NoRefillsIsNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = generate_clean(5000, 80.0, 0, seed);
        EXPECT_TRUE(t.refills.empty());
        for (std::size_t i = 1; i < t.clean_signal.size(); ++i) EXPECT_LE(t.clean_signal[i], t.clean_signal[i - 1]);
    }
}

TEST(GenerateClean, DeterministicPerSeed) {
    const auto a = generate_clean(20000, 80.0, 7, 42);
    const auto b = generate_clean(20000, 80.0, 7, 42);
    EXPECT_EQ(a.clean_signal, b.clean_signal);
    EXPECT_EQ(a.refills, b.refills);
    EXPECT_EQ(a.plateaus, b.plateaus);
    EXPECT_NE(generate_clean(20000, 80.0, 7, 43).clean_signal, a.clean_signal);
}

TEST(GenerateClean, DatasetScale) {
    const auto t = generate_clean(100000, 80.0, 37, 7);
    EXPECT_EQ(t.clean_signal.size(), 100000u);
    EXPECT_EQ(t.refills.size(), 37u);
}

TEST(GenerateClean, Invariants) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const double tank = 80.0;
        const auto t = generate_clean(30000, tank, 11, seed);
        std::set<Index> refill_at;
        for (const auto& r : t.refills) {
            refill_at.insert(r.index);
            EXPECT_GT(r.volume, 0.0);
            EXPECT_EQ(t.clean_signal[r.index] - t.clean_signal[r.index - 1], r.volume);
        }
        for (std::size_t i = 0; i < t.clean_signal.size(); ++i) {
            EXPECT_GE(t.clean_signal[i], 0.0);
            EXPECT_LE(t.clean_signal[i], tank);
            if (i > 0 && !refill_at.count(i)) {
                EXPECT_LE(t.clean_signal[i], t.clean_signal[i - 1]);
            }
        }
        for (const auto& [start, stop] : t.plateaus) {
            for (Index i = start + 1; i <= stop; ++i) EXPECT_EQ(t.clean_signal[i], t.clean_signal[start]);
        }
    }
}

TEST(GenerateClean, Preconditions) {
    EXPECT_ERRC(generate_clean(999, 80.0, 1, 0), Errc::PreconditionViolation);
    EXPECT_ERRC(generate_clean(5000, 0.0, 1, 0), Errc::PreconditionViolation);
    EXPECT_ERRC(generate_clean(5000, 5.0, 1, 0), Errc::InfeasibleSchedule);
    EXPECT_ERRC(generate_clean(5000, 80.0, 500, 0), Errc::InfeasibleSchedule);
}

TEST(Corrupt, NoiseFreeIsIdentity) {
    const auto t = generate_clean(5000, 80.0, 3, 1);
    EXPECT_EQ(corrupt(t, NoiseProfile::none(9)).levels(), t.clean_signal);
}

TEST(Corrupt, AllZeros) {
    const auto t = generate_clean(5000, 80.0, 3, 1);
    auto p = NoiseProfile::none(2);
    p.zero_prob = 1.0;
    for (double v : corrupt(t, p).levels()) EXPECT_EQ(v, 0.0);
}

TEST(Corrupt, WhiteNoiseSpread) {
    const auto t = generate_clean(10000, 80.0, 5, 3);
    NoiseProfile p;
    p.seed = 4;
    const auto c = corrupt_detailed(t, p);
    std::vector<bool> skip(t.clean_signal.size(), false);
    for (auto i : c.log.spikes) skip[i] = true;
    for (auto i : c.log.zeros) skip[i] = true;
    for (const auto& [a, b] : c.log.stuck) {
        for (std::size_t i = a; i < b; ++i) skip[i] = true;
    }
    const auto levels = c.trace.levels();
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (skip[i]) continue;
        const double r = levels[i] - t.clean_signal[i];
        sum += r;
        sq += r * r;
        ++count;
    }
    const double mean = sum / static_cast<double>(count);
    const double sd = std::sqrt(sq / static_cast<double>(count) - mean * mean);
    EXPECT_GE(sd, 0.45);
    EXPECT_LE(sd, 0.55);
}

TEST(Corrupt, DeterministicPerSeed) {
    const auto t = generate_clean(10000, 80.0, 5, 3);
    NoiseProfile p;
    p.seed = 11;
    EXPECT_EQ(corrupt(t, p), corrupt(t, p));
    auto q = p;
    q.seed = 12;
    EXPECT_NE(corrupt(t, p), corrupt(t, q));
    EXPECT_EQ(corrupt(t, p).size(), t.clean_signal.size());
}

TEST(Corrupt, InvalidProfile) {
    const auto t = generate_clean(2000, 80.0, 1, 3);
    NoiseProfile p;
    p.spike_prob = 1.5;
    EXPECT_ERRC(corrupt(t, p), Errc::PreconditionViolation);
    p = NoiseProfile{};
    p.white_sigma = -1.0;
    EXPECT_ERRC(corrupt(t, p), Errc::PreconditionViolation);
}
