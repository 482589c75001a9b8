#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::synth {

/// Sensor failure modes layered on a clean trace. Spike and zero
/// probabilities are per sample; stuck_prob is per block of
/// `stuck_block` samples.
struct NoiseProfile {
    double white_sigma = 0.5;
    double spike_prob = 0.005;
    double spike_max = 20.0;
    double stuck_prob = 0.02;
    std::size_t stuck_len_min = 50;
    std::size_t stuck_len_max = 500;
    double zero_prob = 0.002;
    std::uint64_t seed = 0;

    static constexpr std::size_t stuck_block = 1000;

    static NoiseProfile none(std::uint64_t seed = 0) {
        return {0.0, 0.0, 0.0, 0.0, 50, 500, 0.0, seed};
    }

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!prob(spike_prob) || !prob(stuck_prob) || !prob(zero_prob)) {
            throw Error(Errc::PreconditionViolation, "noise probabilities must lie in [0, 1]");
        }
        if (!(white_sigma >= 0.0) || !(spike_max >= 0.0) || stuck_len_min > stuck_len_max) {
            throw Error(Errc::PreconditionViolation, "noise magnitudes must be non-negative");
        }
    }
};

/// Shape of the clean schedule.
struct ScheduleLimits {
    double min_refill = 8.0;
    double max_refill_fraction = 0.8;
    double min_slope = 0.0005;
    double max_slope = 0.05;
    std::size_t refill_spacing = 250;
    std::size_t edge_margin = 250;
    double plateau_fraction = 0.2;
    // Minimum distance between a plateau and any refill.
    std::size_t plateau_gap = 10;
};

/// Where each failure mode was applied, for scoring the generator itself.
struct CorruptionLog {
    std::vector<std::size_t> spikes;
    std::vector<std::pair<std::size_t, std::size_t>> stuck; // [start, end)
    std::vector<std::size_t> zeros;
};

struct CorruptedTrace {
    Trace trace;
    CorruptionLog log;
};

/// Piecewise-linear draw-down with engine-off plateaus and upward refill
/// steps. Per-segment slopes are chosen to reach a random pre-refill level
/// and clamped to the limits; the step at each refill index equals its
/// labelled volume.
inline GroundTruth generate_clean(std::size_t n, double tank, std::size_t n_refills, std::uint64_t seed,
                                  const ScheduleLimits& limits = {}) {
    if (n < 1000) throw Error(Errc::PreconditionViolation, "synthetic traces need n >= 1000");
    if (!(tank > 0.0)) throw Error(Errc::PreconditionViolation, "tank capacity must be positive");
    if (n_refills > 0 && tank * limits.max_refill_fraction < limits.min_refill) {
        throw Error(Errc::InfeasibleSchedule, "tank too small for the minimum refill");
    }
    const std::size_t usable = n - 2 * limits.edge_margin;
    if (n_refills > 0 && (n_refills - 1) * limits.refill_spacing >= usable) {
        throw Error(Errc::InfeasibleSchedule, std::to_string(n_refills) + " refills do not fit in " +
                                                  std::to_string(n) + " samples");
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    std::vector<std::size_t> refills(n_refills);
    if (n_refills > 0) {
        const std::size_t slack = usable - (n_refills - 1) * limits.refill_spacing - 1;
        std::uniform_int_distribution<std::size_t> pick(0, slack);
        for (auto& r : refills) r = pick(rng);
        std::sort(refills.begin(), refills.end());
        for (std::size_t k = 0; k < n_refills; ++k) refills[k] += limits.edge_margin + k * limits.refill_spacing;
    }

    GroundTruth truth;
    truth.clean_signal.assign(n, 0.0);
    std::vector<bool> flat(n, false);
    // Segment k spans [bounds[k], bounds[k+1]); refill k sits at bounds[k+1].
    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), refills.begin(), refills.end());
    bounds.push_back(n);
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const std::size_t lo = bounds[k] + limits.plateau_gap;
        const std::size_t hi = bounds[k + 1] > limits.plateau_gap ? bounds[k + 1] - limits.plateau_gap : 0;
        if (hi <= lo + 50) continue;
        const auto len = static_cast<std::size_t>(static_cast<double>(bounds[k + 1] - bounds[k]) *
                                                  limits.plateau_fraction * uniform(0.5, 1.5));
        if (len == 0 || len >= hi - lo) continue;
        const std::size_t start = lo + std::uniform_int_distribution<std::size_t>(0, hi - lo - len)(rng);
        for (std::size_t i = start; i < start + len; ++i) flat[i] = true;
        truth.plateaus.emplace_back(static_cast<Index>(start), static_cast<Index>(start + len - 1));
    }

    double level = tank * uniform(0.3, 0.9);
    truth.clean_signal[0] = level;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        const std::size_t seg_begin = bounds[k];
        const std::size_t seg_end = bounds[k + 1];
        // seg_begin > 0 is a refill index; its level was set by the step.
        level = truth.clean_signal[seg_begin];
        std::size_t active = 0;
        for (std::size_t i = seg_begin + 1; i < seg_end; ++i) active += flat[i] ? 0 : 1;

        double slope;
        if (seg_end == n) {
            slope = uniform(limits.min_slope, std::min(limits.max_slope, 0.02));
        } else {
            const double target = tank * uniform(0.05, 0.45);
            slope = active > 0 ? (level - target) / static_cast<double>(active) : 0.0;
            slope = std::clamp(slope, limits.min_slope, limits.max_slope);
        }
        for (std::size_t i = seg_begin + 1; i < seg_end; ++i) {
            if (!flat[i]) level = std::max(0.0, level - slope);
            truth.clean_signal[i] = level;
        }
        if (seg_end < n) {
            const double headroom = std::min(tank * limits.max_refill_fraction, tank - level);
            if (headroom < limits.min_refill) {
                throw Error(Errc::InfeasibleSchedule, "no headroom for refill at " + std::to_string(seg_end));
            }
            truth.clean_signal[seg_end] = level + uniform(limits.min_refill, headroom);
            truth.refills.push_back({static_cast<Index>(seg_end),
                                     truth.clean_signal[seg_end] - truth.clean_signal[seg_end - 1]});
        }
    }
    return truth;
}

inline CorruptedTrace corrupt_detailed(const GroundTruth& truth, const NoiseProfile& profile) {
    profile.validate();
    const std::size_t n = truth.clean_signal.size();
    std::vector<double> levels = truth.clean_signal;
    CorruptionLog log;

    // Independent streams so enabling one failure mode does not perturb another.
    std::seed_seq seq{static_cast<std::uint32_t>(profile.seed), static_cast<std::uint32_t>(profile.seed >> 32),
                      std::uint32_t{0x5eed}};
    std::vector<std::uint32_t> seeds(4);
    seq.generate(seeds.begin(), seeds.end());
    std::mt19937_64 white_rng(seeds[0]);
    std::mt19937_64 spike_rng(seeds[1]);
    std::mt19937_64 stuck_rng(seeds[2]);
    std::mt19937_64 zero_rng(seeds[3]);

    if (profile.white_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, profile.white_sigma);
        for (auto& v : levels) v += noise(white_rng);
    }
    if (profile.spike_prob > 0.0 && profile.spike_max > 0.0) {
        std::bernoulli_distribution hit(profile.spike_prob);
        std::uniform_real_distribution<double> magnitude(0.0, profile.spike_max);
        std::bernoulli_distribution negative(0.5);
        for (std::size_t i = 0; i < n; ++i) {
            if (!hit(spike_rng)) continue;
            const double m = magnitude(spike_rng);
            levels[i] += negative(spike_rng) ? -m : m;
            log.spikes.push_back(i);
        }
    }
    if (profile.stuck_prob > 0.0) {
        std::bernoulli_distribution hit(profile.stuck_prob);
        std::uniform_int_distribution<std::size_t> length(profile.stuck_len_min, profile.stuck_len_max);
        for (std::size_t block = 0; block < n; block += NoiseProfile::stuck_block) {
            if (!hit(stuck_rng)) continue;
            const std::size_t block_end = std::min(n, block + NoiseProfile::stuck_block);
            const std::size_t start = std::uniform_int_distribution<std::size_t>(block, block_end - 1)(stuck_rng);
            const std::size_t end = std::min(n, start + length(stuck_rng));
            for (std::size_t i = start + 1; i < end; ++i) levels[i] = levels[start];
            log.stuck.emplace_back(start, end);
        }
    }
    if (profile.zero_prob > 0.0) {
        std::bernoulli_distribution hit(profile.zero_prob);
        for (std::size_t i = 0; i < n; ++i) {
            if (!hit(zero_rng)) continue;
            levels[i] = 0.0;
            log.zeros.push_back(i);
        }
    }
    return {Trace::from_levels(levels), std::move(log)};
}

inline Trace corrupt(const GroundTruth& truth, const NoiseProfile& profile) {
    return corrupt_detailed(truth, profile).trace;
}

} // namespace fuelclean::synth
