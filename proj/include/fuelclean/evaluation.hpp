#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fuelclean/csv_io.hpp"
#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::evaluation {

struct EventMatch {
    RefillEvent detected;
    double truth_volume = 0.0;
    double error = 0.0;
    double percentage_error = 0.0;
};

struct MatchResult {
    /// (detected position, truth position) pairs in detected order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t missed = 0;
    std::size_t spurious = 0;
};

struct ScoreReport {
    std::optional<double> r_squared; // undefined with < 2 matches or flat truth
    std::optional<double> rmse;      // undefined with no matches
    std::vector<EventMatch> matches;
    std::size_t missed = 0;
    std::size_t spurious = 0;
};

struct EventError {
    double error = 0.0;
    double percentage_error = 0.0;
};

inline constexpr Index kDefaultMatchTolerance = 100;

inline EventError event_error(double detected_volume, double truth_volume) {
    if (!(truth_volume > 0.0)) throw Error(Errc::NonPositiveTruth, "truth volume must be positive");
    const double error = std::abs(detected_volume - truth_volume);
    return {error, 100.0 * error / truth_volume};
}

/// Each detected event, in order, claims the nearest unclaimed truth refill
/// by start index (lower index on ties) when within `tolerance`.
inline MatchResult match_events(const std::vector<RefillEvent>& detected, const std::vector<TruthRefill>& truth,
                                Index tolerance = kDefaultMatchTolerance) {
    MatchResult result;
    std::vector<bool> taken(truth.size(), false);
    for (std::size_t d = 0; d < detected.size(); ++d) {
        const Index at = detected[d].start_index;
        std::size_t best = truth.size();
        Index best_dist = 0;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (taken[t]) continue;
            const Index dist = truth[t].index > at ? truth[t].index - at : at - truth[t].index;
            if (best == truth.size() || dist < best_dist) {
                best = t;
                best_dist = dist;
            }
        }
        if (best < truth.size() && best_dist <= tolerance) {
            taken[best] = true;
            result.pairs.emplace_back(d, best);
        } else {
            ++result.spurious;
        }
    }
    result.missed = truth.size() - result.pairs.size();
    return result;
}

/// 1 - SS_res / SS_tot.
inline double r_squared(std::span<const double> detected, std::span<const double> truth) {
    if (detected.size() != truth.size() || truth.size() < 2) {
        throw Error(Errc::PreconditionViolation, "r_squared needs two equal-length sequences of length >= 2");
    }
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (detected[i] - truth[i]) * (detected[i] - truth[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) throw Error(Errc::DegenerateTruth, "truth volumes have zero variance");
    return 1.0 - ss_res / ss_tot;
}

inline double rmse(std::span<const double> detected, std::span<const double> truth) {
    if (truth.empty()) throw Error(Errc::EmptyInput, "rmse of empty sequences");
    if (detected.size() != truth.size()) throw Error(Errc::PreconditionViolation, "rmse needs equal lengths");
    double ss = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) ss += (detected[i] - truth[i]) * (detected[i] - truth[i]);
    return std::sqrt(ss / static_cast<double>(truth.size()));
}

inline ScoreReport score(const std::vector<RefillEvent>& detected, const std::vector<TruthRefill>& truth,
                         Index tolerance = kDefaultMatchTolerance) {
    const auto matched = match_events(detected, truth, tolerance);
    ScoreReport report;
    report.missed = matched.missed;
    report.spurious = matched.spurious;
    std::vector<double> d;
    std::vector<double> t;
    for (const auto& [di, ti] : matched.pairs) {
        const auto err = event_error(detected[di].detected_volume, truth[ti].volume);
        report.matches.push_back({detected[di], truth[ti].volume, err.error, err.percentage_error});
        d.push_back(detected[di].detected_volume);
        t.push_back(truth[ti].volume);
    }
    if (!d.empty()) report.rmse = rmse(d, t);
    if (d.size() >= 2) {
        try {
            report.r_squared = r_squared(d, t);
        } catch (const Error& e) {
            if (e.code() != Errc::DegenerateTruth) throw;
        }
    }
    return report;
}

/// `key: value` lines followed by the per-event table.
inline std::string format_score(const ScoreReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("n/a"); };
    std::ostringstream out;
    out << "r_squared: " << opt(report.r_squared) << '\n';
    out << "rmse: " << opt(report.rmse) << '\n';
    out << "matched: " << report.matches.size() << '\n';
    out << "missed: " << report.missed << '\n';
    out << "spurious: " << report.spurious << '\n';
    out << "events:\n";
    out << "Start_index_refill,Stop_index_refill,Deducted_value,Real_value,Error,Percentage_error\n";
    for (const auto& m : report.matches) {
        out << m.detected.start_index << ',' << m.detected.stop_index << ',' << format_number(m.detected.detected_volume)
            << ',' << format_number(m.truth_volume) << ',' << format_number(m.error) << ','
            << format_number(m.percentage_error) << '\n';
    }
    return out.str();
}

/// Refill report CSV. With truth, events are matched against it and the
/// Real_value/Error/Percentage_error columns are filled (blank if unmatched).
inline void write_refill_report(const std::vector<RefillEvent>& events, const std::optional<GroundTruth>& truth,
                                const std::filesystem::path& path, Index tolerance = kDefaultMatchTolerance) {
    if (!truth) {
        write_refill_report_rows(events, std::nullopt, path);
        return;
    }
    std::vector<std::optional<ReportTruth>> columns(events.size());
    const auto matched = match_events(events, truth->refills, tolerance);
    for (const auto& [di, ti] : matched.pairs) {
        const double real = truth->refills[ti].volume;
        const auto err = event_error(events[di].detected_volume, real);
        columns[di] = ReportTruth{real, err.error, err.percentage_error};
    }
    write_refill_report_rows(events, columns, path);
}

} // namespace fuelclean::evaluation
