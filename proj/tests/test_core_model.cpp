#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuelclean/config_io.hpp"
#include "fuelclean/csv_io.hpp"
#include "fuelclean/evaluation.hpp"
#include "fuelclean/types.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fuelclean;
using testing_support::ScratchDir;

TEST(Trace, RejectsNonIncreasingIndices) {
    EXPECT_ERRC(Trace({{2, 1.0}, {2, 1.0}}), Errc::NonMonotoneIndex);
    EXPECT_ERRC(Trace({{5, 1.0}, {3, 1.0}}), Errc::NonMonotoneIndex);
}

TEST(Trace, LevelsRequireFilledTrace) {
    const Trace t({{0, 1.0}, {1, std::nullopt}});
    EXPECT_EQ(t.missing_count(), 1u);
    EXPECT_FALSE(t.filled());
    EXPECT_ERRC((void)t.levels(), Errc::NotFilled);
}

TEST(Trace, WithLevelsKeepsIndices) {
    const Trace t({{3, 1.0}, {7, 2.0}});
    const std::vector<double> lv{5.0, 6.0};
    const auto u = Trace::with_levels(t, lv);
    EXPECT_EQ(u.indices(), (std::vector<Index>{3, 7}));
    EXPECT_EQ(u.levels(), lv);
    EXPECT_ERRC(Trace::with_levels(t, std::vector<double>{1.0}), Errc::ShapeMismatch);
}

TEST(LoadTrace, ParsesRowsInOrder) {
    ScratchDir dir;
    const auto t = load_trace(dir.write("t.csv", "idx,level\n0,17.5\n1,17.4"));
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0], (Sample{0, 17.5}));
    EXPECT_EQ(t[1], (Sample{1, 17.4}));
}

TEST(LoadTrace, PublishedRowIndex) {
    ScratchDir dir;
    const auto t = load_trace(dir.write("t.csv", "index,level\n4041,17.77\n"));
    EXPECT_EQ(t[0], (Sample{4041, 17.77}));
}

TEST(LoadTrace, EmptyLevelIsMissingAndZeroIsKept) {
    ScratchDir dir;
    const auto t = load_trace(dir.write("t.csv", "index,level\r\n0,\r\n1,0\r\n2,3.5\r\n"));
    EXPECT_TRUE(t[0].missing());
    EXPECT_EQ(t[1].level, 0.0);
    EXPECT_EQ(t[2].level, 3.5);
}

TEST(LoadTrace, Errors) {
    ScratchDir dir;
    EXPECT_ERRC(load_trace(dir / "absent.csv"), Errc::MissingFile);
    try {
        load_trace(dir.write("a.csv", "idx,level\n5,1.0\n3,2.0"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NonMonotoneIndex);
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        load_trace(dir.write("b.csv", "idx,level\n0,1.0\n1,abc\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MalformedRow);
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_ERRC(load_trace(dir.write("c.csv", "idx,level\n0,1.0,2\n")), Errc::MalformedRow);
}

TEST(LoadTrace, WriteRoundTripsLevels) {
    ScratchDir dir;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 80.0);
    std::vector<Sample> samples;
    for (Index i = 0; i < 500; ++i) samples.push_back({i * 3, i % 17 == 0 ? std::nullopt : std::optional(u(rng))});
    const Trace t(samples);
    write_trace(t, dir / "rt.csv");
    const auto back = load_trace(dir / "rt.csv");
    ASSERT_EQ(back.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(back[i].index, t[i].index);
        ASSERT_EQ(back[i].missing(), t[i].missing());
        if (!t[i].missing()) {
            EXPECT_NEAR(*back[i].level, *t[i].level, 1e-9);
        }
    }
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(17.77), "17.77");
    EXPECT_EQ(format_number(17.75168437), "17.75168437");
    EXPECT_EQ(format_number(0.0), "0");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 1e-12, 123456.789}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
}

namespace {

std::vector<std::string> split_line(const std::string& s) {
    std::vector<std::string> out(1);
    for (char c : s) {
        if (c == ',') out.emplace_back();
        else out.back() += c;
    }
    return out;
}

} // namespace

TEST(RefillReport, PublishedRowsWithTruth) {
    ScratchDir dir;
    const std::vector<RefillEvent> events{{4041, 4042, 17.75168437}, {9709, 9710, 14.64695647}};
    GroundTruth truth;
    truth.refills = {{4041, 17.77}, {9709, 14.65}};
    evaluation::write_refill_report(events, truth, dir / "r.csv");
    const auto text = testing_support::slurp(dir / "r.csv");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "Start_index_refill,Stop_index_refill,Deducted_value,Real_value,Error,Percentage_error");

    std::getline(in, line);
    auto f = split_line(line);
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f[0], "4041");
    EXPECT_EQ(f[1], "4042");
    EXPECT_EQ(f[2], "17.75168437");
    EXPECT_EQ(f[3], "17.77");
    EXPECT_NEAR(std::stod(f[4]), 0.018315629965759, 1e-9);
    EXPECT_NEAR(std::stod(f[5]), 0.103070511906353, 1e-9);

    std::getline(in, line);
    f = split_line(line);
    ASSERT_EQ(f.size(), 6u);
    // The printed inputs carry 8 decimals; the published Error of this row
    // sits 1.4e-9 from their exact difference.
    EXPECT_NEAR(std::stod(f[4]), 0.003043528614741, 1e-8);
    EXPECT_NEAR(std::stod(f[5]), 0.02077490934977, 1e-7);
}

TEST(RefillReport, EmptyEventsGiveHeaderOnly) {
    ScratchDir dir;
    evaluation::write_refill_report({}, std::nullopt, dir / "r.csv");
    EXPECT_EQ(testing_support::slurp(dir / "r.csv"), "Start_index_refill,Stop_index_refill,Deducted_value\n");
}

TEST(RefillReport, RowInvariantHolds) {
    ScratchDir dir;
    std::vector<RefillEvent> events;
    GroundTruth truth;
    for (const auto& r : oracle::consistent_rows()) {
        events.push_back({r.start, r.stop, r.deducted});
        truth.refills.push_back({r.start, r.real});
    }
    evaluation::write_refill_report(events, truth, dir / "r.csv");
    std::istringstream in(testing_support::slurp(dir / "r.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto f = split_line(line);
        const double d = std::stod(f[2]), real = std::stod(f[3]), err = std::stod(f[4]), pct = std::stod(f[5]);
        EXPECT_DOUBLE_EQ(err, std::abs(d - real));
        EXPECT_DOUBLE_EQ(pct, 100.0 * err / real);
        ++rows;
    }
    EXPECT_EQ(rows, events.size());
}

TEST(RefillReport, LoadRejectsForeignSchema) {
    ScratchDir dir;
    EXPECT_ERRC(load_refill_report(dir.write("x.csv", "index,volume\n1,2\n")), Errc::SchemaMismatch);
    const auto events = load_refill_report(dir.write("ok.csv", "Start_index_refill,Stop_index_refill,Deducted_value\n4041,4042,17.75\n"));
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0], (RefillEvent{4041, 4042, 17.75}));
}

TEST(Truth, RoundTrip) {
    ScratchDir dir;
    const std::vector<TruthRefill> refills{{10, 8.5}, {900, 30.25}};
    write_truth(refills, dir / "t.csv");
    EXPECT_EQ(load_truth(dir / "t.csv"), refills);
    EXPECT_ERRC(load_truth(dir.write("bad.csv", "idx,vol\n")), Errc::SchemaMismatch);
}

TEST(Config, DefaultsAndOverrides) {
    const auto c = parse_config("# comment\n\nwavelet_alpha = 0.5\nmedian_window=7  # trailing\ncluster_tie_spectral = true\n");
    EXPECT_EQ(c.wavelet_alpha, 0.5);
    EXPECT_EQ(c.median_window, 7u);
    EXPECT_TRUE(c.cluster_tie_spectral);
    EXPECT_EQ(c.peak_deviation, 4.0);
    EXPECT_EQ(c.cluster_threshold_T, 0.1);
    EXPECT_EQ(c.match_tolerance, 100u);
    EXPECT_EQ(c.final_distance, 30u);
    EXPECT_EQ(c.final_difference, 5.0);
}

TEST(Config, EveryFieldRoundTrips) {
    PipelineConfig c;
    c.white_noise_passes = 3;
    c.cluster_threshold_T = 0.25;
    c.cluster_window = 150;
    c.cluster_window_step = 100;
    c.cluster_tie_spectral = true;
    c.wavelet_alpha = 0.75;
    c.wavelet_levels = 3;
    c.median_window = 9;
    c.peak_deviation = 3.5;
    c.level_span = 4;
    c.match_tolerance = 50;
    c.final_distance = 20;
    c.final_difference = 2.5;
    c.max_lag = 100;
    const auto back = parse_config(format_config(c));
    EXPECT_EQ(format_config(back), format_config(c));
}

TEST(Config, ErrorsNameTheKey) {
    try {
        parse_config("median_widow = 5\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidConfig);
        EXPECT_NE(std::string(e.what()).find("median_widow"), std::string::npos);
    }
    try {
        parse_config("median_window = 4\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("median_window"), std::string::npos);
    }
    try {
        parse_config("peak_deviation = four\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("peak_deviation"), std::string::npos);
    }
    EXPECT_ERRC(parse_config("just some text\n"), Errc::InvalidConfig);
}
