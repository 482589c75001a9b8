#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean {

namespace csv_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

inline std::optional<Index> parse_index(std::string_view s) {
    Index value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::MissingFile, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    // A trailing blank line is the file's final newline, not a row.
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

} // namespace csv_detail

/// Shortest decimal that round-trips to the same double.
inline std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(Errc::IoFailure, "number formatting failed");
    return std::string(buf.data(), ptr);
}

/// Reads an `index,level` CSV with a one-line header. Empty levels load as
/// missing; zeros load as 0.0 and are left for preprocessing.
inline Trace load_trace(const std::filesystem::path& path, std::string vehicle_id = {}) {
    using namespace csv_detail;
    const auto lines = read_lines(path);
    if (lines.empty()) throw Error(Errc::MalformedRow, "missing header", 1);
    if (split(lines[0]).size() != 2) throw Error(Errc::MalformedRow, "header must have two columns", 1);

    std::vector<Sample> samples;
    samples.reserve(lines.size() - 1);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::size_t line_no = ln + 1;
        const auto fields = split(lines[ln]);
        if (fields.size() != 2) {
            throw Error(Errc::MalformedRow, "expected 2 fields on line " + std::to_string(line_no), line_no);
        }
        const auto index = parse_index(fields[0]);
        if (!index) throw Error(Errc::MalformedRow, "bad index on line " + std::to_string(line_no), line_no);
        Sample sample{*index, std::nullopt};
        if (!fields[1].empty()) {
            const auto level = parse_double(fields[1]);
            if (!level) throw Error(Errc::MalformedRow, "bad level on line " + std::to_string(line_no), line_no);
            sample.level = *level;
        }
        if (!samples.empty() && sample.index <= samples.back().index) {
            throw Error(Errc::NonMonotoneIndex, "index does not increase on line " + std::to_string(line_no),
                        line_no);
        }
        samples.push_back(sample);
    }
    return Trace(std::move(samples), std::move(vehicle_id));
}

inline void write_trace(const Trace& trace, const std::filesystem::path& path) {
    std::string text = "index,level\n";
    for (const auto& s : trace.samples()) {
        text += std::to_string(s.index);
        text += ',';
        if (s.level) text += format_number(*s.level);
        text += '\n';
    }
    csv_detail::write_text(path, text);
}

/// Writes a stage series aligned with `like`'s indices.
inline void write_series(const Trace& like, std::span<const double> levels, const std::filesystem::path& path) {
    write_trace(Trace::with_levels(like, levels), path);
}

inline void write_truth(const std::vector<TruthRefill>& refills, const std::filesystem::path& path) {
    std::string text = "index,volume\n";
    for (const auto& r : refills) {
        text += std::to_string(r.index) + ',' + format_number(r.volume) + '\n';
    }
    csv_detail::write_text(path, text);
}

inline std::vector<TruthRefill> load_truth(const std::filesystem::path& path) {
    using namespace csv_detail;
    const auto lines = read_lines(path);
    if (lines.empty()) throw Error(Errc::SchemaMismatch, "truth file has no header");
    const auto header = split(lines[0]);
    if (header.size() != 2 || header[0] != "index" || header[1] != "volume") {
        throw Error(Errc::SchemaMismatch, "truth header must be 'index,volume'", 1);
    }
    std::vector<TruthRefill> out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split(lines[ln]);
        const auto index = fields.size() == 2 ? parse_index(fields[0]) : std::nullopt;
        const auto volume = fields.size() == 2 ? parse_double(fields[1]) : std::nullopt;
        if (!index || !volume) throw Error(Errc::SchemaMismatch, "bad truth row", ln + 1);
        out.push_back({*index, *volume});
    }
    return out;
}

inline void write_consumption(const std::vector<ConsumptionSegment>& segments, const std::filesystem::path& path) {
    std::string text = "from_index,to_index,consumed_volume\n";
    for (const auto& s : segments) {
        text += std::to_string(s.from_index) + ',' + std::to_string(s.to_index) + ',' +
                format_number(s.consumed_volume) + '\n';
    }
    csv_detail::write_text(path, text);
}

inline constexpr std::string_view kReportHeader = "Start_index_refill,Stop_index_refill,Deducted_value";
inline constexpr std::string_view kReportTruthColumns = ",Real_value,Error,Percentage_error";

/// One report row's truth columns; absent when the event had no match.
struct ReportTruth {
    double real_value = 0.0;
    double error = 0.0;
    double percentage_error = 0.0;
};

inline void write_refill_report_rows(const std::vector<RefillEvent>& events,
                                     const std::optional<std::vector<std::optional<ReportTruth>>>& truth,
                                     const std::filesystem::path& path) {
    std::string text(kReportHeader);
    if (truth) text += kReportTruthColumns;
    text += '\n';
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        text += std::to_string(e.start_index) + ',' + std::to_string(e.stop_index) + ',' +
                format_number(e.detected_volume);
        if (truth) {
            const auto& t = (*truth)[i];
            if (t) {
                text += ',' + format_number(t->real_value) + ',' + format_number(t->error) + ',' +
                        format_number(t->percentage_error);
            } else {
                text += ",,,";
            }
        }
        text += '\n';
    }
    csv_detail::write_text(path, text);
}

/// Reads the detected columns of a refill report; truth columns, if
/// present, are ignored.
inline std::vector<RefillEvent> load_refill_report(const std::filesystem::path& path) {
    using namespace csv_detail;
    const auto lines = read_lines(path);
    if (lines.empty()) throw Error(Errc::SchemaMismatch, "report has no header");
    const auto header = split(lines[0]);
    if (header.size() < 3 || header[0] != "Start_index_refill" || header[1] != "Stop_index_refill" ||
        header[2] != "Deducted_value") {
        throw Error(Errc::SchemaMismatch, "report header must start with " + std::string(kReportHeader), 1);
    }
    std::vector<RefillEvent> out;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split(lines[ln]);
        if (fields.size() != header.size()) throw Error(Errc::SchemaMismatch, "bad report row", ln + 1);
        const auto start = parse_index(fields[0]);
        const auto stop = parse_index(fields[1]);
        const auto volume = parse_double(fields[2]);
        if (!start || !stop || !volume) throw Error(Errc::SchemaMismatch, "bad report row", ln + 1);
        out.push_back({*start, *stop, *volume});
    }
    return out;
}

} // namespace fuelclean
