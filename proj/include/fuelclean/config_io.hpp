#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "fuelclean/csv_io.hpp"
#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean {

namespace config_detail {

template <typename T>
void parse_integer(std::string_view key, std::string_view text, T& out) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(Errc::InvalidConfig, std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
    }
    out = value;
}

inline void parse_real(std::string_view key, std::string_view text, double& out) {
    const auto v = csv_detail::parse_double(text);
    if (!v) throw Error(Errc::InvalidConfig, std::string(key) + ": expected a number, got '" + std::string(text) + "'");
    out = *v;
}

inline void parse_bool(std::string_view key, std::string_view text, bool& out) {
    if (text == "true" || text == "1") {
        out = true;
    } else if (text == "false" || text == "0") {
        out = false;
    } else {
        throw Error(Errc::InvalidConfig, std::string(key) + ": expected true/false, got '" + std::string(text) + "'");
    }
}

using Setter = std::function<void(PipelineConfig&, std::string_view key, std::string_view value)>;

inline const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"white_noise_passes", [](auto& c, auto k, auto v) { parse_integer(k, v, c.white_noise_passes); }},
        {"cluster_threshold_T", [](auto& c, auto k, auto v) { parse_real(k, v, c.cluster_threshold_T); }},
        {"cluster_window", [](auto& c, auto k, auto v) { parse_integer(k, v, c.cluster_window); }},
        {"cluster_window_step", [](auto& c, auto k, auto v) { parse_integer(k, v, c.cluster_window_step); }},
        {"cluster_tie_spectral", [](auto& c, auto k, auto v) { parse_bool(k, v, c.cluster_tie_spectral); }},
        {"wavelet_alpha", [](auto& c, auto k, auto v) { parse_real(k, v, c.wavelet_alpha); }},
        {"wavelet_levels", [](auto& c, auto k, auto v) { parse_integer(k, v, c.wavelet_levels); }},
        {"median_window", [](auto& c, auto k, auto v) { parse_integer(k, v, c.median_window); }},
        {"peak_deviation", [](auto& c, auto k, auto v) { parse_real(k, v, c.peak_deviation); }},
        {"level_span", [](auto& c, auto k, auto v) { parse_integer(k, v, c.level_span); }},
        {"match_tolerance", [](auto& c, auto k, auto v) { parse_integer(k, v, c.match_tolerance); }},
        {"final_distance", [](auto& c, auto k, auto v) { parse_integer(k, v, c.final_distance); }},
        {"final_difference", [](auto& c, auto k, auto v) { parse_real(k, v, c.final_difference); }},
        {"max_lag", [](auto& c, auto k, auto v) { parse_integer(k, v, c.max_lag); }},
    };
    return table;
}

} // namespace config_detail

/// Parses flat `key = value` lines. `#` starts a comment. Keys not given
/// keep their defaults; unknown keys are errors.
inline PipelineConfig parse_config(std::string_view text) {
    PipelineConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = csv_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected 'key = value' near '" +
                                                 std::string(line) + "'",
                        line_no);
        }
        const auto key = csv_detail::trim(line.substr(0, eq));
        const auto value = csv_detail::trim(line.substr(eq + 1));
        const auto& table = config_detail::setters();
        const auto it = table.find(key);
        if (it == table.end()) throw Error(Errc::InvalidConfig, "unknown key '" + std::string(key) + "'", line_no);
        it->second(config, key, value);
    }
    config.validate();
    return config;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::MissingFile, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline std::string format_config(const PipelineConfig& c) {
    std::ostringstream out;
    out << "white_noise_passes = " << c.white_noise_passes << '\n'
        << "cluster_threshold_T = " << format_number(c.cluster_threshold_T) << '\n'
        << "cluster_window = " << c.cluster_window << '\n'
        << "cluster_window_step = " << c.cluster_window_step << '\n'
        << "cluster_tie_spectral = " << (c.cluster_tie_spectral ? "true" : "false") << '\n'
        << "wavelet_alpha = " << format_number(c.wavelet_alpha) << '\n'
        << "wavelet_levels = " << c.wavelet_levels << '\n'
        << "median_window = " << c.median_window << '\n'
        << "peak_deviation = " << format_number(c.peak_deviation) << '\n'
        << "level_span = " << c.level_span << '\n'
        << "match_tolerance = " << c.match_tolerance << '\n'
        << "final_distance = " << c.final_distance << '\n'
        << "final_difference = " << format_number(c.final_difference) << '\n'
        << "max_lag = " << c.max_lag << '\n';
    return out.str();
}

} // namespace fuelclean
