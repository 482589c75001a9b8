#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fuelclean/error.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::wavelet {

/// Daubechies wavelet with four vanishing moments (8 taps), analysis filters.
inline constexpr std::array<double, 8> kDb4Low = {
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385,  0.6308807679295904,   0.7148465705525415,   0.23037781330885523,
};

inline constexpr std::array<double, 8> kDb4High = [] {
    std::array<double, 8> g{};
    for (std::size_t m = 0; m < 8; ++m) g[m] = (m % 2 == 0 ? -1.0 : 1.0) * kDb4Low[7 - m];
    return g;
}();

inline constexpr std::size_t kFilterLength = kDb4Low.size();

enum class Extension {
    /// Half-sample mirror; any length, (n + 7) / 2 coefficients per level.
    Symmetric,
    /// Circular; length must be divisible by 2^levels, n / 2 per level.
    Periodic,
};

/// Multi-level decomposition. details[0] is the finest level.
struct WaveletDecomposition {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    int levels = 0;
    std::size_t original_length = 0;
    Extension extension = Extension::Symmetric;
    /// Signal length entering each level, finest first.
    std::vector<std::size_t> level_lengths;
};

struct ShrinkThreshold {
    double alpha = 0.0;
    double noise_estimate = 0.0;
    std::size_t datasize = 0;
    double value = 0.0;
};

namespace detail {

inline std::size_t coeff_count(std::size_t n, Extension ext) {
    return ext == Extension::Periodic ? n / 2 : (n + kFilterLength - 1) / 2;
}

// Index into the extended signal, mapped back to [0, n).
inline std::size_t extend(std::ptrdiff_t pos, std::size_t n, Extension ext) {
    const auto len = static_cast<std::ptrdiff_t>(n);
    if (ext == Extension::Periodic) {
        const auto r = pos % len;
        return static_cast<std::size_t>(r < 0 ? r + len : r);
    }
    const std::ptrdiff_t period = 2 * len;
    std::ptrdiff_t r = pos % period;
    if (r < 0) r += period;
    return static_cast<std::size_t>(r < len ? r : period - 1 - r);
}

// Coefficient k sees samples 2k+1-m, m = 0..7.
inline void analyze(std::span<const double> x, Extension ext, std::vector<double>& lo, std::vector<double>& hi) {
    const std::size_t n = x.size();
    const std::size_t count = coeff_count(n, ext);
    lo.assign(count, 0.0);
    hi.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < kFilterLength; ++m) {
            const auto pos = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(m);
            const double v = (pos >= 0 && pos < static_cast<std::ptrdiff_t>(n)) ? x[static_cast<std::size_t>(pos)]
                                                                             : x[extend(pos, n, ext)];
            a += kDb4Low[m] * v;
            d += kDb4High[m] * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

// Transpose of analyze restricted to [0, n).
inline std::vector<double> synthesize(std::span<const double> lo, std::span<const double> hi, std::size_t n,
                                      Extension ext) {
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < lo.size(); ++k) {
        for (std::size_t m = 0; m < kFilterLength; ++m) {
            const auto pos = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(m);
            std::size_t target;
            if (ext == Extension::Periodic) {
                target = extend(pos, n, ext);
            } else if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(n)) {
                target = static_cast<std::size_t>(pos);
            } else {
                continue;
            }
            x[target] += kDb4Low[m] * lo[k] + kDb4High[m] * hi[k];
        }
    }
    return x;
}

inline double median_abs(std::span<const double> v) {
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
    const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
    std::nth_element(a.begin(), mid, a.end());
    if (a.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(a.begin(), mid));
}

} // namespace detail

inline WaveletDecomposition dwt(std::span<const double> values, int levels, Extension ext = Extension::Symmetric) {
    if (levels < 1) throw Error(Errc::BadLevels, "levels must be >= 1");
    if (levels >= 63 || values.size() < (std::size_t{1} << levels)) {
        throw Error(Errc::TooShort, "signal shorter than 2^levels");
    }
    if (ext == Extension::Periodic && values.size() % (std::size_t{1} << levels) != 0) {
        throw Error(Errc::PreconditionViolation, "periodic extension needs length divisible by 2^levels");
    }
    WaveletDecomposition out;
    out.levels = levels;
    out.original_length = values.size();
    out.extension = ext;
    std::vector<double> current(values.begin(), values.end());
    std::vector<double> lo;
    std::vector<double> hi;
    for (int level = 0; level < levels; ++level) {
        out.level_lengths.push_back(current.size());
        detail::analyze(current, ext, lo, hi);
        out.details.push_back(hi);
        current = lo;
    }
    out.approx = std::move(current);
    return out;
}

inline std::vector<double> idwt(const WaveletDecomposition& decomp) {
    const auto levels = static_cast<std::size_t>(decomp.levels);
    if (decomp.levels < 1 || decomp.details.size() != levels || decomp.level_lengths.size() != levels ||
        decomp.level_lengths.front() != decomp.original_length) {
        throw Error(Errc::ShapeMismatch, "decomposition levels are inconsistent");
    }
    for (std::size_t j = 0; j < levels; ++j) {
        const std::size_t expected = detail::coeff_count(decomp.level_lengths[j], decomp.extension);
        const std::size_t next_len = j + 1 < levels ? decomp.level_lengths[j + 1] : decomp.approx.size();
        if (decomp.details[j].size() != expected || next_len != expected) {
            throw Error(Errc::ShapeMismatch, "coefficient count mismatch at level " + std::to_string(j + 1));
        }
    }
    std::vector<double> current = decomp.approx;
    for (std::size_t j = levels; j-- > 0;) {
        current = detail::synthesize(current, decomp.details[j], decomp.level_lengths[j], decomp.extension);
    }
    return current;
}

/// alpha * sqrt(noise) * ln(datasize), noise = median |finest details|.
inline ShrinkThreshold shrink_threshold(const std::vector<std::vector<double>>& details, double alpha,
                                        std::size_t datasize) {
    if (details.empty() || details.front().empty()) throw Error(Errc::EmptyDetails, "no detail coefficients");
    if (datasize < 2) throw Error(Errc::PreconditionViolation, "datasize must be >= 2");
    ShrinkThreshold t;
    t.alpha = alpha;
    t.noise_estimate = detail::median_abs(details.front());
    t.datasize = datasize;
    t.value = alpha * std::sqrt(t.noise_estimate) * std::log(static_cast<double>(datasize));
    return t;
}

inline double soft_threshold(double coefficient, double threshold) {
    const double mag = std::abs(coefficient) - threshold;
    return mag > 0.0 ? std::copysign(mag, coefficient) : 0.0;
}

inline std::vector<double> denoise(std::span<const double> values, const PipelineConfig& config) {
    auto decomp = dwt(values, config.wavelet_levels);
    const auto threshold = shrink_threshold(decomp.details, config.wavelet_alpha, values.size());
    if (threshold.value > 0.0) {
        for (auto& level : decomp.details) {
            for (auto& c : level) c = soft_threshold(c, threshold.value);
        }
    }
    return idwt(decomp);
}

/// Lag in [-max_lag, max_lag] maximizing the Pearson correlation of
/// original[i] against denoised[i + lag] over their overlap. A denoised
/// signal delayed by L samples yields lag L; shift it back by -lag.
/// Equal scores resolve to the smallest |lag|, negative first.
inline long align_shift(std::span<const double> original, std::span<const double> denoised, std::size_t max_lag) {
    const std::size_t n = original.size();
    if (denoised.size() != n || n < 2 || 2 * max_lag >= n) {
        throw Error(Errc::TooShort, "align_shift needs equal lengths with max_lag < length/2");
    }
    auto prefix = [](std::span<const double> v, bool squared) {
        std::vector<double> p(v.size() + 1, 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = p[i] + (squared ? v[i] * v[i] : v[i]);
        return p;
    };
    const auto sx = prefix(original, false);
    const auto sxx = prefix(original, true);
    const auto sy = prefix(denoised, false);
    const auto syy = prefix(denoised, true);

    auto score = [&](long lag) {
        // original[i] pairs with denoised[i + lag], i in [lo, hi).
        const std::size_t lo = lag < 0 ? static_cast<std::size_t>(-lag) : 0;
        const std::size_t hi = lag > 0 ? n - static_cast<std::size_t>(lag) : n;
        const std::size_t off_lo = lo + static_cast<std::size_t>(lag);
        const std::size_t off_hi = hi + static_cast<std::size_t>(lag);
        const double m = static_cast<double>(hi - lo);
        double sxy = 0.0;
        for (std::size_t i = lo, j = off_lo; i < hi; ++i, ++j) sxy += original[i] * denoised[j];
        const double mx = (sx[hi] - sx[lo]) / m;
        const double my = (sy[off_hi] - sy[off_lo]) / m;
        const double cov = sxy / m - mx * my;
        const double vx = (sxx[hi] - sxx[lo]) / m - mx * mx;
        const double vy = (syy[off_hi] - syy[off_lo]) / m - my * my;
        const double scale = std::max({std::abs(mx), std::abs(my), 1.0});
        const double floor = 1e-12 * scale * scale;
        if (vx <= floor || vy <= floor) return 0.0;
        return cov / std::sqrt(vx * vy);
    };

    long best_lag = 0;
    double best = score(0);
    for (long step = 1; step <= static_cast<long>(max_lag); ++step) {
        for (long lag : {-step, step}) {
            const double s = score(lag);
            if (s > best) {
                best = s;
                best_lag = lag;
            }
        }
    }
    return best_lag;
}

/// out[i] = values[i + lag], edges replicated. Undoes a delay of `lag`.
inline std::vector<double> shift_back(std::span<const double> values, long lag) {
    const auto n = static_cast<long>(values.size());
    std::vector<double> out(values.size());
    for (long i = 0; i < n; ++i) {
        const long src = std::clamp(i + lag, 0L, n - 1);
        out[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(src)];
    }
    return out;
}

} // namespace fuelclean::wavelet
