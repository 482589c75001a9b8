#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fuelclean/error.hpp"
#include "fuelclean/median_filter.hpp"
#include "fuelclean/preprocess.hpp"
#include "fuelclean/types.hpp"

namespace fuelclean::clustering {

/// Gaussian-kernel similarity between window points.
struct AffinityMatrix {
    Eigen::MatrixXd entries;
    double bandwidth = 1.0;
};

struct ClusterAssignment {
    std::vector<int> labels;
    int noise_label = -1; // -1: no cluster designated as noise

    int cluster_count() const {
        return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    }
};

enum class ClusterMethod { Agglomerative, Spectral };

/// Chooses between the two clusterers from the window's spread:
/// alpha = 1 (spectral) when sigma > T, alpha = 0 (agglomerative) when
/// sigma < T. sigma == T goes to agglomerative unless `tie_spectral`.
struct HybridSelector {
    double threshold_T = 0.1;
    bool tie_spectral = false;

    double alpha(double sigma) const {
        if (sigma > threshold_T) return 1.0;
        if (sigma < threshold_T) return 0.0;
        return tie_spectral ? 1.0 : 0.0;
    }
    ClusterMethod method(double sigma) const {
        return alpha(sigma) == 1.0 ? ClusterMethod::Spectral : ClusterMethod::Agglomerative;
    }
};

namespace detail {

inline double median_of(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

// Relabels so cluster ids appear in order of first occurrence.
inline std::vector<int> canonical_labels(std::span<const int> raw) {
    std::vector<int> remap;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int r = raw[i];
        if (static_cast<std::size_t>(r) >= remap.size()) remap.resize(static_cast<std::size_t>(r) + 1, -1);
        if (remap[static_cast<std::size_t>(r)] < 0) {
            remap[static_cast<std::size_t>(r)] = *std::max_element(remap.begin(), remap.end()) + 1;
        }
        out[i] = remap[static_cast<std::size_t>(r)];
    }
    return out;
}

} // namespace detail

inline double population_stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

/// Median absolute pairwise difference, or 1.0 when that median is zero.
inline double default_bandwidth(std::span<const double> values) {
    std::vector<double> diffs;
    diffs.reserve(values.size() * (values.size() - 1) / 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) diffs.push_back(std::abs(values[i] - values[j]));
    }
    if (diffs.empty()) return 1.0;
    const double med = detail::median_of(std::move(diffs));
    return med > 0.0 ? med : 1.0;
}

inline AffinityMatrix build_affinity(std::span<const double> values, double bandwidth) {
    if (values.size() < 2) throw Error(Errc::PreconditionViolation, "affinity needs at least two points");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw Error(Errc::DegenerateBandwidth, "bandwidth must be positive");
    }
    const auto n = static_cast<Eigen::Index>(values.size());
    AffinityMatrix a{Eigen::MatrixXd::Identity(n, n), bandwidth};
    const double denom = 2.0 * bandwidth * bandwidth;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(j)];
            const double w = std::exp(-(d * d) / denom);
            a.entries(i, j) = w;
            a.entries(j, i) = w;
        }
    }
    return a;
}

/// L = I - D^(-1/2) A D^(-1/2).
inline Eigen::MatrixXd normalized_laplacian(const AffinityMatrix& affinity) {
    const Eigen::VectorXd degree = affinity.entries.rowwise().sum();
    if ((degree.array() <= 0.0).any()) throw Error(Errc::SingularDegree, "point with zero total affinity");
    const Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
    Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * affinity.entries * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
    return lap;
}

/// Lloyd's k-means on the rows of `points`, seeded by farthest-point
/// traversal from row 0. Ties go to the lowest index.
inline std::vector<int> kmeans_rows(const Eigen::MatrixXd& points, int k) {
    const Eigen::Index n = points.rows();
    std::vector<Eigen::Index> seeds{0};
    Eigen::VectorXd nearest = (points.rowwise() - points.row(0)).rowwise().squaredNorm();
    while (static_cast<int>(seeds.size()) < k) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n; ++i) {
            if (nearest(i) > nearest(best)) best = i;
        }
        seeds.push_back(best);
        nearest = nearest.cwiseMin((points.rowwise() - points.row(best)).rowwise().squaredNorm());
    }
    Eigen::MatrixXd centers(k, points.cols());
    for (int c = 0; c < k; ++c) centers.row(c) = points.row(seeds[static_cast<std::size_t>(c)]);

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (points.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        }
    }
    return labels;
}

/// Normalized spectral clustering: embed points with the k lowest
/// eigenvectors of the normalized Laplacian, row-normalize, then k-means.
inline ClusterAssignment spectral_cluster(std::span<const double> values, int k) {
    if (k < 2 || values.size() < static_cast<std::size_t>(k)) {
        throw Error(Errc::PreconditionViolation, "spectral clustering needs n >= k >= 2");
    }
    const auto affinity = build_affinity(values, default_bandwidth(values));
    const Eigen::MatrixXd lap = normalized_laplacian(affinity);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::PreconditionViolation, "Laplacian eigendecomposition failed");
    }
    Eigen::MatrixXd embedding = solver.eigenvectors().leftCols(k);
    for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    const auto raw = kmeans_rows(embedding, k);
    return {detail::canonical_labels(raw), -1};
}

/// Greedy bottom-up single linkage. Each cluster is named by its lowest
/// member index; among equally close pairs the lexicographically lowest
/// pair of names merges first.
inline ClusterAssignment agglomerative_cluster(std::span<const double> values, int k) {
    const std::size_t n = values.size();
    if (k < 1 || n < static_cast<std::size_t>(k)) {
        throw Error(Errc::PreconditionViolation, "agglomerative clustering needs n >= k >= 1");
    }
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(values[i] - values[j]);
    }
    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{0});

    while (active.size() > static_cast<std::size_t>(k)) {
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ia = 0; ia < active.size(); ++ia) {
            for (std::size_t ib = ia + 1; ib < active.size(); ++ib) {
                const double d = dist[active[ia] * n + active[ib]];
                if (d < best) {
                    best = d;
                    best_a = ia;
                    best_b = ib;
                }
            }
        }
        const std::size_t a = active[best_a];
        const std::size_t b = active[best_b];
        for (std::size_t x : active) {
            const double merged = std::min(dist[a * n + x], dist[b * n + x]);
            dist[a * n + x] = merged;
            dist[x * n + a] = merged;
        }
        for (auto& o : owner) {
            if (o == b) o = a;
        }
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    }
    std::vector<int> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<int>(owner[i]);
    return {detail::canonical_labels(raw), -1};
}

/// Robust per-sample noise scale from first differences:
/// 1.4826 * MAD(diff) / sqrt(2). Level steps barely move it.
inline double difference_noise_scale(std::span<const double> window) {
    if (window.size() < 3) return 0.0;
    std::vector<double> diff(window.size() - 1);
    for (std::size_t i = 1; i < window.size(); ++i) diff[i - 1] = window[i] - window[i - 1];
    const double med = detail::median_of(diff);
    for (auto& d : diff) d = std::abs(d - med);
    return 1.4826 * detail::median_of(std::move(diff)) / std::sqrt(2.0);
}

struct WindowReport {
    std::size_t start = 0;
    std::size_t size = 0;
    double sigma = 0.0;
    ClusterMethod method = ClusterMethod::Agglomerative;
    bool clustered = false;
    std::size_t removed = 0;
};

struct HybridClusterResult {
    Trace trace;
    std::vector<WindowReport> windows;
};

/// True when sample i is the corner of a level step: its neighbours differ
/// by more than `step`, and it sits within `step` of one of them.
inline bool is_step_corner(std::span<const double> levels, std::size_t i, double step) {
    if (i == 0 || i + 1 >= levels.size()) return false;
    const double prev = levels[i - 1], cur = levels[i], next = levels[i + 1];
    return std::abs(next - prev) > step && (std::abs(cur - prev) <= step || std::abs(cur - next) <= step);
}

/// Picks the noise cluster of a two-way split: the cluster whose centroid
/// lies farther from the window median, provided it is a strict minority.
inline int designate_noise(std::span<const double> features, std::span<const int> labels, double median) {
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        if (l > 1) return -1;
        sum[l] += features[i];
        ++count[l];
    }
    if (count[0] == 0 || count[1] == 0) return -1;
    const double d0 = std::abs(sum[0] / static_cast<double>(count[0]) - median);
    const double d1 = std::abs(sum[1] / static_cast<double>(count[1]) - median);
    if (d0 == d1) return -1;
    const int noise = d0 > d1 ? 0 : 1;
    if (2 * count[static_cast<std::size_t>(noise)] >= features.size()) return -1;
    return noise;
}

/// Windowed two-way clustering of each sample's deviation from its local
/// running median. Points of the noise cluster that stand out from the
/// window by more than max(T, 4 sigma), sigma estimated from first
/// differences, are dropped (step corners excepted) and refilled by
/// interpolation/extrapolation once every window has been processed.
inline HybridClusterResult hybrid_cluster(const Trace& trace, const PipelineConfig& config) {
    if (!trace.filled()) throw Error(Errc::NotFilled, "clustering needs a filled trace");
    HybridClusterResult result{trace, {}};
    if (trace.empty()) return result;

    const auto levels = trace.levels();
    const auto baseline = median_filter(levels, config.median_window);
    std::vector<double> features(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) features[i] = levels[i] - baseline[i];

    const HybridSelector selector{config.cluster_threshold_T, config.cluster_tie_spectral};
    std::vector<bool> drop(levels.size(), false);
    const std::size_t n = levels.size();
    for (std::size_t start = 0; start < n; start += config.cluster_window_step) {
        const std::size_t size = std::min(config.cluster_window, n - start);
        std::span<const double> window(levels.data() + start, size);
        std::span<const double> feat(features.data() + start, size);

        WindowReport report{start, size, population_stddev(window), ClusterMethod::Agglomerative, false, 0};
        report.method = selector.method(report.sigma);

        const std::vector<double> feat_copy(feat.begin(), feat.end());
        const double med = detail::median_of(feat_copy);
        std::vector<double> abs_dev(size);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            abs_dev[i] = std::abs(feat[i] - med);
            max_dev = std::max(max_dev, abs_dev[i]);
        }
        const double gate = std::max(config.cluster_threshold_T, 4.0 * difference_noise_scale(window));

        if (size >= 2 && max_dev > gate) {
            const auto assignment = report.method == ClusterMethod::Spectral ? spectral_cluster(feat, 2)
                                                                             : agglomerative_cluster(feat, 2);
            report.clustered = true;
            const int noise = designate_noise(feat, assignment.labels, med);
            if (noise >= 0) {
                for (std::size_t i = 0; i < size; ++i) {
                    if (assignment.labels[i] == noise && abs_dev[i] > gate && !drop[start + i] &&
                        !is_step_corner(levels, start + i, config.peak_deviation)) {
                        drop[start + i] = true;
                        ++report.removed;
                    }
                }
            }
        }
        result.windows.push_back(report);
    }

    if (std::find(drop.begin(), drop.end(), true) == drop.end()) return result;
    TraceEditor edit(trace);
    for (std::size_t i = 0; i < n; ++i) {
        if (drop[i]) edit.level(i).reset();
    }
    result.trace = preprocess::extrapolate_midpoint(std::move(edit).release());
    return result;
}

inline Trace hybrid_cluster_denoise(const Trace& trace, const PipelineConfig& config) {
    return hybrid_cluster(trace, config).trace;
}

} // namespace fuelclean::clustering
