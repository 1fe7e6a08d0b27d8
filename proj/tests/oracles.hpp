// Brute-force reference implementations used only by the tests. Each one
// takes a different computational route from the library code it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "cohortkm/matrix.hpp"
#include "cohortkm/random.hpp"
#include "cohortkm/viz.hpp"

namespace oracle {

using cohortkm::Matrix;

struct OnePass {
    std::size_t count = 0;
    double mean = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

/// Welford running mean with min/max in a single pass.
inline OnePass one_pass(const std::vector<double>& values) {
    OnePass s;
    for (double v : values) {
        ++s.count;
        s.mean += (v - s.mean) / static_cast<double>(s.count);
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    return s;
}

/// Percentile by order statistics selected with nth_element (no full sort).
inline double percentile(std::vector<double> v, double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    std::nth_element(v.begin(), v.begin() + static_cast<long>(lo), v.end());
    const double a = v[lo];
    if (static_cast<double>(lo) == h) return a;
    const double b = *std::min_element(v.begin() + static_cast<long>(lo) + 1, v.end());
    return a * (1.0 - (h - static_cast<double>(lo))) + b * (h - static_cast<double>(lo));
}

/// Minimum SSE over every 2-partition with both parts non-empty (n ≤ ~20).
inline double exhaustive_two_partition_sse(const Matrix& pts) {
    const std::size_t n = pts.rows();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        if (mask & 1u) continue;  // fix point 0 in part B to skip mirrored masks
        double total = 0.0;
        for (int part = 0; part < 2; ++part) {
            std::vector<double> mean(pts.cols(), 0.0);
            double count = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (((mask >> i) & 1u) == static_cast<std::uint32_t>(part)) {
                    for (std::size_t j = 0; j < pts.cols(); ++j) mean[j] += pts(i, j);
                    count += 1.0;
                }
            for (auto& m : mean) m /= count;
            for (std::size_t i = 0; i < n; ++i)
                if (((mask >> i) & 1u) == static_cast<std::uint32_t>(part))
                    for (std::size_t j = 0; j < pts.cols(); ++j) total += (pts(i, j) - mean[j]) * (pts(i, j) - mean[j]);
        }
        best = std::min(best, total);
    }
    return best;
}

/// Covariance from the pairwise identity Σ_ab = (1/(2n²)) Σ_i Σ_j (x_ia − x_ja)(x_ib − x_jb).
inline Matrix pairwise_covariance(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Matrix cov(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) s += (x(i, a) - x(j, a)) * (x(i, b) - x(j, b));
            cov(a, b) = s / (2.0 * static_cast<double>(n) * static_cast<double>(n));
        }
    return cov;
}

inline double dist(const Matrix& x, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
    return std::sqrt(s);
}

/// Silhouette by explicit double loops, one cluster at a time.
inline std::vector<double> silhouette(const Matrix& x, const std::vector<std::size_t>& labels) {
    const std::size_t n = x.rows();
    const std::set<std::size_t> ids(labels.begin(), labels.end());
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double a_sum = 0.0;
        std::size_t a_count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && labels[j] == labels[i]) {
                a_sum += dist(x, i, j);
                ++a_count;
            }
        if (a_count == 0) continue;
        const double a = a_sum / static_cast<double>(a_count);
        double b = std::numeric_limits<double>::infinity();
        for (auto id : ids) {
            if (id == labels[i]) continue;
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (labels[j] == id) {
                    sum += dist(x, i, j);
                    ++count;
                }
            b = std::min(b, sum / static_cast<double>(count));
        }
        s[i] = std::max(a, b) > 0.0 ? (b - a) / std::max(a, b) : 0.0;
    }
    return s;
}

/// CH from within-cluster pairwise distances: W_c = Σ_{i<j∈c} ‖xi−xj‖²/n_c, and T = B + W.
inline double calinski_harabasz(const Matrix& x, const std::vector<std::size_t>& labels) {
    const std::size_t n = x.rows();
    const std::set<std::size_t> ids(labels.begin(), labels.end());
    const double k = static_cast<double>(ids.size());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) total += dist(x, i, j) * dist(x, i, j);
    total /= static_cast<double>(n);
    double within = 0.0;
    for (auto id : ids) {
        double s = 0.0;
        double count = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != id) continue;
            count += 1.0;
            for (std::size_t j = i + 1; j < n; ++j)
                if (labels[j] == id) s += dist(x, i, j) * dist(x, i, j);
        }
        within += s / count;
    }
    if (within == 0.0) return std::numeric_limits<double>::infinity();
    const double between = total - within;
    return (between / (k - 1.0)) / (within / (static_cast<double>(n) - k));
}

/// ARI by enumerating every unordered pair of points.
inline double ari(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
    const std::size_t n = t.size();
    double both = 0.0, same_t = 0.0, same_p = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool st = t[i] == t[j];
            const bool sp = p[i] == p[j];
            both += st && sp ? 1.0 : 0.0;
            same_t += st ? 1.0 : 0.0;
            same_p += sp ? 1.0 : 0.0;
            pairs += 1.0;
        }
    const double expected = same_t * same_p / pairs;
    const double max_index = 0.5 * (same_t + same_p);
    if (max_index == expected) return 1.0;
    return (both - expected) / (max_index - expected);
}

/// Homogeneity from a contingency map, entropies accumulated in log2 (ratio is base-free).
inline double homogeneity(const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
    const double n = static_cast<double>(t.size());
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> tc, pc;
    for (std::size_t i = 0; i < t.size(); ++i) {
        joint[{t[i], p[i]}] += 1.0;
        tc[t[i]] += 1.0;
        pc[p[i]] += 1.0;
    }
    double ht = 0.0;
    for (const auto& [_, c] : tc) ht -= c / n * std::log2(c / n);
    if (ht == 0.0) return 1.0;
    double hcond = 0.0;
    for (const auto& [key, c] : joint) hcond -= c / n * std::log2(c / pc[key.second]);
    return 1.0 - hcond / ht;
}

inline double orient(const cohortkm::Point2D& o, const cohortkm::Point2D& a, const cohortkm::Point2D& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool in_closed_triangle(const cohortkm::Point2D& p, const cohortkm::Point2D& a, const cohortkm::Point2D& b,
                               const cohortkm::Point2D& c) {
    const double d1 = orient(a, b, p), d2 = orient(b, c, p), d3 = orient(c, a, p);
    const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
    if (has_neg && has_pos) return false;
    if (orient(a, b, c) != 0.0) return true;
    // Degenerate triangle: p must lie within the bounding box of the segment.
    const double xmin = std::min({a.x, b.x, c.x}), xmax = std::max({a.x, b.x, c.x});
    const double ymin = std::min({a.y, b.y, c.y}), ymax = std::max({a.y, b.y, c.y});
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
}

/// Strict hull vertices by elimination: a point survives unless it lies in a
/// closed (possibly degenerate) triangle of three other distinct points.
/// Returned sorted lexicographically; the caller compares as a set.
inline std::vector<cohortkm::Point2D> hull_vertices(std::vector<cohortkm::Point2D> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<cohortkm::Point2D> out;
    for (std::size_t p = 0; p < n; ++p) {
        bool inside = false;
        for (std::size_t a = 0; a < n && !inside; ++a)
            for (std::size_t b = a; b < n && !inside; ++b)
                for (std::size_t c = b; c < n && !inside; ++c) {
                    if (a == p || b == p || c == p) continue;
                    inside = in_closed_triangle(pts[p], pts[a], pts[b], pts[c]);
                }
        if (!inside) out.push_back(pts[p]);
    }
    return out;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, cohortkm::Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform();
    return m;
}

/// Gaussian blobs: `per_center` points around each row of `centers`.
inline Matrix blobs(const Matrix& centers, double sigma, std::size_t per_center, std::uint64_t seed) {
    cohortkm::Rng rng(seed);
    Matrix out(centers.rows() * per_center, centers.cols());
    std::size_t r = 0;
    for (std::size_t c = 0; c < centers.rows(); ++c)
        for (std::size_t i = 0; i < per_center; ++i, ++r)
            for (std::size_t j = 0; j < centers.cols(); ++j) out(r, j) = rng.normal(centers(c, j), sigma);
    return out;
}

}  // namespace oracle
