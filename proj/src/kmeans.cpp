#include "cohortkm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "cohortkm/error.hpp"
#include "cohortkm/random.hpp"

namespace cohortkm {

std::string_view init_name(InitMethod init) {
    return init == InitMethod::PlusPlus ? "plusplus" : "random";
}

void KMeansConfig::check() const {
    if (k < 1) throw InvalidConfig("k must be >= 1");
    if (max_iter < 1) throw InvalidConfig("max_iter must be >= 1");
    if (!(tol >= 0.0)) throw InvalidConfig("tol must be >= 0");
    if (restarts < 1) throw InvalidConfig("restarts must be >= 1");
}

namespace {

void require_points(const Matrix& points, std::size_t k) {
    if (points.rows() < k)
        throw TooFewPoints("need at least " + std::to_string(k) + " rows, have " +
                           std::to_string(points.rows()));
}

Matrix rows_of(const Matrix& points, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), points.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) std::ranges::copy(points.row(indices[i]), out.row(i).begin());
    return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> plusplus_indices(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    std::vector<std::size_t> chosen;
    std::vector<bool> taken(n, false);
    chosen.push_back(static_cast<std::size_t>(rng.below(n)));
    taken[chosen.back()] = true;

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
        const auto last = points.row(chosen.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points.row(i), last));
            total += nearest[i];
        }

        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (nearest[i] <= 0.0) continue;
                cumulative += nearest[i];
                pick = i;
                if (target < cumulative) break;
            }
        } else {
            // Every remaining row duplicates a chosen centroid.
            std::size_t remaining = n - chosen.size();
            auto r = static_cast<std::size_t>(rng.below(remaining));
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (r-- == 0) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
        taken[pick] = true;
    }
    return chosen;
}

double max_squared_shift(const Matrix& a, const Matrix& b) {
    double shift = 0.0;
    for (std::size_t c = 0; c < a.rows(); ++c) shift = std::max(shift, squared_distance(a.row(c), b.row(c)));
    return shift;
}

}  // namespace

Matrix init_centroids(const Matrix& points, const KMeansConfig& cfg) {
    cfg.check();
    require_points(points, cfg.k);
    Rng rng(cfg.seed);
    const auto indices = cfg.init == InitMethod::RandomPoints
                             ? sample_without_replacement(points.rows(), cfg.k, rng)
                             : plusplus_indices(points, cfg.k, rng);
    return rows_of(points, indices);
}

Labels assign(const Matrix& points, const Matrix& centroids) {
    Labels labels(points.rows(), 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double d = squared_distance(points.row(i), centroids.row(c));
            if (d < best) {
                best = d;
                labels[i] = c;
            }
        }
    }
    return labels;
}

Matrix update_centroids(const Matrix& points, const Labels& labels, std::size_t k,
                        const Matrix& current) {
    const std::size_t d = points.cols();
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto row = points.row(i);
        auto acc = sums.row(labels[i]);
        for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
        ++counts[labels[i]];
    }

    std::vector<bool> used(points.rows(), false);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            for (auto& v : sums.row(c)) v /= static_cast<double>(counts[c]);
            continue;
        }
        std::size_t far = points.rows();
        double far_dist = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (used[i]) continue;
            const double dist = squared_distance(points.row(i), current.row(labels[i]));
            if (dist > far_dist) {
                far_dist = dist;
                far = i;
            }
        }
        if (far == points.rows()) continue;  // more empty clusters than rows
        used[far] = true;
        std::ranges::copy(points.row(far), sums.row(c).begin());
    }
    return sums;
}

double sse(const Matrix& points, const Labels& labels, const Matrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        total += squared_distance(points.row(i), centroids.row(labels[i]));
    return total;
}

ClusteringResult lloyd_single(const Matrix& points, const KMeansConfig& cfg) {
    ClusteringResult result;
    result.seed_used = cfg.seed;
    result.centroids = init_centroids(points, cfg);

    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        result.labels = assign(points, result.centroids);
        Matrix next = update_centroids(points, result.labels, cfg.k, result.centroids);
        const double shift = max_squared_shift(result.centroids, next);
        result.centroids = std::move(next);
        result.sse_trace.push_back(sse(points, result.labels, result.centroids));
        result.iterations = iter + 1;
        if (shift < cfg.tol) {
            result.converged = true;
            break;
        }
    }
    result.labels = assign(points, result.centroids);
    result.sse = sse(points, result.labels, result.centroids);
    return result;
}

ClusteringResult lloyd(const Matrix& points, const KMeansConfig& cfg) {
    cfg.check();
    require_points(points, cfg.k);
    ClusteringResult best;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        KMeansConfig run = cfg;
        run.seed = derive_seed(cfg.seed, r);
        auto candidate = lloyd_single(points, run);
        if (r == 0 || candidate.sse < best.sse) best = std::move(candidate);
    }
    return best;
}

ElbowCurve elbow_scan(const Matrix& points, std::size_t k_min, std::size_t k_max,
                      const KMeansConfig& cfg) {
    if (k_min < 1 || k_min >= k_max || k_max > points.rows())
        throw TooFewPoints("elbow range needs 1 <= k_min < k_max <= n (got [" +
                           std::to_string(k_min) + ", " + std::to_string(k_max) + "], n = " +
                           std::to_string(points.rows()) + ")");
    ElbowCurve curve;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansConfig run = cfg;
        run.k = k;
        run.seed = derive_seed(cfg.seed, k);
        const auto result = lloyd(points, run);
        if (!curve.points.empty() && result.sse > curve.points.back().sse)
            curve.warnings.push_back("SSE rose from k=" + std::to_string(k - 1) + " to k=" +
                                     std::to_string(k));
        curve.points.push_back({k, result.sse});
    }
    return curve;
}

std::size_t detect_knee(const ElbowCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3) throw TooFewPoints("knee detection needs at least 3 curve points");
    const double x0 = static_cast<double>(pts.front().k);
    const double y0 = pts.front().sse;
    const double dx = static_cast<double>(pts.back().k) - x0;
    const double dy = pts.back().sse - y0;
    const double length = std::hypot(dx, dy);

    std::size_t best_k = pts.front().k;
    double best = 0.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double px = static_cast<double>(pts[i].k) - x0;
        const double py = pts[i].sse - y0;
        // Positive when the point lies below the chord.
        const double dist = (dy * px - dx * py) / length;
        if (dist > best) {
            best = dist;
            best_k = pts[i].k;
        }
    }
    return best_k;
}

nlohmann::json to_json(const ClusteringResult& r) {
    auto centroids = nlohmann::json::array();
    for (std::size_t c = 0; c < r.centroids.rows(); ++c) {
        const auto row = r.centroids.row(c);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"labels", r.labels},       {"centroids", centroids},
            {"sse", r.sse},             {"iterations", r.iterations},
            {"converged", r.converged}, {"seed_used", r.seed_used}};
}

nlohmann::json to_json(const ElbowCurve& curve) {
    auto pts = nlohmann::json::array();
    for (const auto& p : curve.points) pts.push_back({{"k", p.k}, {"sse", p.sse}});
    return {{"points", pts}, {"warnings", curve.warnings}};
}

std::string elbow_csv(const ElbowCurve& curve) {
    std::string out = "k,sse\n";
    char buf[64];
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", p.k, p.sse);
        out += buf;
    }
    return out;
}

}  // namespace cohortkm
