#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/matrix.hpp"

namespace cohortkm {

enum class InitMethod { RandomPoints, PlusPlus };

std::string_view init_name(InitMethod init);

struct KMeansConfig {
    std::size_t k = 4;
    InitMethod init = InitMethod::PlusPlus;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    /// Convergence threshold on the largest squared centroid shift.
    double tol = 1e-9;
    std::size_t restarts = 10;

    /// Throws InvalidConfig.
    void check() const;
};

using Labels = std::vector<std::size_t>;

struct ClusteringResult {
    Labels labels;
    Matrix centroids;  // k×d
    double sse = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::uint64_t seed_used = 0;
    /// SSE after each centroid update of the winning run.
    std::vector<double> sse_trace;
};

/// k starting centroids. RandomPoints: k distinct rows without replacement.
/// PlusPlus: D² sampling. Uses cfg.seed directly. Throws TooFewPoints when n < k.
Matrix init_centroids(const Matrix& points, const KMeansConfig& cfg);

/// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
Labels assign(const Matrix& points, const Matrix& centroids);

/// Cluster means for `labels`. A cluster left empty is re-seeded with the row
/// farthest from the current centroid of its own cluster (ties by lowest row
/// index); several empty clusters take successive farthest rows.
Matrix update_centroids(const Matrix& points, const Labels& labels, std::size_t k,
                        const Matrix& current);

double sse(const Matrix& points, const Labels& labels, const Matrix& centroids);

/// One seeded Lloyd run from init_centroids(points, cfg).
ClusteringResult lloyd_single(const Matrix& points, const KMeansConfig& cfg);

/// Best (lowest SSE, earliest on ties) of cfg.restarts runs; restart r is
/// seeded with derive_seed(cfg.seed, r).
ClusteringResult lloyd(const Matrix& points, const KMeansConfig& cfg);

struct ElbowPoint {
    std::size_t k = 0;
    double sse = 0.0;
};

struct ElbowCurve {
    std::vector<ElbowPoint> points;
    /// Non-monotone steps (best-of-restarts SSE rising with k).
    std::vector<std::string> warnings;
};

/// lloyd for each k in [k_min, k_max]; the run for k is seeded with
/// derive_seed(cfg.seed, k). Throws TooFewPoints unless 1 ≤ k_min < k_max ≤ n.
ElbowCurve elbow_scan(const Matrix& points, std::size_t k_min, std::size_t k_max,
                      const KMeansConfig& cfg);

/// k with the largest signed distance below the end-to-end chord (endpoints
/// score 0); ties go to the smallest k. Throws TooFewPoints below 3 points.
std::size_t detect_knee(const ElbowCurve& curve);

nlohmann::json to_json(const ClusteringResult& result);
nlohmann::json to_json(const ElbowCurve& curve);
std::string elbow_csv(const ElbowCurve& curve);

}  // namespace cohortkm
