#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/matrix.hpp"

namespace cohortkm {

/// Cluster ids are arbitrary non-negative integers; reports list clusters in
/// ascending id order.
struct SilhouetteReport {
    std::vector<double> per_point;
    std::vector<std::size_t> cluster_ids;
    std::vector<double> per_cluster_mean;  // parallel to cluster_ids
    double overall_mean = 0.0;
};

/// Euclidean silhouette. Singleton clusters score 0. Throws SingleCluster when
/// fewer than two distinct labels are present, LengthMismatch on shape errors.
SilhouetteReport silhouette(const Matrix& points, std::span<const std::size_t> labels);

/// [B/(k−1)] / [W/(n−k)]; +infinity when W = 0. Throws BadClusterCount unless 2 ≤ k ≤ n − 1.
double calinski_harabasz(const Matrix& points, std::span<const std::size_t> labels);

/// Truth and predicted labels of equal, non-zero length.
class LabelPair {
public:
    /// Throws LengthMismatch.
    LabelPair(std::vector<std::size_t> truth, std::vector<std::size_t> predicted);

    const std::vector<std::size_t>& truth() const noexcept { return truth_; }
    const std::vector<std::size_t>& predicted() const noexcept { return predicted_; }
    std::size_t size() const noexcept { return truth_.size(); }

private:
    std::vector<std::size_t> truth_;
    std::vector<std::size_t> predicted_;
};

double adjusted_rand_index(const LabelPair& pair);

/// 1 − H(truth | predicted)/H(truth), natural log; 1 when H(truth) = 0.
double homogeneity(const LabelPair& pair);

struct MetricBundle {
    std::optional<SilhouetteReport> silhouette;
    std::optional<double> calinski_harabasz;
    std::optional<double> ari;
    std::optional<double> homogeneity;

    bool empty() const noexcept {
        return !silhouette && !calinski_harabasz && !ari && !homogeneity;
    }
};

/// Internal metrics always; external ones only when `truth` is given.
MetricBundle evaluate(const Matrix& points, std::span<const std::size_t> labels,
                      const std::optional<std::vector<std::size_t>>& truth);

/// {silhouette_mean, per_cluster, calinski_harabasz, ari, homogeneity}; absent
/// metrics are omitted and an infinite CH is written as the string "inf".
nlohmann::json to_json(const MetricBundle& bundle);

}  // namespace cohortkm
