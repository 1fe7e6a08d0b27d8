#include "cohortkm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "cohortkm/error.hpp"

namespace cohortkm {

namespace {

/// Maps arbitrary ids to 0..k-1 in ascending id order.
struct CompactLabels {
    std::vector<std::size_t> ids;
    std::vector<std::size_t> index;  // per point
};

CompactLabels compact(std::span<const std::size_t> labels) {
    CompactLabels out;
    out.ids.assign(labels.begin(), labels.end());
    std::sort(out.ids.begin(), out.ids.end());
    out.ids.erase(std::unique(out.ids.begin(), out.ids.end()), out.ids.end());
    out.index.reserve(labels.size());
    for (auto l : labels)
        out.index.push_back(static_cast<std::size_t>(
            std::lower_bound(out.ids.begin(), out.ids.end(), l) - out.ids.begin()));
    return out;
}

void require_shape(const Matrix& points, std::span<const std::size_t> labels) {
    if (points.rows() != labels.size())
        throw LengthMismatch(std::to_string(points.rows()) + " rows vs " +
                             std::to_string(labels.size()) + " labels");
}

double comb2(double n) { return n * (n - 1.0) / 2.0; }

double entropy(std::span<const double> counts, double total) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / total) * std::log(c / total);
    return h;
}

}  // namespace

SilhouetteReport silhouette(const Matrix& points, std::span<const std::size_t> labels) {
    require_shape(points, labels);
    const auto cl = compact(labels);
    const std::size_t k = cl.ids.size();
    if (k < 2) throw SingleCluster("silhouette needs at least two clusters");
    const std::size_t n = points.rows();

    std::vector<double> sizes(k, 0.0);
    for (auto c : cl.index) sizes[c] += 1.0;

    SilhouetteReport report;
    report.cluster_ids = cl.ids;
    report.per_point.resize(n);
    std::vector<double> dist_sum(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist_sum[cl.index[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
        }
        const std::size_t own = cl.index[i];
        if (sizes[own] <= 1.0) {
            report.per_point[i] = 0.0;
            continue;
        }
        const double a = dist_sum[own] / (sizes[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own) b = std::min(b, dist_sum[c] / sizes[c]);
        const double denom = std::max(a, b);
        report.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }

    report.per_cluster_mean.assign(k, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        report.per_cluster_mean[cl.index[i]] += report.per_point[i];
        total += report.per_point[i];
    }
    for (std::size_t c = 0; c < k; ++c) report.per_cluster_mean[c] /= sizes[c];
    report.overall_mean = total / static_cast<double>(n);
    return report;
}

double calinski_harabasz(const Matrix& points, std::span<const std::size_t> labels) {
    require_shape(points, labels);
    const auto cl = compact(labels);
    const std::size_t k = cl.ids.size();
    const std::size_t n = points.rows();
    if (k < 2 || k + 1 > n)
        throw BadClusterCount("need 2 <= k <= n-1 (k = " + std::to_string(k) + ", n = " +
                              std::to_string(n) + ")");
    const std::size_t d = points.cols();

    Matrix centroids(k, d);
    std::vector<double> sizes(k, 0.0);
    std::vector<double> grand(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = points.row(i);
        auto acc = centroids.row(cl.index[i]);
        for (std::size_t j = 0; j < d; ++j) {
            acc[j] += row[j];
            grand[j] += row[j];
        }
        sizes[cl.index[i]] += 1.0;
    }
    for (auto& g : grand) g /= static_cast<double>(n);
    for (std::size_t c = 0; c < k; ++c)
        for (auto& v : centroids.row(c)) v /= sizes[c];

    double between = 0.0;
    for (std::size_t c = 0; c < k; ++c) between += sizes[c] * squared_distance(centroids.row(c), grand);
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i) within += squared_distance(points.row(i), centroids.row(cl.index[i]));

    if (within == 0.0) return std::numeric_limits<double>::infinity();
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

LabelPair::LabelPair(std::vector<std::size_t> truth, std::vector<std::size_t> predicted)
    : truth_(std::move(truth)), predicted_(std::move(predicted)) {
    if (truth_.size() != predicted_.size())
        throw LengthMismatch(std::to_string(truth_.size()) + " truth labels vs " +
                             std::to_string(predicted_.size()) + " predicted");
    if (truth_.empty()) throw LengthMismatch("label vectors are empty");
}

double adjusted_rand_index(const LabelPair& pair) {
    const auto t = compact(pair.truth());
    const auto p = compact(pair.predicted());
    const std::size_t rows = t.ids.size();
    const std::size_t cols = p.ids.size();
    std::vector<double> table(rows * cols, 0.0);
    for (std::size_t i = 0; i < pair.size(); ++i) table[t.index[i] * cols + p.index[i]] += 1.0;

    double index = 0.0;
    std::vector<double> row_sums(rows, 0.0);
    std::vector<double> col_sums(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = table[r * cols + c];
            index += comb2(v);
            row_sums[r] += v;
            col_sums[c] += v;
        }
    double sum_rows = 0.0;
    double sum_cols = 0.0;
    for (double v : row_sums) sum_rows += comb2(v);
    for (double v : col_sums) sum_cols += comb2(v);

    const double expected = sum_rows * sum_cols / comb2(static_cast<double>(pair.size()));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    // Both partitions trivial (all singletons or one block): agreement is total.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double homogeneity(const LabelPair& pair) {
    const auto t = compact(pair.truth());
    const auto p = compact(pair.predicted());
    const std::size_t rows = t.ids.size();
    const std::size_t cols = p.ids.size();
    const double n = static_cast<double>(pair.size());

    std::vector<double> truth_counts(rows, 0.0);
    std::vector<double> table(rows * cols, 0.0);
    std::vector<double> cluster_sizes(cols, 0.0);
    for (std::size_t i = 0; i < pair.size(); ++i) {
        truth_counts[t.index[i]] += 1.0;
        table[t.index[i] * cols + p.index[i]] += 1.0;
        cluster_sizes[p.index[i]] += 1.0;
    }
    const double h_truth = entropy(truth_counts, n);
    if (h_truth == 0.0) return 1.0;

    double h_conditional = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = table[r * cols + c];
            if (v > 0.0) h_conditional -= (v / n) * std::log(v / cluster_sizes[c]);
        }
    return std::clamp(1.0 - h_conditional / h_truth, 0.0, 1.0);
}

MetricBundle evaluate(const Matrix& points, std::span<const std::size_t> labels,
                      const std::optional<std::vector<std::size_t>>& truth) {
    MetricBundle bundle;
    bundle.silhouette = silhouette(points, labels);
    bundle.calinski_harabasz = calinski_harabasz(points, labels);
    if (truth) {
        LabelPair pair(*truth, std::vector<std::size_t>(labels.begin(), labels.end()));
        bundle.ari = adjusted_rand_index(pair);
        bundle.homogeneity = homogeneity(pair);
    }
    return bundle;
}

nlohmann::json to_json(const MetricBundle& b) {
    nlohmann::json j = nlohmann::json::object();
    if (b.silhouette) {
        j["silhouette_mean"] = b.silhouette->overall_mean;
        auto per_cluster = nlohmann::json::array();
        for (std::size_t c = 0; c < b.silhouette->cluster_ids.size(); ++c)
            per_cluster.push_back(
                {{"cluster", b.silhouette->cluster_ids[c]}, {"mean", b.silhouette->per_cluster_mean[c]}});
        j["per_cluster"] = per_cluster;
    }
    if (b.calinski_harabasz) {
        if (std::isinf(*b.calinski_harabasz))
            j["calinski_harabasz"] = "inf";
        else
            j["calinski_harabasz"] = *b.calinski_harabasz;
    }
    if (b.ari) j["ari"] = *b.ari;
    if (b.homogeneity) j["homogeneity"] = *b.homogeneity;
    return j;
}

}  // namespace cohortkm
