#include "cohortkm/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cohortkm/error.hpp"

namespace cohortkm {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kOffDiagonalTol = 1e-12;
constexpr std::size_t kMaxSweeps = 100;

std::vector<double> column_means(const Matrix& data) {
    std::vector<double> means(data.cols(), 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = 0; j < data.cols(); ++j) means[j] += data(i, j);
    for (auto& m : means) m /= static_cast<double>(data.rows());
    return means;
}

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

// Rotates rows/columns p and q of `a` to annihilate a(p, q), accumulating into `v`.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

}  // namespace

Matrix covariance(const Matrix& data) {
    if (data.rows() < 2) throw TooFewRows("covariance needs at least 2 rows");
    const auto means = column_means(data);
    const std::size_t d = data.cols();
    Matrix cov(d, d);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto row = data.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double da = row[a] - means[a];
            for (std::size_t b = a; b < d; ++b) cov(a, b) += da * (row[b] - means[b]);
        }
    }
    const double n = static_cast<double>(data.rows());
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= n;
            cov(b, a) = cov(a, b);
        }
    return cov;
}

EigenDecomposition eigen_sym(const Matrix& symmetric) {
    const std::size_t n = symmetric.rows();
    if (symmetric.cols() != n) throw NotSymmetric("matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(symmetric(i, j) - symmetric(j, i)) > kSymmetryTol)
                throw NotSymmetric("entry (" + std::to_string(i) + ", " + std::to_string(j) + ")");

    Matrix a = symmetric;
    Matrix v = Matrix::identity(n);
    std::size_t sweeps = 0;
    while (off_diagonal_norm(a) >= kOffDiagonalTol) {
        if (sweeps == kMaxSweeps) throw NoConvergence("Jacobi did not converge in 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
        ++sweeps;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values.push_back(a(src, src));
        std::size_t pivot = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, src)) > std::abs(v(pivot, src))) pivot = k;
        const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
    }
    return out;
}

PcaModel fit_pca(const Matrix& data) {
    const Matrix cov = covariance(data);
    auto eig = eigen_sym(cov);

    PcaModel model;
    model.column_means = column_means(data);
    model.components = std::move(eig.vectors);
    double total = 0.0;
    for (double ev : eig.values) {
        // Covariance is PSD; negative values are round-off.
        const double clipped = std::max(ev, 0.0);
        model.eigenvalues.push_back(clipped);
        total += clipped;
    }
    if (total <= 0.0) throw ZeroVariance("all eigenvalues are zero");
    for (double ev : model.eigenvalues) model.explained_variance_ratio.push_back(ev / total);
    return model;
}

Matrix project(const Matrix& data, const PcaModel& model, std::size_t q) {
    const std::size_t d = model.components.rows();
    if (q < 1 || q > d) throw BadDimension("q must be in [1, " + std::to_string(d) + "]");
    if (data.cols() != d) throw BadDimension("data width does not match model");
    Matrix z(data.rows(), q);
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t c = 0; c < q; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += (data(i, j) - (model.centered ? model.column_means[j] : 0.0)) *
                       model.components(j, c);
            z(i, c) = acc;
        }
    return z;
}

Matrix reconstruct(const Matrix& projected, const PcaModel& model) {
    const std::size_t d = model.components.rows();
    if (projected.cols() != d) throw BadDimension("reconstruction needs all d components");
    Matrix x = projected * model.components.transposed();
    if (model.centered)
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < d; ++j) x(i, j) += model.column_means[j];
    return x;
}

nlohmann::json to_json(const PcaModel& m) {
    return {{"column_means", m.column_means},
            {"eigenvalues", m.eigenvalues},
            {"components_row_major", m.components.values()},
            {"explained_variance_ratio", m.explained_variance_ratio},
            {"centered", m.centered}};
}

}  // namespace cohortkm
