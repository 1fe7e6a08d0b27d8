#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/matrix.hpp"

namespace cohortkm {

/// Population (1/n) covariance about the column means. Throws TooFewRows for n < 2.
Matrix covariance(const Matrix& data);

struct EigenDecomposition {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]
    std::size_t sweeps = 0;
};

/// Cyclic Jacobi for symmetric matrices. Stops once the off-diagonal Frobenius
/// norm drops below 1e-12; each eigenvector's largest-magnitude entry is made
/// positive. Throws NotSymmetric or NoConvergence (after 100 sweeps).
EigenDecomposition eigen_sym(const Matrix& symmetric);

struct PcaModel {
    std::vector<double> column_means;
    std::vector<double> eigenvalues;  // descending, clipped at 0
    Matrix components;                // d×d, orthonormal columns
    std::vector<double> explained_variance_ratio;
    /// Projections subtract column_means before applying the components.
    bool centered = true;
};

/// Throws ZeroVariance when every eigenvalue is 0.
PcaModel fit_pca(const Matrix& data);

/// Z = (X − means)·W_q. Throws BadDimension unless 1 ≤ q ≤ d and widths agree.
Matrix project(const Matrix& data, const PcaModel& model, std::size_t q);

/// Inverse of project for q = d: Z·Wᵀ + means.
Matrix reconstruct(const Matrix& projected, const PcaModel& model);

nlohmann::json to_json(const PcaModel& model);

}  // namespace cohortkm
