#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeyhsi/dataset.hpp"
#include "honeyhsi/matrix.hpp"

namespace honeyhsi {

/// Stacks the band vectors of a dataset into an N×d matrix.
Matrix bandMatrix(const LabeledDataset& ds);

/// Class-independent linear discriminant projection.
struct LdaModel {
    Matrix projection;                             ///< d × m, unit-norm columns
    std::vector<double> eigenvalues;               ///< m values, descending, nonnegative
    std::vector<std::string> classNames;
    std::vector<std::vector<double>> classMeans;   ///< aligned with classNames
    std::vector<double> globalMean;
    std::vector<double> classPriors;               ///< n_j / N

    std::size_t inputDim() const noexcept { return projection.rows(); }
    std::size_t components() const noexcept { return projection.cols(); }

    friend bool operator==(const LdaModel&, const LdaModel&) = default;
};

struct PcaModel {
    Matrix components;                       ///< d × m, orthonormal columns
    std::vector<double> explainedVariance;   ///< descending, nonnegative
    std::vector<double> mean;

    std::size_t inputDim() const noexcept { return components.rows(); }
    std::size_t componentCount() const noexcept { return components.cols(); }

    friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// Relative ridge added to the within-class scatter: S_W + ε·(trace(S_W)/d)·I.
inline constexpr double kLdaShrinkage = 1e-6;

/// Fits LDA on row-major points with labels in [0, classNames.size()).
///
/// The generalized problem S_B·v = λ·S_W·v is reduced to a symmetric one by Cholesky
/// whitening of the regularized S_W, solved with eigSymmetric and mapped back.
/// Throws FitError when a class is empty or fewer than two classes exist, and
/// ArgumentError unless 1 <= m <= classes - 1.
LdaModel fitLda(const Matrix& points, std::span<const int> labels, std::vector<std::string> classNames,
                std::size_t m);
LdaModel fitLda(const LabeledDataset& train, std::size_t m);

/// projectionᵀ·x. No centering is applied.
std::vector<double> projectLda(const LdaModel& model, std::span<const double> x);

/// Top-m principal axes of the sample covariance (N - 1 divisor).
PcaModel fitPca(const Matrix& points, std::size_t m);
PcaModel fitPca(const LabeledDataset& train, std::size_t m);

/// componentsᵀ·(x - mean).
std::vector<double> projectPca(const PcaModel& model, std::span<const double> x);

nlohmann::json toJson(const LdaModel& model);
nlohmann::json toJson(const PcaModel& model);
LdaModel ldaFromJson(const nlohmann::json& doc);
PcaModel pcaFromJson(const nlohmann::json& doc);

/// Shared helpers for the versioned model documents.
nlohmann::json matrixToJson(const Matrix& m);
Matrix matrixFromJson(const nlohmann::json& values, std::size_t rows, std::size_t cols);

}  // namespace honeyhsi
