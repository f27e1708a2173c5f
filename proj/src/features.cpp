#include "honeyhsi/features.hpp"

#include <algorithm>
#include <cmath>

#include "honeyhsi/error.hpp"
#include "honeyhsi/linalg.hpp"

namespace honeyhsi {

using nlohmann::json;

namespace {

constexpr int kModelVersion = 1;

void requireDim(std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw ShapeError("feature vector has " + std::to_string(actual) + " entries, model expects " +
                         std::to_string(expected));
    }
}

// Accumulates the upper triangle of Σ w·(x - c)(x - c)ᵀ and mirrors it on request.
void addOuter(Matrix& acc, std::span<const double> x, std::span<const double> center, double weight,
              std::vector<double>& scratch) {
    const std::size_t d = acc.rows();
    for (std::size_t i = 0; i < d; ++i) scratch[i] = x[i] - center[i];
    for (std::size_t i = 0; i < d; ++i) {
        const double wi = weight * scratch[i];
        if (wi == 0.0) continue;
        auto row = acc.row(i);
        for (std::size_t j = i; j < d; ++j) row[j] += wi * scratch[j];
    }
}

void mirrorUpper(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
}

std::vector<double> columnMeans(const Matrix& points) {
    std::vector<double> mean(points.cols(), 0.0);
    for (std::size_t r = 0; r < points.rows(); ++r) {
        auto row = points.row(r);
        for (std::size_t c = 0; c < points.cols(); ++c) mean[c] += row[c];
    }
    for (double& v : mean) v /= static_cast<double>(points.rows());
    return mean;
}

}  // namespace

Matrix bandMatrix(const LabeledDataset& ds) {
    const std::size_t d = ds.bandCount();
    Matrix out(ds.size(), d);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& bands = ds.instances()[i].bands;
        requireDim(d, bands.size());
        std::copy(bands.begin(), bands.end(), out.row(i).begin());
    }
    return out;
}

LdaModel fitLda(const Matrix& points, std::span<const int> labels, std::vector<std::string> classNames,
                std::size_t m) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    const std::size_t classes = classNames.size();
    if (labels.size() != n) throw ShapeError("fitLda: label count differs from point count");
    if (classes < 2) throw FitError("fitLda: at least two classes are required");
    if (m < 1 || m > classes - 1) {
        throw ArgumentError("fitLda: component count " + std::to_string(m) + " outside 1.." +
                            std::to_string(classes - 1));
    }
    if (m > d) throw ArgumentError("fitLda: component count " + std::to_string(m) + " exceeds dimension " + std::to_string(d));

    std::vector<std::size_t> counts(classes, 0);
    std::vector<std::vector<double>> means(classes, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw FitError("fitLda: label out of range");
        ++counts[y];
        auto row = points.row(i);
        for (std::size_t k = 0; k < d; ++k) means[y][k] += row[k];
    }
    for (std::size_t j = 0; j < classes; ++j) {
        if (counts[j] == 0) throw FitError("fitLda: class '" + classNames[j] + "' has no instances");
        for (double& v : means[j]) v /= static_cast<double>(counts[j]);
    }
    const std::vector<double> globalMean = columnMeans(points);
    std::vector<double> priors(classes);
    for (std::size_t j = 0; j < classes; ++j) priors[j] = static_cast<double>(counts[j]) / static_cast<double>(n);

    // S_W = Σ_j p_j · Cov_j with Cov_j the class scatter divided by n_j.
    Matrix within(d, d);
    std::vector<double> scratch(d);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        addOuter(within, points.row(i), means[y], priors[y] / static_cast<double>(counts[y]), scratch);
    }
    mirrorUpper(within);

    Matrix between(d, d);
    for (std::size_t j = 0; j < classes; ++j) addOuter(between, means[j], globalMean, 1.0, scratch);
    mirrorUpper(between);

    const double meanDiagonal = within.trace() / static_cast<double>(d);
    const double ridge = kLdaShrinkage * (meanDiagonal > 0.0 ? meanDiagonal : 1.0);
    for (std::size_t i = 0; i < d; ++i) within(i, i) += ridge;

    // M = L⁻¹·S_B·L⁻ᵀ; S_B is symmetric so (L⁻¹·S_B)ᵀ = S_B·L⁻ᵀ.
    const Matrix chol = cholesky(within);
    const Matrix half = solveLowerTriangular(chol, between);
    Matrix whitened = solveLowerTriangular(chol, half.transposed());
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double avg = 0.5 * (whitened(i, j) + whitened(j, i));
            whitened(i, j) = avg;
            whitened(j, i) = avg;
        }
    }
    const EigenResult eig = eigSymmetric(whitened);
    const Matrix directions = solveLowerTriangularTransposed(chol, eig.eigenvectors.leftColumns(m));

    LdaModel model;
    model.projection = Matrix(d, m);
    model.eigenvalues.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
        double len = 0.0;
        for (std::size_t r = 0; r < d; ++r) len += directions(r, c) * directions(r, c);
        len = std::sqrt(len);
        for (std::size_t r = 0; r < d; ++r) model.projection(r, c) = directions(r, c) / len;
        model.eigenvalues[c] = std::max(0.0, eig.eigenvalues[c]);
    }
    model.classNames = std::move(classNames);
    model.classMeans = std::move(means);
    model.globalMean = globalMean;
    model.classPriors = std::move(priors);
    return model;
}

LdaModel fitLda(const LabeledDataset& train, std::size_t m) {
    const auto labels = train.labelIndices();
    return fitLda(bandMatrix(train), labels, train.classNames(), m);
}

std::vector<double> projectLda(const LdaModel& model, std::span<const double> x) {
    requireDim(model.inputDim(), x.size());
    return multiplyTransposed(model.projection, x);
}

PcaModel fitPca(const Matrix& points, std::size_t m) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (n < 2) throw FitError("fitPca: at least two instances are required");
    if (m < 1 || m > d) {
        throw ArgumentError("fitPca: component count " + std::to_string(m) + " outside 1.." + std::to_string(d));
    }
    const std::vector<double> mean = columnMeans(points);
    Matrix cov(d, d);
    std::vector<double> scratch(d);
    const double weight = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) addOuter(cov, points.row(i), mean, weight, scratch);
    mirrorUpper(cov);

    const EigenResult eig = eigSymmetric(cov);
    PcaModel model;
    model.components = eig.eigenvectors.leftColumns(m);
    model.explainedVariance.resize(m);
    for (std::size_t c = 0; c < m; ++c) model.explainedVariance[c] = std::max(0.0, eig.eigenvalues[c]);
    model.mean = mean;
    return model;
}

PcaModel fitPca(const LabeledDataset& train, std::size_t m) { return fitPca(bandMatrix(train), m); }

std::vector<double> projectPca(const PcaModel& model, std::span<const double> x) {
    requireDim(model.inputDim(), x.size());
    std::vector<double> centered(x.begin(), x.end());
    for (std::size_t k = 0; k < centered.size(); ++k) centered[k] -= model.mean[k];
    return multiplyTransposed(model.components, centered);
}

// ---------------------------------------------------------------------------
// JSON

json matrixToJson(const Matrix& m) { return json(m.data()); }

Matrix matrixFromJson(const json& values, std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, values.get<std::vector<double>>());
}

namespace {

void checkHeader(const json& doc, const char* kind) {
    if (!doc.is_object() || doc.value("kind", "") != kind) {
        throw ParseError(std::string("model document is not of kind '") + kind + "'");
    }
    if (doc.value("version", 0) != kModelVersion) {
        throw ParseError("unsupported model version " + doc.value("version", json(0)).dump());
    }
}

template <typename Fn>
auto parsingModel(const char* kind, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + kind + " model: " + e.what());
    } catch (const ShapeError& e) {
        throw ParseError(std::string("malformed ") + kind + " model: " + e.what());
    }
}

}  // namespace

json toJson(const LdaModel& model) {
    return json{{"kind", "lda"},
                {"version", kModelVersion},
                {"d", model.inputDim()},
                {"m", model.components()},
                {"projection", matrixToJson(model.projection)},
                {"eigenvalues", model.eigenvalues},
                {"class_names", model.classNames},
                {"class_means", model.classMeans},
                {"global_mean", model.globalMean},
                {"class_priors", model.classPriors}};
}

json toJson(const PcaModel& model) {
    return json{{"kind", "pca"},
                {"version", kModelVersion},
                {"d", model.inputDim()},
                {"m", model.componentCount()},
                {"components", matrixToJson(model.components)},
                {"explained_variance", model.explainedVariance},
                {"mean", model.mean}};
}

LdaModel ldaFromJson(const json& doc) {
    checkHeader(doc, "lda");
    return parsingModel("lda", [&] {
        LdaModel model;
        const auto d = doc.at("d").get<std::size_t>();
        const auto m = doc.at("m").get<std::size_t>();
        model.projection = matrixFromJson(doc.at("projection"), d, m);
        model.eigenvalues = doc.at("eigenvalues").get<std::vector<double>>();
        model.classNames = doc.at("class_names").get<std::vector<std::string>>();
        model.classMeans = doc.at("class_means").get<std::vector<std::vector<double>>>();
        model.globalMean = doc.at("global_mean").get<std::vector<double>>();
        model.classPriors = doc.at("class_priors").get<std::vector<double>>();
        if (model.eigenvalues.size() != m) throw ParseError("lda model: eigenvalue count differs from m");
        return model;
    });
}

PcaModel pcaFromJson(const json& doc) {
    checkHeader(doc, "pca");
    return parsingModel("pca", [&] {
        PcaModel model;
        const auto d = doc.at("d").get<std::size_t>();
        const auto m = doc.at("m").get<std::size_t>();
        model.components = matrixFromJson(doc.at("components"), d, m);
        model.explainedVariance = doc.at("explained_variance").get<std::vector<double>>();
        model.mean = doc.at("mean").get<std::vector<double>>();
        if (model.mean.size() != d) throw ParseError("pca model: mean length differs from d");
        return model;
    });
}

}  // namespace honeyhsi
