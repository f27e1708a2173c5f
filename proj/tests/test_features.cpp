#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "honeyhsi/error.hpp"
#include "honeyhsi/features.hpp"
#include "honeyhsi/linalg.hpp"
#include "oracles.hpp"

using namespace honeyhsi;

namespace {

struct Problem {
    Matrix x;
    std::vector<int> labels;
    std::vector<std::string> names;
};

Problem randomClasses(std::size_t classes, std::size_t d, std::size_t perClass, std::mt19937_64& rng,
                      double spread = 2.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    Problem p{Matrix(classes * perClass, d), {}, {}};
    for (std::size_t c = 0; c < classes; ++c) {
        p.names.push_back("c" + std::to_string(c));
        std::vector<double> centre(d);
        for (auto& v : centre) v = spread * n(rng);
        for (std::size_t i = 0; i < perClass; ++i) {
            const std::size_t r = c * perClass + i;
            for (std::size_t k = 0; k < d; ++k) p.x(r, k) = centre[k] + n(rng) * (1.0 + 0.3 * k);
            p.labels.push_back(static_cast<int>(c));
        }
    }
    return p;
}

std::vector<std::vector<double>> rows(const Matrix& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

TEST(Lda, SeparationAxisOfTwoClouds) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(400, 2);
    std::vector<int> labels;
    for (std::size_t i = 0; i < 400; ++i) {
        const int c = i < 200 ? 0 : 1;
        x(i, 0) = n(rng) + (c == 1 ? 10.0 : 0.0);
        x(i, 1) = n(rng);
        labels.push_back(c);
    }
    const auto model = fitLda(x, labels, {"a", "b"}, 1);
    ASSERT_EQ(model.components(), 1u);
    const double cosine = std::abs(model.projection(0, 0)) /
                          std::hypot(model.projection(0, 0), model.projection(1, 0));
    EXPECT_GT(cosine, 0.99);

    // Two classes: the axis is S_W^{-1} (mu1 - mu0), up to scale.
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < 400; ++i) rows.push_back({x(i, 0), x(i, 1)});
    const auto s = oracle::ldaScatter(rows, labels, 2);
    double mu[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < 400; ++i)
        for (int k = 0; k < 2; ++k) mu[labels[i]][k] += x(i, k) / 200.0;
    const auto& w = s.withinRegularized;
    const double det = w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0);
    const double dx = mu[1][0] - mu[0][0], dy = mu[1][1] - mu[0][1];
    const double fx = (w(1, 1) * dx - w(0, 1) * dy) / det;
    const double fy = (w(0, 0) * dy - w(1, 0) * dx) / det;
    const double exact = std::abs(fx * model.projection(0, 0) + fy * model.projection(1, 0)) /
                         (std::hypot(fx, fy) * std::hypot(model.projection(0, 0), model.projection(1, 0)));
    EXPECT_GT(exact, 1.0 - 1e-9);
}

TEST(Lda, RankBoundedByClassesMinusOne) {
    std::mt19937_64 rng(22);
    const auto p = randomClasses(3, 5, 30, rng);
    const auto model = fitLda(p.x, p.labels, p.names, 2);
    EXPECT_EQ(model.eigenvalues.size(), 2u);
    EXPECT_THROW(fitLda(p.x, p.labels, p.names, 3), ArgumentError);

    // The full whitened spectrum has at most C - 1 significant values.
    const auto s = oracle::ldaScatter(rows(p.x), p.labels, 3, kLdaShrinkage);
    const Matrix l = cholesky(s.withinRegularized);
    const Matrix m = solveLowerTriangular(l, solveLowerTriangular(l, s.between).transposed());
    Matrix sym = m;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    const auto eig = eigSymmetric(sym);
    std::size_t significant = 0;
    for (double v : eig.eigenvalues) significant += v > 1e-6 * eig.eigenvalues[0];
    EXPECT_LE(significant, 2u);
}

TEST(Lda, EigenvaluesDescendingNonnegativeUnitColumns) {
    std::mt19937_64 rng(23);
    const auto p = randomClasses(5, 7, 20, rng);
    const auto model = fitLda(p.x, p.labels, p.names, 4);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_GE(model.eigenvalues[k], 0.0);
        if (k > 0) EXPECT_GE(model.eigenvalues[k - 1], model.eigenvalues[k]);
        EXPECT_NEAR(norm(model.projection.columnVector(k)), 1.0, 1e-12);
    }
}

TEST(Lda, TopEigenvalueDominatesRandomRayleighSearch) {
    std::mt19937_64 rng(24);
    const auto p = randomClasses(4, 6, 25, rng);
    const auto model = fitLda(p.x, p.labels, p.names, 3);
    const auto s = oracle::ldaScatter(rows(p.x), p.labels, 4, kLdaShrinkage);
    const double best = oracle::bestRayleighQuotient(s, 100000, rng);
    EXPECT_LE(best, model.eigenvalues[0] * (1.0 + 1e-3));
    // Random search should get reasonably close from below.
    EXPECT_GT(best, 0.5 * model.eigenvalues[0]);
    // The returned direction attains the eigenvalue as its Rayleigh quotient.
    const auto v = model.projection.columnVector(0);
    EXPECT_NEAR(oracle::quadraticForm(s.between, v) / oracle::quadraticForm(s.withinRegularized, v),
                model.eigenvalues[0], 1e-8 * model.eigenvalues[0]);
}

TEST(Lda, InvariantUnderPermutationAndRelabelling) {
    std::mt19937_64 rng(25);
    const auto p = randomClasses(4, 6, 15, rng);
    const auto base = fitLda(p.x, p.labels, p.names, 3);

    std::vector<std::size_t> order(p.x.rows());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::vector<int> relabel{2, 0, 3, 1};
    Matrix x(p.x.rows(), p.x.cols());
    std::vector<int> labels;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t k = 0; k < p.x.cols(); ++k) x(i, k) = p.x(order[i], k);
        labels.push_back(relabel[p.labels[order[i]]]);
    }
    const auto moved = fitLda(x, labels, {"w", "x", "y", "z"}, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(moved.eigenvalues[k], base.eigenvalues[k], 1e-6 * base.eigenvalues[0]);
    }
}

TEST(Lda, FitErrors) {
    Matrix x{{0.0}, {1.0}};
    EXPECT_THROW(fitLda(x, std::vector<int>{0, 0}, {"a"}, 1), FitError);
    EXPECT_THROW(fitLda(x, std::vector<int>{0, 0}, {"a", "b"}, 1), FitError);
    EXPECT_THROW(fitLda(x, std::vector<int>{0, 1}, {"a", "b"}, 0), ArgumentError);
    // Three classes in one dimension: two components would exceed d.
    EXPECT_THROW(fitLda(Matrix{{0.0}, {1.0}, {2.0}}, std::vector<int>{0, 1, 2}, {"a", "b", "c"}, 2), ArgumentError);
}

TEST(Lda, ProjectionExamples) {
    LdaModel model;
    model.projection = Matrix::identity(3);
    model.eigenvalues = {1, 1, 1};
    const std::vector<double> x{0.5, -2.0, 3.0};
    EXPECT_EQ(projectLda(model, x), x);
    EXPECT_EQ(projectLda(model, std::vector<double>(3, 0.0)), std::vector<double>(3, 0.0));
    EXPECT_THROW(projectLda(model, std::vector<double>{1.0}), ShapeError);
}

TEST(Lda, ProjectedDistancesMatchMatmulOracle) {
    std::mt19937_64 rng(26);
    const auto p = randomClasses(4, 6, 10, rng);
    const auto model = fitLda(p.x, p.labels, p.names, 3);
    const Matrix projected = oracle::naiveMatmul(p.x, model.projection);
    for (std::size_t i = 0; i + 1 < p.x.rows(); i += 7) {
        const auto a = projectLda(model, p.x.row(i));
        const auto b = projectLda(model, p.x.row(i + 1));
        double got = 0.0, want = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            got += (a[k] - b[k]) * (a[k] - b[k]);
            want += std::pow(projected(i, k) - projected(i + 1, k), 2);
        }
        EXPECT_NEAR(std::sqrt(got), std::sqrt(want), 1e-10);
    }
}

TEST(Lda, JsonRoundTrip) {
    std::mt19937_64 rng(27);
    const auto p = randomClasses(3, 4, 10, rng);
    const auto model = fitLda(p.x, p.labels, p.names, 2);
    const auto doc = toJson(model);
    EXPECT_EQ(doc["kind"], "lda");
    EXPECT_EQ(ldaFromJson(doc), model);
    EXPECT_EQ(toJson(ldaFromJson(nlohmann::json::parse(doc.dump()))).dump(), doc.dump());
    EXPECT_THROW(ldaFromJson(nlohmann::json{{"kind", "pca"}}), ParseError);
}

TEST(Pca, LineIn3d) {
    std::mt19937_64 rng(28);
    std::normal_distribution<double> n(0.0, 3.0);
    const std::vector<double> dir{1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
    Matrix x(200, 3);
    for (std::size_t i = 0; i < 200; ++i) {
        const double t = n(rng);
        for (std::size_t k = 0; k < 3; ++k) x(i, k) = 1.0 + t * dir[k];
    }
    const auto model = fitPca(x, 1);
    double cosine = 0.0;
    for (std::size_t k = 0; k < 3; ++k) cosine += model.components(k, 0) * dir[k];
    EXPECT_NEAR(std::abs(cosine), 1.0, 1e-10);
    const auto full = fitPca(x, 3);
    EXPECT_LT(full.explainedVariance[1], 1e-9);
}

TEST(Pca, IsotropicVariancesAgree) {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix x(10000, 4);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (double& v : x.row(i)) v = n(rng);
    const auto model = fitPca(x, 4);
    const auto [lo, hi] = std::minmax_element(model.explainedVariance.begin(), model.explainedVariance.end());
    EXPECT_LT(*hi / *lo, 1.1);
}

TEST(Pca, CompleteBasisReconstructs) {
    std::mt19937_64 rng(30);
    const Matrix x = oracle::randomMatrix(30, 5, rng, 3.0);
    const auto model = fitPca(x, 5);
    const Matrix vtv = matmul(model.components.transposed(), model.components);
    EXPECT_LE(oracle::maxAbsDiff(vtv, Matrix::identity(5)), 1e-8);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto z = projectPca(model, x.row(i));
        for (std::size_t k = 0; k < 5; ++k) {
            double back = model.mean[k];
            for (std::size_t j = 0; j < 5; ++j) back += model.components(k, j) * z[j];
            EXPECT_NEAR(back, x(i, k), 1e-9);
        }
    }
}

TEST(Pca, VarianceSumEqualsCovarianceTrace) {
    std::mt19937_64 rng(31);
    const Matrix x = oracle::randomMatrix(50, 6, rng, 2.0);
    const auto model = fitPca(x, 6);
    double trace = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 50; ++i) mean += x(i, k) / 50.0;
        for (std::size_t i = 0; i < 50; ++i) trace += std::pow(x(i, k) - mean, 2) / 49.0;
    }
    const double sum = std::accumulate(model.explainedVariance.begin(), model.explainedVariance.end(), 0.0);
    EXPECT_NEAR(sum, trace, 1e-8 * trace);
    for (std::size_t k = 1; k < 6; ++k) EXPECT_GE(model.explainedVariance[k - 1], model.explainedVariance[k]);
}

TEST(Pca, ProjectionExamples) {
    std::mt19937_64 rng(32);
    const Matrix x = oracle::randomMatrix(40, 4, rng);
    const auto model = fitPca(x, 3);
    for (double v : projectPca(model, model.mean)) EXPECT_NEAR(v, 0.0, 1e-14);
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> point = model.mean;
        for (std::size_t j = 0; j < 4; ++j) point[j] += model.components(j, k);
        const auto z = projectPca(model, point);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(z[j], j == k ? 1.0 : 0.0, 1e-12);
    }
    const std::vector<double> q{0.3, -1.0, 2.0, 0.1};
    const auto z = projectPca(model, q);
    for (std::size_t j = 0; j < 3; ++j) {
        double want = 0.0;
        for (std::size_t k = 0; k < 4; ++k) want += model.components(k, j) * (q[k] - model.mean[k]);
        EXPECT_NEAR(z[j], want, 1e-13);
    }
    EXPECT_THROW(projectPca(model, std::vector<double>{1.0}), ShapeError);
}

TEST(Pca, ArgumentErrorsAndJson) {
    std::mt19937_64 rng(33);
    const Matrix x = oracle::randomMatrix(10, 3, rng);
    EXPECT_THROW(fitPca(x, 4), ArgumentError);
    EXPECT_THROW(fitPca(x, 0), ArgumentError);
    EXPECT_THROW(fitPca(Matrix(1, 3), 1), FitError);
    const auto model = fitPca(x, 2);
    EXPECT_EQ(pcaFromJson(nlohmann::json::parse(toJson(model).dump())), model);
}
