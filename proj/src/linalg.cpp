#include "honeyhsi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "honeyhsi/error.hpp"

namespace honeyhsi {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

std::vector<double> multiplyTransposed(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.rows()) {
        throw ShapeError("expected a vector of length " + std::to_string(a.rows()) + ", got " +
                         std::to_string(x.size()));
    }
    std::vector<double> out(a.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double xr = x[r];
        auto row = a.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c) out[c] += row[c] * xr;
    }
    return out;
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > 0.0)) {
            throw NotPositiveDefiniteError("cholesky: non-positive pivot " + std::to_string(pivot) + " at index " +
                                           std::to_string(j));
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            l(i, j) = sum / ljj;
        }
    }
    return l;
}

namespace {

void checkTriangularSolve(const Matrix& l, const Matrix& b) {
    if (l.rows() != l.cols()) throw ShapeError("triangular solve: matrix is not square");
    if (b.rows() != l.rows()) throw ShapeError("triangular solve: right-hand side has wrong row count");
    for (std::size_t i = 0; i < l.rows(); ++i) {
        if (l(i, i) == 0.0) throw SingularError("triangular solve: zero diagonal at index " + std::to_string(i));
    }
}

}  // namespace

Matrix solveLowerTriangular(const Matrix& l, const Matrix& b) {
    checkTriangularSolve(l, b);
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        for (std::size_t k = 0; k < i; ++k) {
            const double lik = l(i, k);
            if (lik == 0.0) continue;
            auto xk = x.row(k);
            for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= lik * xk[c];
        }
        const double d = l(i, i);
        for (double& v : xi) v /= d;
    }
    return x;
}

Matrix solveLowerTriangularTransposed(const Matrix& l, const Matrix& b) {
    checkTriangularSolve(l, b);
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t ii = n; ii-- > 0;) {
        auto xi = x.row(ii);
        for (std::size_t k = ii + 1; k < n; ++k) {
            const double lki = l(k, ii);
            if (lki == 0.0) continue;
            auto xk = x.row(k);
            for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= lki * xk[c];
        }
        const double d = l(ii, ii);
        for (double& v : xi) v /= d;
    }
    return x;
}

namespace {

constexpr int kMaxJacobiSweeps = 100;

double offDiagonalNorm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

}  // namespace

EigenResult eigSymmetric(const Matrix& input) {
    if (input.rows() != input.cols()) throw ShapeError("eigSymmetric: matrix is not square");
    const std::size_t n = input.rows();
    const double norm = input.frobeniusNorm();

    double asymmetry = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) asymmetry = std::max(asymmetry, std::abs(input(i, j) - input(j, i)));
    if (asymmetry > 1e-8 * norm) {
        throw ShapeError("eigSymmetric: matrix is not symmetric (max asymmetry " + std::to_string(asymmetry) + ")");
    }

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    Matrix v = Matrix::identity(n);

    const double threshold = 1e-12 * norm;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (offDiagonalNorm(a) <= threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    const double newKp = c * akp - s * akq;
                    const double newKq = s * akp + c * akq;
                    a(k, p) = newKp;
                    a(p, k) = newKp;
                    a(k, q) = newKq;
                    a(q, k) = newKq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && offDiagonalNorm(a) > threshold) {
        throw ConvergenceError("eigSymmetric: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return a(l, l) > a(r, r); });

    EigenResult result;
    result.eigenvalues.resize(n);
    result.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        result.eigenvalues[k] = a(src, src);
        double len = 0.0;
        std::size_t pivot = 0;
        for (std::size_t r = 0; r < n; ++r) {
            len += v(r, src) * v(r, src);
            if (std::abs(v(r, src)) > std::abs(v(pivot, src))) pivot = r;
        }
        // Sign fixed so the largest-magnitude component is positive.
        const double scale = (v(pivot, src) < 0.0 ? -1.0 : 1.0) / std::sqrt(len);
        for (std::size_t r = 0; r < n; ++r) result.eigenvectors(r, k) = v(r, src) * scale;
    }
    return result;
}

}  // namespace honeyhsi
