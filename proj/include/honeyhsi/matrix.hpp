#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace honeyhsi {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Throws ShapeError unless data.size() == rows * cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    /// Literal constructor; every row must have the same length.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);
    /// Single column built from a vector.
    static Matrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    std::vector<double> columnVector(std::size_t c) const;

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transposed() const;
    /// Leading `count` columns.
    Matrix leftColumns(std::size_t count) const;

    double frobeniusNorm() const;
    double trace() const;
    bool allFinite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

}  // namespace honeyhsi
