#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pframe {

using Vector = std::vector<double>;

/// Dense row-major matrix. Small dimensions only (d of a few dozen, N of a
/// few thousand); no expression templates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    /// Builds from nested rows; all rows must have the same length.
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    Matrix transpose() const;
    double max_abs() const;
    double frobenius() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
/// max_ij |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Symmetric matrix with validated entries. Construction checks symmetry to
/// 1e-12 relative to max|entry| and finiteness, then stores the exactly
/// symmetrized average.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(Matrix m);

    static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
    static SymMatrix zeros(std::size_t n) { return SymMatrix(Matrix(n, n)); }

    std::size_t dim() const { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }

private:
    Matrix m_;
};

} // namespace pframe
