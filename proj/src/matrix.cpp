#include "pframe/matrix.hpp"

#include "pframe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pframe {

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag)
{
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
        m(i, i) = diag[i];
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows)
{
    if (rows.empty())
        return {};
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols)
            throw InvalidInput("ragged rows: row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " entries, expected " +
                               std::to_string(cols));
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

Vector Matrix::column(std::size_t j) const
{
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const
{
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

double Matrix::frobenius() const
{
    double s = 0.0;
    for (double v : data_)
        s += v * v;
    return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        throw InvalidInput("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, std::span<const double> x)
{
    if (a.cols() != x.size())
        throw InvalidInput("matrix-vector shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = dot(a.row(i), x);
    return y;
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("matrix sum shape mismatch");
    Matrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k)
        cd[k] += bd[k];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("matrix difference shape mismatch");
    Matrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < cd.size(); ++k)
        cd[k] -= bd[k];
    return c;
}

Matrix operator*(double s, const Matrix& a)
{
    Matrix c = a;
    for (double& v : c.data())
        v *= s;
    return c;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("matrix comparison shape mismatch");
    double m = 0.0;
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t k = 0; k < ad.size(); ++k)
        m = std::max(m, std::abs(ad[k] - bd[k]));
    return m;
}

SymMatrix::SymMatrix(Matrix m)
{
    if (m.rows() != m.cols())
        throw InvalidInput("symmetric matrix must be square, got " + std::to_string(m.rows()) +
                           "x" + std::to_string(m.cols()));
    for (double v : m.data())
        if (!std::isfinite(v))
            throw InvalidInput("matrix has non-finite entries");
    const double scale = m.max_abs();
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale)
                throw InvalidInput("matrix is not symmetric at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }
    m_ = std::move(m);
}

} // namespace pframe
