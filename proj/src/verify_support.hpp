#pragma once

#include "pframe/frames.hpp"
#include "pframe/matrix.hpp"
#include "pframe/rng.hpp"
#include "pframe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pframe::detail {

inline FiniteFrame frame_from_columns(const Matrix& m)
{
    std::vector<Vector> v(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        v[j] = m.column(j);
    return FiniteFrame(m.rows(), std::move(v));
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng)
{
    Matrix z(rows, cols);
    for (double& x : z.data())
        x = rng.normal();
    return z;
}

/// Haar-ish orthogonal matrix: eigenvectors of a Gaussian symmetric matrix.
inline Matrix random_orthogonal(std::size_t d, Rng& rng)
{
    const Matrix g = gaussian_matrix(d, d, rng);
    return sym_eig(SymMatrix(0.5 * (g + g.transpose()))).eigenvectors;
}

inline double relative_spread(const FrameBounds& b)
{
    return b.upper > 0.0 ? b.lower / b.upper : 0.0;
}

inline double deviation_from_identity(const SymMatrix& s)
{
    return op_norm_diff(s, SymMatrix::identity(s.dim()));
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace pframe::detail
