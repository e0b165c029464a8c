#include "pframe/errors.hpp"
#include "pframe/kernels.hpp"

#include <cmath>

namespace pframe::kernels {

std::int64_t cell_index(double x, double h)
{
    auto k = static_cast<std::int64_t>(std::floor(x / h));
    // x / h can round across an integer; settle against the anchors themselves.
    if (static_cast<double>(k + 1) * h <= x)
        ++k;
    else if (static_cast<double>(k) * h > x)
        --k;
    return k;
}

Matrix second_moment_serial(PointSet points, std::span<const double> weights)
{
    const std::size_t d = points.dim;
    const std::size_t n = points.size();
    if (!weights.empty() && weights.size() != n)
        throw InvalidInput("second_moment: weight count does not match point count");
    const double uniform = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
    Matrix s(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = points.point(i);
        const double w = weights.empty() ? uniform : weights[i];
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b)
                s(a, b) += w * x[a] * x[b];
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < a; ++b)
            s(a, b) = s(b, a);
    return s;
}

std::vector<double> cost_matrix_serial(PointSet src, PointSet dst)
{
    if (src.dim != dst.dim)
        throw InvalidInput("cost_matrix: dimension mismatch");
    const std::size_t n = src.size();
    const std::size_t m = dst.size();
    std::vector<double> c(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            c[i * m + j] = squared_distance(src.point(i), dst.point(j));
    return c;
}

std::vector<std::int64_t> cell_indices_serial(PointSet points, double h)
{
    std::vector<std::int64_t> out(points.coords.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = cell_index(points.coords[k], h);
    return out;
}

} // namespace pframe::kernels
