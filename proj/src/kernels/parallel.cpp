#include "pframe/errors.hpp"
#include "pframe/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdint>

namespace pframe::kernels {

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Matrix second_moment_parallel(PointSet points, std::span<const double> weights)
{
    const std::size_t d = points.dim;
    const std::size_t n = points.size();
    if (!weights.empty() && weights.size() != n)
        throw InvalidInput("second_moment: weight count does not match point count");
    const double uniform = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    // one packed upper triangle per block
    const std::size_t tri = d * (d + 1) / 2;
    std::vector<double> partial(blocks * tri, 0.0);

#pragma omp parallel for schedule(static)
    for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(blocks); ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        double* acc = partial.data() + b * tri;
        const std::size_t end = std::min(n, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) {
            const auto x = points.point(i);
            const double w = weights.empty() ? uniform : weights[i];
            std::size_t t = 0;
            for (std::size_t a = 0; a < d; ++a) {
                const double wa = w * x[a];
                for (std::size_t c = a; c < d; ++c)
                    acc[t++] += wa * x[c];
            }
        }
    }

    Matrix s(d, d);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t t = 0;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t c = a; c < d; ++c)
                s(a, c) += partial[b * tri + t++];
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t c = 0; c < a; ++c)
            s(a, c) = s(c, a);
    return s;
}

std::vector<double> cost_matrix_parallel(PointSet src, PointSet dst)
{
    if (src.dim != dst.dim)
        throw InvalidInput("cost_matrix: dimension mismatch");
    const std::size_t n = src.size();
    const std::size_t m = dst.size();
    std::vector<double> c(n * m);

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto x = src.point(i);
        for (std::size_t j = 0; j < m; ++j)
            c[i * m + j] = squared_distance(x, dst.point(j));
    }
    return c;
}

std::vector<std::int64_t> cell_indices_parallel(PointSet points, double h)
{
    std::vector<std::int64_t> out(points.coords.size());
    const auto total = static_cast<std::int64_t>(out.size());

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < total; ++k)
        out[static_cast<std::size_t>(k)] = cell_index(points.coords[static_cast<std::size_t>(k)], h);
    return out;
}

} // namespace pframe::kernels
