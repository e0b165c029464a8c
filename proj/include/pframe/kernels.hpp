#pragma once

#include "pframe/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

/// Data-parallel inner loops.
///
/// Each kernel has a plain serial reference (`*_serial`) and an OpenMP
/// version (`*_parallel`). The parallel versions split work into fixed-size
/// blocks and combine partial results in block order, so their output does
/// not depend on the number of threads. They agree with the serial reference
/// up to summation order. The serial versions are kept for testing and for
/// the benchmark.
namespace pframe::kernels {

/// Points are stored row-major, `dim` doubles per point.
struct PointSet {
    std::span<const double> coords;
    std::size_t dim = 0;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const { return coords.subspan(i * dim, dim); }
};

inline constexpr std::size_t kBlockSize = 2048;

/// sum_i w_i x_i x_i^T (upper triangle mirrored). Empty weights mean 1/K each.
Matrix second_moment_serial(PointSet points, std::span<const double> weights);
Matrix second_moment_parallel(PointSet points, std::span<const double> weights);

/// Row-major N x M matrix of squared Euclidean distances.
std::vector<double> cost_matrix_serial(PointSet src, PointSet dst);
std::vector<double> cost_matrix_parallel(PointSet src, PointSet dst);

/// Integer cube index of every coordinate, i.e. k with k*h <= x < (k+1)*h
/// where the products are evaluated exactly as the anchors are.
std::vector<std::int64_t> cell_indices_serial(PointSet points, double h);
std::vector<std::int64_t> cell_indices_parallel(PointSet points, double h);

/// Single-coordinate cube index, shared by both kernels.
std::int64_t cell_index(double x, double h);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

} // namespace pframe::kernels
