#pragma once

#include "pframe/matrix.hpp"
#include "pframe/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pframe {

/// A finite frame {phi_i} in R^d with nonnegative weights w_i.
///
/// Every formula treats the weighted system {sqrt(w_i) phi_i}; a plain frame
/// has all weights equal to one, a finite probabilistic frame has weights
/// summing to one.
class FiniteFrame {
public:
    FiniteFrame() = default;
    /// Unit weights.
    FiniteFrame(std::size_t dim, std::vector<Vector> vectors);
    FiniteFrame(std::size_t dim, std::vector<Vector> vectors, Vector weights);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    const std::vector<Vector>& vectors() const { return vectors_; }
    const Vector& weights() const { return weights_; }
    const Vector& vector(std::size_t i) const { return vectors_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// d x N matrix whose i-th column is sqrt(w_i) phi_i.
    Matrix weighted_synthesis() const;

private:
    std::size_t dim_ = 0;
    std::vector<Vector> vectors_;
    Vector weights_;
};

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Rows of O^T Phi_w, where S = O D O^T. Row k has squared norm lambda_k.
struct RowsView {
    std::vector<Vector> rows;
    Matrix basis;
    Vector eigenvalues;
};

/// Relative floor below which S^{-1/2} is refused: lambda_min <= 1e-10 * lambda_max.
inline constexpr double kFrameFloor = 1e-10;

SymMatrix frame_operator(const FiniteFrame& f);
FrameBounds frame_bounds(const FiniteFrame& f);

/// Index-paired distance sqrt(sum_i ||sqrt(w_i) phi_i - sqrt(v_i) psi_i||^2).
/// Vectors are matched by position; no permutation is searched.
double frame_distance(const FiniteFrame& f, const FiniteFrame& g);

/// {S^{-1/2} phi_i} with the weights unchanged. Throws DomainError when the
/// frame operator is numerically singular.
FiniteFrame canonical_parseval(const FiniteFrame& f);

/// Distance from f to its canonical Parseval frame computed from the spectrum
/// of S alone: sqrt(sum_k (sqrt(lambda_k) - 1)^2).
double closest_parseval_distance(const FiniteFrame& f);
double closest_parseval_distance(const SpectralData& sd);

RowsView rows_in_eigenbasis(const FiniteFrame& f);
/// Rows of g written in the eigenbasis of another frame (the P_i of a pair).
std::vector<Vector> rows_in_basis(const FiniteFrame& g, const Matrix& basis);

/// Replaces vector `index` by {a_j phi_index}, inserted in place; each copy
/// keeps the original weight. Requires sum a_j^2 = 1 within 1e-12.
FiniteFrame split_vector(const FiniteFrame& f, std::size_t index, std::span<const double> coefficients);

/// Random Parseval frame: a d x N Gaussian matrix with its rows
/// orthonormalized (Gram-Schmidt, two passes). Unit weights.
FiniteFrame random_parseval(std::size_t dim, std::size_t count, std::uint64_t seed);

bool is_parseval(const FiniteFrame& f, double tol);

/// Weighted sum sum_i w_i ||phi_i - S^{-1/2} phi_i||^2 with S the frame
/// operator of f itself.
double closest_parseval_sum(const FiniteFrame& f);

/// {c phi_i}, weights unchanged.
FiniteFrame scaled(const FiniteFrame& f, double c);

} // namespace pframe
