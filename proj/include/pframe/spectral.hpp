#pragma once

#include "pframe/matrix.hpp"

#include <cstddef>

namespace pframe {

/// Eigendecomposition M = O diag(eigenvalues) O^T.
///
/// Eigenvalues are sorted in descending order; the k-th column of
/// `eigenvectors` belongs to eigenvalues[k]. Each eigenvector is signed so
/// that its largest-magnitude component is positive (lowest index on ties).
/// Under repeated eigenvalues the basis of the eigenspace is whatever the
/// sweep produced; only spectral functions of M are basis independent.
struct SpectralData {
    Vector eigenvalues;
    Matrix eigenvectors;
    std::size_t sweeps = 0;

    double max() const { return eigenvalues.front(); }
    double min() const { return eigenvalues.back(); }
};

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius mass drops below
/// 1e-14 * ||M||_F or after 100 sweeps.
SpectralData sym_eig(const SymMatrix& m);

/// Rebuilds O f(D) O^T for a spectral function applied entrywise to the
/// eigenvalues.
template <typename F>
SymMatrix spectral_function(const SpectralData& sd, F&& f)
{
    const std::size_t n = sd.eigenvalues.size();
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(sd.eigenvalues[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const double oik = sd.eigenvectors(i, k) * fk;
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += oik * sd.eigenvectors(j, k);
        }
    }
    return SymMatrix(std::move(out));
}

inline constexpr double kDefaultSpectralFloor = 1e-10;

/// M^{-1/2}. Throws DomainError when some eigenvalue is <= floor.
SymMatrix inv_sqrt(const SymMatrix& m, double floor = kDefaultSpectralFloor);
SymMatrix inv_sqrt(const SpectralData& sd, double floor = kDefaultSpectralFloor);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-12, 0) are
/// clamped to zero; anything more negative throws DomainError.
SymMatrix sqrt_spd(const SymMatrix& m);
SymMatrix sqrt_spd(const SpectralData& sd);

/// Spectral norm max_k |lambda_k|.
double op_norm(const SymMatrix& m);

/// Spectral norm of the difference of two symmetric matrices.
double op_norm_diff(const SymMatrix& a, const SymMatrix& b);

} // namespace pframe
