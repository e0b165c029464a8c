#pragma once

#include "pframe/frames.hpp"
#include "pframe/matrix.hpp"

#include <cstddef>
#include <vector>

namespace pframe {

/// Finitely supported probability measure sum_i w_i delta_{x_i}.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    /// Requires |sum w - 1| <= 1e-12, w >= 0 and finite atoms.
    DiscreteMeasure(std::size_t dim, std::vector<Vector> atoms, Vector weights);

    /// Accepts |sum w - 1| <= tol and divides by the sum. Used when loading files.
    static DiscreteMeasure normalized(std::size_t dim, std::vector<Vector> atoms, Vector weights, double tol = 1e-9);
    static DiscreteMeasure uniform(std::size_t dim, std::vector<Vector> atoms);
    static DiscreteMeasure dirac(Vector x);
    /// Reads a frame whose weights already sum to one.
    static DiscreteMeasure from_frame(const FiniteFrame& f);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Vector>& atoms() const { return atoms_; }
    const Vector& weights() const { return weights_; }
    const Vector& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Atoms packed row-major, `dim` doubles each.
    std::vector<double> packed() const;
    FiniteFrame as_frame() const { return FiniteFrame(dim_, atoms_, weights_); }

private:
    std::size_t dim_ = 0;
    std::vector<Vector> atoms_;
    Vector weights_;
};

inline constexpr double kMassTolerance = 1e-12;

/// Merges atoms closer than `radius` (weights summed, first occurrence kept)
/// and drops zero-weight atoms. `group[i]` is the index of the merged atom
/// that original atom i went to, or npos for a dropped atom.
struct MergedAtoms {
    DiscreteMeasure measure;
    std::vector<std::size_t> group;
};
MergedAtoms merge_atoms(const DiscreteMeasure& m, double radius = 1e-12);

/// S_mu = sum_i w_i x_i x_i^T.
SymMatrix second_moment(const DiscreteMeasure& m);

/// Atoms S^{-1/2} x_i with the weights unchanged. Throws DomainError when S
/// is numerically singular.
DiscreteMeasure push_forward_canonical(const DiscreteMeasure& m);

} // namespace pframe
