#include "pframe/frames.hpp"

#include "pframe/errors.hpp"
#include "pframe/rng.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace pframe {

namespace {

void validate(std::size_t dim, const std::vector<Vector>& vectors, const Vector& weights)
{
    if (dim == 0)
        throw InvalidInput("frame dimension must be positive");
    if (vectors.empty())
        throw InvalidInput("frame must contain at least one vector");
    if (weights.size() != vectors.size())
        throw InvalidInput("frame has " + std::to_string(vectors.size()) + " vectors but " +
                           std::to_string(weights.size()) + " weights");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim)
            throw InvalidInput("frame vector " + std::to_string(i) + " has length " +
                               std::to_string(vectors[i].size()) + ", expected " + std::to_string(dim));
        for (double x : vectors[i])
            if (!std::isfinite(x))
                throw InvalidInput("frame vector " + std::to_string(i) + " has a non-finite entry");
        if (!std::isfinite(weights[i]) || weights[i] < 0.0)
            throw InvalidInput("frame weight " + std::to_string(i) + " is negative or non-finite");
    }
}

SpectralData checked_spectrum(const FiniteFrame& f)
{
    auto sd = sym_eig(frame_operator(f));
    if (!(sd.max() > 0.0) || sd.min() <= kFrameFloor * sd.max()) {
        std::ostringstream msg;
        msg << "not a frame: lower bound " << sd.min() << " ~ 0 relative to upper bound " << sd.max();
        throw DomainError(msg.str());
    }
    return sd;
}

} // namespace

FiniteFrame::FiniteFrame(std::size_t dim, std::vector<Vector> vectors)
    : FiniteFrame(dim, std::move(vectors), Vector{})
{
}

FiniteFrame::FiniteFrame(std::size_t dim, std::vector<Vector> vectors, Vector weights)
    : dim_(dim), vectors_(std::move(vectors)), weights_(std::move(weights))
{
    if (weights_.empty())
        weights_.assign(vectors_.size(), 1.0);
    validate(dim_, vectors_, weights_);
}

Matrix FiniteFrame::weighted_synthesis() const
{
    Matrix m(dim_, vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        const double s = std::sqrt(weights_[i]);
        for (std::size_t k = 0; k < dim_; ++k)
            m(k, i) = s * vectors_[i][k];
    }
    return m;
}

SymMatrix frame_operator(const FiniteFrame& f)
{
    const std::size_t d = f.dim();
    Matrix s(d, d);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& v = f.vector(i);
        const double w = f.weight(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double wa = w * v[a];
            for (std::size_t b = a; b < d; ++b)
                s(a, b) += wa * v[b];
        }
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < a; ++b)
            s(a, b) = s(b, a);
    return SymMatrix(std::move(s));
}

FrameBounds frame_bounds(const FiniteFrame& f)
{
    const auto sd = sym_eig(frame_operator(f));
    return {sd.min(), sd.max()};
}

double frame_distance(const FiniteFrame& f, const FiniteFrame& g)
{
    if (f.dim() != g.dim())
        throw InvalidInput("frame_distance: dimension mismatch (" + std::to_string(f.dim()) + " vs " +
                           std::to_string(g.dim()) + ")");
    if (f.size() != g.size())
        throw InvalidInput("frame_distance: cardinality mismatch (" + std::to_string(f.size()) + " vs " +
                           std::to_string(g.size()) + ")");
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double sf = std::sqrt(f.weight(i));
        const double sg = std::sqrt(g.weight(i));
        for (std::size_t k = 0; k < f.dim(); ++k) {
            const double t = sf * f.vector(i)[k] - sg * g.vector(i)[k];
            total += t * t;
        }
    }
    return std::sqrt(total);
}

FiniteFrame canonical_parseval(const FiniteFrame& f)
{
    const auto sd = checked_spectrum(f);
    const SymMatrix t = inv_sqrt(sd, kFrameFloor * sd.max());
    std::vector<Vector> out;
    out.reserve(f.size());
    for (const auto& v : f.vectors())
        out.push_back(t.matrix() * v);
    return FiniteFrame(f.dim(), std::move(out), f.weights());
}

double closest_parseval_distance(const SpectralData& sd)
{
    double total = 0.0;
    for (double l : sd.eigenvalues) {
        const double t = std::sqrt(l) - 1.0;
        total += t * t;
    }
    return std::sqrt(total);
}

double closest_parseval_distance(const FiniteFrame& f)
{
    return closest_parseval_distance(checked_spectrum(f));
}

std::vector<Vector> rows_in_basis(const FiniteFrame& g, const Matrix& basis)
{
    if (basis.rows() != g.dim() || basis.cols() != g.dim())
        throw InvalidInput("rows_in_basis: basis has the wrong shape");
    // rows of O^T Phi_w: entry (k, i) = <o_k, sqrt(w_i) psi_i>
    const Matrix rows = basis.transpose() * g.weighted_synthesis();
    std::vector<Vector> out(g.dim());
    for (std::size_t k = 0; k < g.dim(); ++k)
        out[k].assign(rows.row(k).begin(), rows.row(k).end());
    return out;
}

RowsView rows_in_eigenbasis(const FiniteFrame& f)
{
    auto sd = sym_eig(frame_operator(f));
    RowsView view;
    view.rows = rows_in_basis(f, sd.eigenvectors);
    view.basis = std::move(sd.eigenvectors);
    view.eigenvalues = std::move(sd.eigenvalues);
    return view;
}

FiniteFrame split_vector(const FiniteFrame& f, std::size_t index, std::span<const double> coefficients)
{
    if (index >= f.size())
        throw InvalidInput("split_vector: index " + std::to_string(index) + " out of range");
    if (coefficients.empty())
        throw InvalidInput("split_vector: need at least one coefficient");
    double sum_sq = 0.0;
    for (double a : coefficients)
        sum_sq += a * a;
    if (std::abs(sum_sq - 1.0) > 1e-12)
        throw InvalidInput("split_vector: coefficients must satisfy sum a_j^2 = 1");

    std::vector<Vector> vectors;
    Vector weights;
    vectors.reserve(f.size() + coefficients.size() - 1);
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (k != index) {
            vectors.push_back(f.vector(k));
            weights.push_back(f.weight(k));
            continue;
        }
        for (double a : coefficients) {
            Vector piece = f.vector(k);
            for (double& x : piece)
                x *= a;
            vectors.push_back(std::move(piece));
            weights.push_back(f.weight(k));
        }
    }
    return FiniteFrame(f.dim(), std::move(vectors), std::move(weights));
}

FiniteFrame random_parseval(std::size_t dim, std::size_t count, std::uint64_t seed)
{
    if (dim == 0 || count < dim)
        throw InvalidInput("random_parseval: need count >= dim >= 1 (got dim=" + std::to_string(dim) +
                           ", count=" + std::to_string(count) + ")");
    Rng rng(seed);
    Matrix rows(dim, count);
    for (std::size_t k = 0; k < dim; ++k) {
        for (;;) {
            auto r = rows.row(k);
            for (double& x : r)
                x = rng.normal();
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t j = 0; j < k; ++j) {
                    const double c = dot(r, rows.row(j));
                    auto q = rows.row(j);
                    for (std::size_t i = 0; i < count; ++i)
                        r[i] -= c * q[i];
                }
            const double n = norm(r);
            if (n > 1e-8) {
                for (double& x : r)
                    x /= n;
                break;
            }
        }
    }
    std::vector<Vector> vectors(count, Vector(dim));
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t k = 0; k < dim; ++k)
            vectors[i][k] = rows(k, i);
    return FiniteFrame(dim, std::move(vectors));
}

bool is_parseval(const FiniteFrame& f, double tol)
{
    return op_norm_diff(frame_operator(f), SymMatrix::identity(f.dim())) <= tol;
}

double closest_parseval_sum(const FiniteFrame& f)
{
    const auto sd = checked_spectrum(f);
    const SymMatrix t = inv_sqrt(sd, kFrameFloor * sd.max());
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vector img = t.matrix() * f.vector(i);
        total += f.weight(i) * squared_distance(f.vector(i), img);
    }
    return total;
}

FiniteFrame scaled(const FiniteFrame& f, double c)
{
    std::vector<Vector> vectors = f.vectors();
    for (auto& v : vectors)
        for (double& x : v)
            x *= c;
    return FiniteFrame(f.dim(), std::move(vectors), f.weights());
}

} // namespace pframe
