#include "pframe/spectral.hpp"

#include "pframe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pframe {

namespace {

constexpr double kOffDiagonalTolerance = 1e-14;
constexpr std::size_t kMaxSweeps = 100;

double off_diagonal_mass(const Matrix& a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j)
                s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Rotation in the (p,q) plane that annihilates a(p,q); accumulates into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q)
{
    const double apq = a(p, q);
    const double app = a(p, p);
    const double aqq = a(q, q);
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q)
            continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = a(p, k) = c * akp - s * akq;
        a(k, q) = a(q, k) = s * akp + c * akq;
    }
    a(p, p) = app - t * apq;
    a(q, q) = aqq + t * apq;
    a(p, q) = a(q, p) = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

} // namespace

SpectralData sym_eig(const SymMatrix& m)
{
    const std::size_t n = m.dim();
    Matrix a = m.matrix();
    Matrix v = Matrix::identity(n);
    const double target = kOffDiagonalTolerance * a.frobenius();

    std::size_t sweep = 0;
    while (sweep < kMaxSweeps && off_diagonal_mass(a) > target) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                // Negligible relative to both diagonal entries: drop it.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SpectralData out;
    out.sweeps = sweep;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.eigenvalues[k] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(lead, src)))
                lead = i;
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i)
            out.eigenvectors(i, k) = sign * v(i, src);
    }
    return out;
}

SymMatrix inv_sqrt(const SpectralData& sd, double floor)
{
    if (!(floor > 0.0))
        throw InvalidInput("inv_sqrt floor must be positive");
    if (sd.min() <= floor) {
        std::ostringstream msg;
        msg << "matrix is numerically singular: smallest eigenvalue " << sd.min()
            << " <= floor " << floor;
        throw DomainError(msg.str());
    }
    return spectral_function(sd, [](double l) { return 1.0 / std::sqrt(l); });
}

SymMatrix inv_sqrt(const SymMatrix& m, double floor) { return inv_sqrt(sym_eig(m), floor); }

SymMatrix sqrt_spd(const SpectralData& sd)
{
    if (sd.min() < -1e-12) {
        std::ostringstream msg;
        msg << "matrix is not positive semidefinite: eigenvalue " << sd.min();
        throw DomainError(msg.str());
    }
    return spectral_function(sd, [](double l) { return l > 0.0 ? std::sqrt(l) : 0.0; });
}

SymMatrix sqrt_spd(const SymMatrix& m) { return sqrt_spd(sym_eig(m)); }

double op_norm(const SymMatrix& m)
{
    if (m.dim() == 0)
        return 0.0;
    const auto sd = sym_eig(m);
    return std::max(std::abs(sd.max()), std::abs(sd.min()));
}

double op_norm_diff(const SymMatrix& a, const SymMatrix& b)
{
    return op_norm(SymMatrix(a.matrix() - b.matrix()));
}

} // namespace pframe
