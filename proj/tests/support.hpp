#pragma once

// Shared generators for the unit and acceptance tests.

#include "pframe/frames.hpp"
#include "pframe/matrix.hpp"
#include "pframe/rng.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace pframe::testing {

inline Matrix random_symmetric(std::size_t d, Rng& rng, double scale = 1.0)
{
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j)
            m(i, j) = m(j, i) = scale * rng.normal();
    return m;
}

/// Q diag(lambda) Q^T with a Haar-ish orthogonal Q from Gram-Schmidt.
inline Matrix random_spd(std::size_t d, Rng& rng, double lo, double hi)
{
    Matrix q(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        for (;;) {
            Vector v(d);
            for (double& x : v)
                x = rng.normal();
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t j = 0; j < k; ++j) {
                    double c = 0.0;
                    for (std::size_t i = 0; i < d; ++i)
                        c += v[i] * q(i, j);
                    for (std::size_t i = 0; i < d; ++i)
                        v[i] -= c * q(i, j);
                }
            const double n = norm(v);
            if (n < 1e-6)
                continue;
            for (std::size_t i = 0; i < d; ++i)
                q(i, k) = v[i] / n;
            break;
        }
    }
    Vector lambda(d);
    for (double& l : lambda)
        l = rng.uniform(lo, hi);
    Matrix m = q * Matrix::diagonal(lambda) * q.transpose();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j)
            m(i, j) = m(j, i);
    return m;
}

/// Random frame with Gaussian vectors. Weights are either all one or drawn
/// from [0.2, 2) depending on `weighted`. Redraws until the frame operator is
/// comfortably nonsingular.
inline FiniteFrame random_frame(std::size_t d, std::size_t n, Rng& rng, bool weighted)
{
    for (;;) {
        std::vector<Vector> vectors(n, Vector(d));
        for (auto& v : vectors)
            for (double& x : v)
                x = rng.normal();
        Vector weights(n, 1.0);
        if (weighted)
            for (double& w : weights)
                w = rng.uniform(0.2, 2.0);
        FiniteFrame f(d, std::move(vectors), std::move(weights));
        const auto b = frame_bounds(f);
        if (b.lower > 1e-3 * b.upper)
            return f;
    }
}

inline FiniteFrame mercedes_benz()
{
    const double s = std::sqrt(3.0) / 2.0;
    return FiniteFrame(2, {{0.0, 1.0}, {-s, -0.5}, {s, -0.5}});
}

} // namespace pframe::testing
