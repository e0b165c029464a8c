#pragma once

// Brute-force W2 oracles for tiny supports. Independent of the solver: no
// potentials, no pivoting, just enumeration.

#include "pframe/discrete_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace pframe::oracle {

/// Minimum of sum w_ij c_ij over all vertices of the transportation
/// polytope. Every vertex is the unique flow on some spanning tree of the
/// bipartite graph, so enumerate all (n+m-1)-subsets of arcs, keep the ones
/// that form a tree, solve the flow by peeling leaves, and keep the feasible
/// ones. Returns the squared cost. Intended for n, m <= 4.
inline double w2_squared_by_vertices(const DiscreteMeasure& a, const DiscreteMeasure& b)
{
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t arcs = n * m;
    const std::size_t k = n + m - 1;
    std::vector<double> cost(arcs);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            cost[i * m + j] = squared_distance(a.atom(i), b.atom(j));

    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(arcs, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
        std::vector<std::size_t> chosen;
        for (std::size_t t = 0; t < arcs; ++t)
            if (pick[t])
                chosen.push_back(t);

        // Peel leaves: a node with exactly one unresolved arc fixes that arc's flow.
        std::vector<double> residual(n + m);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = a.weight(i);
        for (std::size_t j = 0; j < m; ++j)
            residual[n + j] = b.weight(j);
        std::vector<double> flow(arcs, 0.0);
        std::vector<bool> done(arcs, false);
        std::size_t resolved = 0;
        bool progress = true;
        while (progress && resolved < k) {
            progress = false;
            for (std::size_t node = 0; node < n + m; ++node) {
                std::size_t open = 0;
                std::size_t last = 0;
                for (std::size_t t : chosen) {
                    if (done[t])
                        continue;
                    const bool touches = node < n ? t / m == node : t % m == node - n;
                    if (touches) {
                        ++open;
                        last = t;
                    }
                }
                if (open != 1)
                    continue;
                const double f = residual[node];
                flow[last] = f;
                done[last] = true;
                residual[last / m] -= f;
                residual[n + last % m] -= f;
                ++resolved;
                progress = true;
            }
        }
        if (resolved < k)
            continue; // contains a cycle, not a tree
        bool feasible = true;
        for (double r : residual)
            feasible = feasible && std::abs(r) <= 1e-12;
        double total = 0.0;
        for (std::size_t t : chosen) {
            feasible = feasible && flow[t] >= -1e-14;
            total += flow[t] * cost[t];
        }
        if (feasible)
            best = std::min(best, total);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

/// Equal-weight, equal-size case: by Birkhoff the optimum is a permutation.
inline double w2_squared_by_permutations(const DiscreteMeasure& a, const DiscreteMeasure& b)
{
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += squared_distance(a.atom(i), b.atom(perm[i]));
        best = std::min(best, total / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace pframe::oracle
