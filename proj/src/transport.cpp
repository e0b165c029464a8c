#include "pframe/transport.hpp"

#include "pframe/errors.hpp"
#include "pframe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace pframe {

namespace {

constexpr auto npos = std::numeric_limits<std::size_t>::max();

/// Transportation simplex on the complete bipartite graph. Nodes 0..n-1 are
/// sources, n..n+m-1 sinks, and n+m is an artificial root joined to every
/// node by an expensive arc. Real arc i*m + j runs from source i to sink j.
///
/// The basis is kept strongly feasible (every zero-flow tree arc points
/// towards the root) by the usual leaving-arc rule: the last blocking arc met
/// when walking the cycle from its apex in the direction of flow. This rules
/// out cycling, so no Bland fallback is needed.
class NetworkSimplex {
public:
    NetworkSimplex(std::size_t n, std::size_t m, std::vector<double> cost, const Vector& supply,
                   const Vector& demand)
        : n_(n), m_(m), real_(n * m), root_(n + m), cost_(std::move(cost)), flow_(n * m + n + m, 0.0),
          adj_(n + m + 1), parent_(n + m + 1), parent_arc_(n + m + 1), depth_(n + m + 1), pot_(n + m + 1)
    {
        double max_cost = 0.0;
        for (double c : cost_)
            max_cost = std::max(max_cost, c);
        eps_ = 1e-14 * max_cost * static_cast<double>(n + m);
        const double art = std::max(1.0, max_cost) * static_cast<double>(n + m + 1);
        cost_.resize(real_ + n + m, art);
        for (std::size_t i = 0; i < n; ++i)
            add_arc(real_ + i, supply[i]);
        for (std::size_t j = 0; j < m; ++j)
            add_arc(real_ + n + j, demand[j]);
    }

    void run()
    {
        const std::size_t limit = 50 * real_ + 1000;
        block_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(real_)))));
        for (;;) {
            compute_tree();
            const std::size_t entering = block_search();
            if (entering == npos)
                return;
            if (++iterations_ > limit)
                throw StageFailure("network simplex exceeded " + std::to_string(limit) + " pivots");
            if (!pivot(entering))
                ++degenerate_;
        }
    }

    std::size_t iterations() const { return iterations_; }
    std::size_t degenerate() const { return degenerate_; }

    /// Real arcs carrying positive flow, in arc order.
    std::vector<CouplingEntry> plan() const
    {
        std::vector<CouplingEntry> out;
        for (std::size_t a = 0; a < real_; ++a)
            if (flow_[a] > 0.0)
                out.push_back({a / m_, a % m_, flow_[a]});
        return out;
    }

private:
    std::size_t tail(std::size_t arc) const
    {
        if (arc < real_)
            return arc / m_;
        const std::size_t k = arc - real_;
        return k < n_ ? k : root_;
    }

    std::size_t head(std::size_t arc) const
    {
        if (arc < real_)
            return n_ + arc % m_;
        const std::size_t k = arc - real_;
        return k < n_ ? root_ : k;
    }

    void add_arc(std::size_t arc, double f)
    {
        flow_[arc] = f;
        adj_[tail(arc)].push_back(arc);
        adj_[head(arc)].push_back(arc);
    }

    void remove_arc(std::size_t arc)
    {
        for (std::size_t node : {tail(arc), head(arc)}) {
            auto& list = adj_[node];
            list.erase(std::find(list.begin(), list.end(), arc));
        }
        flow_[arc] = 0.0;
    }

    // Potentials with c_a + pi(tail) - pi(head) = 0 on tree arcs, pi(root) = 0.
    void compute_tree()
    {
        queue_.clear();
        queue_.push_back(root_);
        parent_[root_] = root_;
        parent_arc_[root_] = npos;
        depth_[root_] = 0;
        pot_[root_] = 0.0;
        for (std::size_t q = 0; q < queue_.size(); ++q) {
            const std::size_t node = queue_[q];
            for (std::size_t arc : adj_[node]) {
                if (arc == parent_arc_[node])
                    continue;
                const bool down = tail(arc) == node;
                const std::size_t next = down ? head(arc) : tail(arc);
                parent_[next] = node;
                parent_arc_[next] = arc;
                depth_[next] = depth_[node] + 1;
                pot_[next] = down ? pot_[node] + cost_[arc] : pot_[node] - cost_[arc];
                queue_.push_back(next);
            }
        }
        if (queue_.size() != n_ + m_ + 1)
            throw StageFailure("network simplex basis is not a spanning tree");
    }

    double reduced_cost(std::size_t arc) const
    {
        return cost_[arc] + pot_[arc / m_] - pot_[n_ + arc % m_];
    }

    // Most negative reduced cost within the first block that has a
    // candidate, scanning cyclically from where the last search stopped.
    // Ties go to the lower arc index.
    std::size_t block_search()
    {
        std::size_t best = npos;
        double best_rc = -eps_;
        std::size_t in_block = 0;
        for (std::size_t k = 0; k < real_; ++k) {
            const std::size_t arc = (next_ + k) % real_;
            const double rc = reduced_cost(arc);
            if (rc < best_rc || (rc == best_rc && best != npos && arc < best)) {
                best_rc = rc;
                best = arc;
            }
            if (++in_block == block_) {
                in_block = 0;
                if (best != npos) {
                    next_ = (arc + 1) % real_;
                    return best;
                }
            }
        }
        return best;
    }

    // Returns true when the pivot moved a positive amount of flow.
    bool pivot(std::size_t entering)
    {
        // Flow goes first -> second on the entering arc, then up from second
        // to the apex and down from the apex to first.
        const std::size_t first = tail(entering);
        const std::size_t second = head(entering);
        std::size_t x = first;
        std::size_t y = second;
        while (depth_[x] > depth_[y])
            x = parent_[x];
        while (depth_[y] > depth_[x])
            y = parent_[y];
        while (x != y) {
            x = parent_[x];
            y = parent_[y];
        }
        const std::size_t apex = x;

        double theta = std::numeric_limits<double>::infinity();
        std::size_t leaving = npos;
        // First side carries flow downwards: arcs pointing up are reduced.
        for (std::size_t u = first; u != apex; u = parent_[u]) {
            const std::size_t arc = parent_arc_[u];
            if (tail(arc) == u && flow_[arc] < theta) {
                theta = flow_[arc];
                leaving = arc;
            }
        }
        // Second side carries flow upwards: arcs pointing down are reduced.
        // `<=` makes the blocking arc nearest the apex win, i.e. the last one
        // on the cycle.
        for (std::size_t u = second; u != apex; u = parent_[u]) {
            const std::size_t arc = parent_arc_[u];
            if (head(arc) == u && flow_[arc] <= theta) {
                theta = flow_[arc];
                leaving = arc;
            }
        }
        if (leaving == npos)
            throw StageFailure("network simplex found an unbounded cycle");

        for (std::size_t u = first; u != apex; u = parent_[u]) {
            const std::size_t arc = parent_arc_[u];
            flow_[arc] += tail(arc) == u ? -theta : theta;
        }
        for (std::size_t u = second; u != apex; u = parent_[u]) {
            const std::size_t arc = parent_arc_[u];
            flow_[arc] += head(arc) == u ? -theta : theta;
        }
        remove_arc(leaving);
        add_arc(entering, theta);
        return theta > 0.0;
    }

    std::size_t n_;
    std::size_t m_;
    std::size_t real_;
    std::size_t root_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> parent_arc_;
    std::vector<std::size_t> depth_;
    std::vector<double> pot_;
    std::vector<std::size_t> queue_;
    double eps_ = 0.0;
    std::size_t block_ = 1;
    std::size_t next_ = 0;
    std::size_t iterations_ = 0;
    std::size_t degenerate_ = 0;
};

std::vector<std::vector<std::size_t>> members_of(const MergedAtoms& merged)
{
    std::vector<std::vector<std::size_t>> members(merged.measure.size());
    for (std::size_t i = 0; i < merged.group.size(); ++i)
        if (merged.group[i] != npos)
            members[merged.group[i]].push_back(i);
    return members;
}

Vector shares(const DiscreteMeasure& m, const std::vector<std::vector<std::size_t>>& members)
{
    Vector share(m.size(), 0.0);
    for (const auto& group : members) {
        double total = 0.0;
        for (std::size_t i : group)
            total += m.weight(i);
        for (std::size_t i : group)
            share[i] = m.weight(i) / total;
    }
    return share;
}

} // namespace

Matrix Coupling::dense() const
{
    Matrix out(source.size(), target.size());
    for (const auto& e : entries)
        out(e.i, e.j) += e.weight;
    return out;
}

CouplingReport validate_coupling(const Coupling& c, const DiscreteMeasure& m, const DiscreteMeasure& n, double tol)
{
    CouplingReport r;
    if (c.source.size() != m.size() || c.target.size() != n.size()) {
        r.shape_ok = false;
        r.pass = false;
        return r;
    }
    Vector rows(m.size(), 0.0);
    Vector cols(n.size(), 0.0);
    for (const auto& e : c.entries) {
        if (e.i >= m.size() || e.j >= n.size()) {
            r.shape_ok = false;
            continue;
        }
        rows[e.i] += e.weight;
        cols[e.j] += e.weight;
        if (e.weight < 0.0) {
            ++r.negative_entries;
            r.most_negative = std::min(r.most_negative, e.weight);
        }
    }
    for (std::size_t i = 0; i < m.size(); ++i)
        r.max_row_residual = std::max(r.max_row_residual, std::abs(rows[i] - m.weight(i)));
    for (std::size_t j = 0; j < n.size(); ++j)
        r.max_col_residual = std::max(r.max_col_residual, std::abs(cols[j] - n.weight(j)));
    r.pass = r.shape_ok && r.negative_entries == 0 && r.max_row_residual <= tol && r.max_col_residual <= tol;
    return r;
}

double coupling_cost_squared(const Coupling& c)
{
    double total = 0.0;
    for (const auto& e : c.entries)
        total += e.weight * squared_distance(c.source.atom(e.i), c.target.atom(e.j));
    return total;
}

double coupling_cost(const Coupling& c)
{
    return std::sqrt(std::max(0.0, coupling_cost_squared(c)));
}

Coupling product_coupling(const DiscreteMeasure& m, const DiscreteMeasure& n)
{
    Coupling c{m, n, {}};
    c.entries.reserve(m.size() * n.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < n.size(); ++j)
            c.entries.push_back({i, j, m.weight(i) * n.weight(j)});
    return c;
}

TransportResult w2_discrete(const DiscreteMeasure& m, const DiscreteMeasure& n)
{
    if (m.dim() != n.dim())
        throw InvalidInput("w2: dimension mismatch (" + std::to_string(m.dim()) + " vs " + std::to_string(n.dim()) +
                           ")");
    const auto a = merge_atoms(m);
    const auto b = merge_atoms(n);
    const auto pa = a.measure.packed();
    const auto pb = b.measure.packed();
    auto cost = kernels::cost_matrix_parallel({pa, m.dim()}, {pb, n.dim()});

    NetworkSimplex solver(a.measure.size(), b.measure.size(), std::move(cost), a.measure.weights(),
                          b.measure.weights());
    solver.run();

    const auto rows = members_of(a);
    const auto cols = members_of(b);
    const Vector row_share = shares(m, rows);
    const Vector col_share = shares(n, cols);

    TransportResult result;
    result.coupling.source = m;
    result.coupling.target = n;
    for (const auto& e : solver.plan())
        for (std::size_t i : rows[e.i])
            for (std::size_t j : cols[e.j])
                result.coupling.entries.push_back({i, j, e.weight * row_share[i] * col_share[j]});
    std::sort(result.coupling.entries.begin(), result.coupling.entries.end(),
              [](const CouplingEntry& x, const CouplingEntry& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });

    result.cost_squared = coupling_cost_squared(result.coupling);
    result.cost = std::sqrt(std::max(0.0, result.cost_squared));
    result.iterations = solver.iterations();
    result.degenerate_pivots = solver.degenerate();
    return result;
}

void write_coupling_csv(std::ostream& out, const Coupling& c)
{
    out << "i,j,weight,cost_ij\n";
    char buf[96];
    for (const auto& e : c.entries) {
        const double cij = squared_distance(c.source.atom(e.i), c.target.atom(e.j));
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", e.i, e.j, e.weight, cij);
        out << buf;
    }
}

} // namespace pframe
