#include "pframe/discrete_measure.hpp"

#include "pframe/errors.hpp"
#include "pframe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace pframe {

namespace {

void validate(std::size_t dim, const std::vector<Vector>& atoms, const Vector& weights)
{
    if (dim == 0)
        throw InvalidInput("measure dimension must be positive");
    if (atoms.empty())
        throw InvalidInput("measure must have at least one atom");
    if (atoms.size() != weights.size())
        throw InvalidInput("measure has " + std::to_string(atoms.size()) + " atoms but " +
                           std::to_string(weights.size()) + " weights");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != dim)
            throw InvalidInput("atom " + std::to_string(i) + " has length " + std::to_string(atoms[i].size()) +
                               ", expected " + std::to_string(dim));
        for (double x : atoms[i])
            if (!std::isfinite(x))
                throw InvalidInput("atom " + std::to_string(i) + " has a non-finite entry");
        if (!std::isfinite(weights[i]) || weights[i] < 0.0)
            throw InvalidInput("weight " + std::to_string(i) + " is negative or non-finite");
    }
}

// Neumaier summation; plain accumulation drifts past the mass tolerance for
// ~1e5 atoms.
double total(const Vector& w)
{
    double s = 0.0;
    double c = 0.0;
    for (double x : w) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

void require_mass(const Vector& w, double tol)
{
    const double s = total(w);
    if (!(std::abs(s - 1.0) <= tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weights sum to " << s << ", expected 1 within " << tol;
        throw InvalidInput(msg.str());
    }
}

} // namespace

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<Vector> atoms, Vector weights)
    : dim_(dim), atoms_(std::move(atoms)), weights_(std::move(weights))
{
    validate(dim_, atoms_, weights_);
    require_mass(weights_, kMassTolerance);
}

DiscreteMeasure DiscreteMeasure::normalized(std::size_t dim, std::vector<Vector> atoms, Vector weights, double tol)
{
    validate(dim, atoms, weights);
    require_mass(weights, tol);
    const double s = total(weights);
    for (double& w : weights)
        w /= s;
    DiscreteMeasure m;
    m.dim_ = dim;
    m.atoms_ = std::move(atoms);
    m.weights_ = std::move(weights);
    require_mass(m.weights_, kMassTolerance);
    return m;
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t dim, std::vector<Vector> atoms)
{
    const std::size_t n = atoms.size();
    if (n == 0)
        throw InvalidInput("measure must have at least one atom");
    return normalized(dim, std::move(atoms), Vector(n, 1.0 / static_cast<double>(n)), 1e-9);
}

DiscreteMeasure DiscreteMeasure::dirac(Vector x)
{
    const std::size_t d = x.size();
    return DiscreteMeasure(d, {std::move(x)}, {1.0});
}

DiscreteMeasure DiscreteMeasure::from_frame(const FiniteFrame& f)
{
    return DiscreteMeasure(f.dim(), f.vectors(), f.weights());
}

std::vector<double> DiscreteMeasure::packed() const
{
    std::vector<double> out;
    out.reserve(atoms_.size() * dim_);
    for (const auto& a : atoms_)
        out.insert(out.end(), a.begin(), a.end());
    return out;
}

MergedAtoms merge_atoms(const DiscreteMeasure& m, double radius)
{
    const std::size_t n = m.size();
    constexpr auto npos = std::numeric_limits<std::size_t>::max();

    // Sort by first coordinate; atoms within `radius` of each other are then
    // within `radius` in that coordinate, so a forward window suffices.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m.atom(a)[0] < m.atom(b)[0]; });

    std::vector<std::size_t> leader(n, npos);
    const double r2 = radius * radius;
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = order[p];
        if (leader[i] != npos)
            continue;
        leader[i] = i;
        for (std::size_t q = p + 1; q < n; ++q) {
            const std::size_t j = order[q];
            if (m.atom(j)[0] - m.atom(i)[0] > radius)
                break;
            if (leader[j] == npos && squared_distance(m.atom(i), m.atom(j)) <= r2)
                leader[j] = i;
        }
    }

    // Output order follows the first occurrence in the original indexing.
    MergedAtoms out;
    out.group.assign(n, npos);
    std::vector<std::size_t> slot(n, npos);
    std::vector<Vector> atoms;
    Vector weights;
    for (std::size_t i = 0; i < n; ++i) {
        if (m.weight(i) == 0.0)
            continue;
        const std::size_t l = leader[i];
        if (slot[l] == npos) {
            slot[l] = atoms.size();
            atoms.push_back(m.atom(l));
            weights.push_back(0.0);
        }
        out.group[i] = slot[l];
        weights[slot[l]] += m.weight(i);
    }
    out.measure = DiscreteMeasure::normalized(m.dim(), std::move(atoms), std::move(weights), 1e-9);
    return out;
}

SymMatrix second_moment(const DiscreteMeasure& m)
{
    const auto coords = m.packed();
    return SymMatrix(kernels::second_moment_parallel({coords, m.dim()}, m.weights()));
}

DiscreteMeasure push_forward_canonical(const DiscreteMeasure& m)
{
    const auto g = canonical_parseval(m.as_frame());
    return DiscreteMeasure(m.dim(), g.vectors(), m.weights());
}

} // namespace pframe
