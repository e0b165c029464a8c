#pragma once

#include "pframe/discrete_measure.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

namespace pframe {

struct CouplingEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0;
};

/// Transport plan between two discrete measures, stored sparsely. Entries
/// are sorted by (i, j) and unique; absent pairs carry zero mass.
struct Coupling {
    DiscreteMeasure source;
    DiscreteMeasure target;
    std::vector<CouplingEntry> entries;

    /// Dense N x M matrix; only sensible for small supports.
    Matrix dense() const;
};

struct CouplingReport {
    double max_row_residual = 0.0;
    double max_col_residual = 0.0;
    double most_negative = 0.0;
    std::size_t negative_entries = 0;
    bool shape_ok = true;
    bool pass = true;
};

inline constexpr double kCouplingTolerance = 1e-10;

/// Checks marginals against m and n and the sign of every entry.
CouplingReport validate_coupling(const Coupling& c, const DiscreteMeasure& m, const DiscreteMeasure& n,
                                 double tol = kCouplingTolerance);

/// sum_{ij} w_ij ||x_i - y_j||^2, and its square root.
double coupling_cost_squared(const Coupling& c);
double coupling_cost(const Coupling& c);

/// Product coupling w_i v_j.
Coupling product_coupling(const DiscreteMeasure& m, const DiscreteMeasure& n);

struct TransportResult {
    double cost = 0.0;
    double cost_squared = 0.0;
    Coupling coupling;
    std::size_t iterations = 0;
    std::size_t degenerate_pivots = 0;
};

/// Exact W2 between discrete measures by the transportation network simplex.
/// Atoms within 1e-12 of each other are merged before solving and the plan
/// is split back proportionally, so the coupling refers to the original atoms.
TransportResult w2_discrete(const DiscreteMeasure& m, const DiscreteMeasure& n);

/// Writes `i,j,weight,cost_ij` rows for every stored entry.
void write_coupling_csv(std::ostream& out, const Coupling& c);

} // namespace pframe
