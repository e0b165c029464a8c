#pragma once

#include "pframe/measures.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pframe {

/// Spread of exact W2 between independent empirical batches. Biased upwards
/// for a finite batch; this is an estimate, never a certificate.
struct EmpiricalW2 {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t batch = 0;
    std::vector<double> values;
};

/// Each repetition draws `batch` points from a and from b on its own
/// substream and solves the discrete problem exactly. A discrete spec with at
/// most `batch` atoms is used as is instead of being sampled.
EmpiricalW2 w2_empirical(const MeasureSpec& a, const MeasureSpec& b, std::size_t batch, std::size_t reps,
                         std::uint64_t seed);

} // namespace pframe
