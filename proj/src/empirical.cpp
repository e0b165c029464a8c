#include "pframe/empirical.hpp"

#include "pframe/errors.hpp"
#include "pframe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

namespace pframe {

namespace {

DiscreteMeasure batch_of(const MeasureSpec& spec, std::size_t batch, std::uint64_t seed)
{
    if (spec.family() == Family::discrete && spec.atoms().size() <= batch)
        return spec.atoms();
    const auto pts = sample_points(spec, batch, seed);
    std::vector<Vector> atoms(batch);
    for (std::size_t i = 0; i < batch; ++i)
        atoms[i].assign(pts.begin() + static_cast<std::ptrdiff_t>(i * spec.dim()),
                        pts.begin() + static_cast<std::ptrdiff_t>((i + 1) * spec.dim()));
    return DiscreteMeasure::uniform(spec.dim(), std::move(atoms));
}

} // namespace

EmpiricalW2 w2_empirical(const MeasureSpec& a, const MeasureSpec& b, std::size_t batch, std::size_t reps,
                         std::uint64_t seed)
{
    if (batch < 1)
        throw InvalidInput("w2_empirical: batch must be at least 1");
    if (reps < 1)
        throw InvalidInput("w2_empirical: need at least one repetition");
    if (a.dim() != b.dim())
        throw InvalidInput("w2_empirical: dimension mismatch");

    EmpiricalW2 out;
    out.batch = batch;
    out.values.assign(reps, 0.0);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(reps); ++ri) {
        const auto r = static_cast<std::uint64_t>(ri);
        try {
            const auto x = batch_of(a, batch, splitmix64(seed ^ splitmix64(2 * r)));
            const auto y = batch_of(b, batch, splitmix64(seed ^ splitmix64(2 * r + 1)));
            out.values[r] = w2_discrete(x, y).cost;
        } catch (...) {
#pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);

    const double n = static_cast<double>(reps);
    out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : out.values)
        ss += (v - out.mean) * (v - out.mean);
    out.stddev = reps > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.min = *std::min_element(out.values.begin(), out.values.end());
    out.max = *std::max_element(out.values.begin(), out.values.end());
    return out;
}

} // namespace pframe
