#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

namespace pframe::detail {

/// body(i) for i in [0, n) across OpenMP threads. Each index writes only its
/// own slot, so results do not depend on scheduling; the first exception
/// caught is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body)
{
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(pframe_parallel_for)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace pframe::detail
