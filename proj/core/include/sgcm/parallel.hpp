#pragma once

#include <cstddef>
#include <functional>

namespace sgcm {

/// Number of workers to use: min(hardware threads, SGCM_THREADS if set).
/// SGCM_THREADS=1 forces serial execution.
int resolve_workers();

/// Run body(i) for i in [0, n).  Work items must be independent and write
/// only to their own slots; scheduling order is unspecified, so any routine
/// built on this must derive per-item random streams up front.
///
/// The first exception thrown (lowest item index) is rethrown after all
/// workers join, which keeps failure reporting deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int workers = 0);

}  // namespace sgcm
