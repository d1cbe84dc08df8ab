#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace leafkit::cli {

/// Runs task(i) for i in [0, n) on up to `workers` threads. Tasks write only
/// to their own slot, so callers merge results in index order. If tasks throw,
/// the exception of the lowest failing index is rethrown after all finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

}  // namespace leafkit::cli
