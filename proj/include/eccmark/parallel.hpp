#pragma once

#include <cstddef>
#include <functional>

namespace eccmark {

/// Worker count used by ensemble and replicate loops. Defaults to the
/// hardware concurrency; ECC_MARK_THREADS overrides it at first use.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

/// Runs body(i) for i in [0, count). Iterations must write only to their own
/// slot; results are therefore independent of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace eccmark
