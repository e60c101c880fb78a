#pragma once

#include <cstddef>
#include <functional>

namespace consensus_lab {

/// Worker cap: CONSENSUS_LAB_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(k) for k in [0, n). Each index is processed exactly once; callers
/// write results into per-index slots so the outcome does not depend on the
/// schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace consensus_lab
