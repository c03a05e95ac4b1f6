#pragma once

#include <cstddef>
#include <functional>

namespace gwht {

// 0 means "use hardware concurrency"; GWHT_WORKERS overrides the default.
std::size_t resolve_workers(std::size_t requested);

// Runs fn(i) for i in [0, count) on up to `workers` threads. Callers write
// results into slot i, so the outcome never depends on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace gwht
