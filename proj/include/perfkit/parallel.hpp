#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace perfkit {

// Worker count: PERFKIT_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for every i in [0, count) on up to `threads` workers. Each
// index is visited exactly once; callers must write results to
// index-addressed slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

// splitmix64 finalizer; derives independent per-task seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace perfkit
