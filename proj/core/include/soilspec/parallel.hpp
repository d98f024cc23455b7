#pragma once

#include <cstddef>
#include <functional>

namespace soilspec {

/// Caps the number of worker threads used by parallel_for.
/// 0 means "hardware concurrency". Results never depend on this value:
/// each work unit derives its own RNG stream and writes its own slot.
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, n). Work units must be independent.
/// Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace soilspec
