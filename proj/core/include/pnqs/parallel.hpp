#pragma once

#include <cstddef>
#include <functional>

namespace pnqs {

// Worker threads used by batch loops: PNQS_THREADS if set, otherwise the
// hardware concurrency, never less than one.
int worker_count();

// Runs body(i) for i in [0, n), statically chunked over the workers.  Each
// index is visited exactly once; bodies must only write state owned by
// their index, which keeps results identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pnqs
