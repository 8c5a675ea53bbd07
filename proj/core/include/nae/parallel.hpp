#pragma once

#include <functional>

namespace nae {

/// Runs fn(0), ..., fn(n-1) across up to `threads` workers pulling indices
/// from a shared counter. threads <= 1 runs inline on the caller. The first
/// exception from any worker is rethrown after all workers finish. Only safe
/// for bodies that do not touch shared mutable state.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace nae
