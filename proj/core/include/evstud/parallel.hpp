#pragma once

#include <cstddef>
#include <functional>

namespace evstud {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index writes
/// only its own output slot, so results do not depend on scheduling. The first
/// exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace evstud
