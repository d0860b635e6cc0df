#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace ssir {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double value);

unsigned resolve_threads(unsigned requested);

/// Runs body(k) for k in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Results must be written to per-index slots; the exception
/// thrown by the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace ssir
