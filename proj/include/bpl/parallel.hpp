#pragma once

#include <cstddef>
#include <functional>

namespace bpl {

// Worker count used when a caller passes 0. Starts at hardware concurrency.
unsigned default_threads();
void set_default_threads(unsigned threads);

// Runs body(chunk) for every chunk in [0, chunks) on up to `threads` workers.
// Chunks are claimed dynamically; callers write into per-chunk slots and
// reduce in chunk order, so results never depend on the schedule.
void for_each_chunk(std::size_t chunks, unsigned threads,
                    const std::function<void(std::size_t)>& body);

}  // namespace bpl
