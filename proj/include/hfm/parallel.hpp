#pragma once

#include <cstddef>
#include <functional>

namespace hfm {

/// Worker cap used by every parallel loop in the library. Defaults to the
/// HFM_THREADS environment variable, else std::thread::hardware_concurrency().
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n) over contiguous chunks. Results must be
/// written to per-index slots; no reduction happens here, so output is
/// independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hfm
