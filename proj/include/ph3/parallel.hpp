#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>

namespace ph3 {

/// Kernels take an execution policy so that tests can compare the OpenMP
/// path against the serial reference bit for bit.
enum class Execution { serial, parallel };

/// Cap for OpenMP worker threads; 0 leaves the runtime default.
void set_max_jobs(int jobs);
int max_jobs();

/// Calls body(i) for i in [0, n). Results must be written to per-index
/// slots. If bodies throw, the exception of the lowest index is rethrown,
/// which is what the serial loop would have reported.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::int64_t failed_at = -1;
  std::mutex guard;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_jobs())
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (failed_at < 0 || i < failed_at) {
        failed_at = i;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Per-task generator: master seed + task index.
inline std::mt19937_64 task_rng(std::uint64_t master_seed, std::uint64_t task) {
  return std::mt19937_64(master_seed + task);
}

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ph3
