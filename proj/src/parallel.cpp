#include "ph3/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace ph3 {
namespace {
std::atomic<int> jobs_cap{0};
}

void set_max_jobs(int jobs) { jobs_cap.store(jobs < 0 ? 0 : jobs); }

int max_jobs() {
  const int cap = jobs_cap.load();
  return cap > 0 ? cap : omp_get_max_threads();
}

}  // namespace ph3
