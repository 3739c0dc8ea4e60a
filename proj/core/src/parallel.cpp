#include "fairclust/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>

namespace fairclust {

namespace {

std::atomic<int> g_workers{0};

// Below this many items the fork/join overhead dominates.
constexpr std::ptrdiff_t kParallelGrain = 2048;

int default_workers() {
  if (const char* env = std::getenv("FAIRCLUST_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace

int worker_count() {
  const int w = g_workers.load();
  return w >= 1 ? w : default_workers();
}

void set_worker_count(int workers) { g_workers.store(workers >= 1 ? workers : 0); }

namespace {

void run(std::ptrdiff_t n, std::ptrdiff_t grain, int schedule_chunk,
         const std::function<void(std::ptrdiff_t)>& body) {
  const int workers = worker_count();
  if (workers <= 1 || n < grain || omp_in_parallel()) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, schedule_chunk) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(fairclust_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body) {
  run(n, kParallelGrain, static_cast<int>(kParallelGrain / 4), body);
}

void parallel_tasks(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& body) { run(n, 2, 1, body); }

}  // namespace fairclust
