#include "fieldlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fieldlab {

namespace {
std::atomic<int> g_default_workers{0};
thread_local bool t_inside_worker = false;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FIELDLAB_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_workers(int n) { g_default_workers = n; }

int default_workers() { return resolve_workers(g_default_workers.load()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers) {
  const std::size_t w =
      std::min<std::size_t>(n, static_cast<std::size_t>(workers > 0 ? workers : default_workers()));
  if (w <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      t_inside_worker = true;
      try {
        for (std::size_t i = k; i < n; i += w) fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fieldlab
