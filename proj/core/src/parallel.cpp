#include "drn/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace drn {

namespace {
std::atomic<int> g_cap{-1};  // -1: not resolved yet

int resolve_from_env() {
  int n = 0;
  if (const char* env = std::getenv("DRN_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return n;
}
}  // namespace

int thread_cap() {
  int cap = g_cap.load(std::memory_order_relaxed);
  if (cap > 0) return cap;
  cap = resolve_from_env();
  g_cap.store(cap, std::memory_order_relaxed);
  return cap;
}

void set_thread_cap(int n) {
  g_cap.store(n >= 1 ? n : resolve_from_env(), std::memory_order_relaxed);
}

namespace detail {
int threads_for(int64_t items) {
  int cap = thread_cap();
  if (items < 2) return 1;
  if (items < cap) return static_cast<int>(items);
  return cap;
}
}  // namespace detail

}  // namespace drn
