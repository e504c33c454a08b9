#include "loewner/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace loewner {

namespace {
std::atomic<int> g_override{0};

int env_cap() {
  const char* s = std::getenv("LOEWNER_THREADS");
  if (s == nullptr) return 0;
  try {
    const int n = std::stoi(s);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}
}  // namespace

int max_threads() {
  if (const int o = g_override.load(); o > 0) return o;
  const int hw = omp_get_max_threads();
  const int cap = env_cap();
  return cap > 0 && cap < hw ? cap : hw;
}

void set_max_threads(int n) { g_override.store(n > 0 ? n : 0); }

namespace detail {
void parallel_for(std::size_t n, void (*body)(void*, std::size_t), void* ctx) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
  for (long long i = 0; i < count; ++i) body(ctx, static_cast<std::size_t>(i));
}
}  // namespace detail

}  // namespace loewner
