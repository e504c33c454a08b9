#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace loewner {

/// Kernels come in a serial reference flavour and an OpenMP flavour; both produce
/// bit-identical results because every index writes only its own slot.
enum class Exec { serial, parallel };

/// Thread cap: LOEWNER_THREADS if set and positive, else the OpenMP default.
int max_threads();
/// Override the cap for this process (0 restores the environment/default).
void set_max_threads(int n);

namespace detail {
void parallel_for(std::size_t n, void (*body)(void*, std::size_t), void* ctx);
}

/// Run f(i) for i in [0, n). In parallel mode the first exception by index is rethrown
/// after the loop, so failures are reported identically to the serial loop.
template <class F>
void for_each_index(Exec exec, std::size_t n, F&& f) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  struct Ctx {
    F* f;
    std::vector<std::exception_ptr>* errors;
  } ctx{&f, &errors};
  detail::parallel_for(
      n,
      [](void* p, std::size_t i) {
        auto* c = static_cast<Ctx*>(p);
        try {
          (*c->f)(i);
        } catch (...) {
          (*c->errors)[i] = std::current_exception();
        }
      },
      &ctx);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace loewner
