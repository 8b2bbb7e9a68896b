#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

namespace chaosres {

/// Selects between the OpenMP kernel and its serial reference.
enum class Exec { serial, parallel };

/// Number of OpenMP workers a parallel region would use (1 without OpenMP).
int worker_count();

/// Caps the number of OpenMP workers; values < 1 are ignored.
void set_worker_count(int workers);

/// Calls fn(i) for every i in [0, n). In parallel mode the iterations are
/// distributed over OpenMP workers; fn must only write to per-index state.
/// The first exception thrown by any iteration is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace chaosres
