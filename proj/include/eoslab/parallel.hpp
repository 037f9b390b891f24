#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "eoslab/gd_engine.hpp"

namespace eoslab {

enum class Exec { Serial, Parallel };

// Size of the worker pool: EOSLAB_THREADS when set to a positive integer, otherwise the OpenMP default.
int worker_count();

// Calls fn(i) for i in [0, n). Each index writes only its own output slot, so the
// parallel and serial paths produce identical results.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex mu;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<Trajectory> run_batch(std::span<const RunConfig> configs, Exec exec = Exec::Parallel);

}  // namespace eoslab
