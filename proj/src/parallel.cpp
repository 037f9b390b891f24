#include "eoslab/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace eoslab {

int worker_count() {
    if (const char* env = std::getenv("EOSLAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

std::vector<Trajectory> run_batch(std::span<const RunConfig> configs, Exec exec) {
    std::vector<Trajectory> out(configs.size());
    for_each_index(configs.size(), exec, [&](std::size_t i) { out[i] = run(configs[i]); });
    return out;
}

}  // namespace eoslab
